import math

import mpmath as mp
import numpy as np
import pytest

from levyspec import (
    InvalidArgumentError,
    KernelSpec,
    SingularPointError,
    bessel_k1,
    dump_kernel_csv,
    levy_density,
    load_kernel_csv,
    make_grid,
    tabulate_kernel,
)


def k1_quadrature_oracle(x: float) -> float:
    """Independent reference: K1(x) = int_0^inf e^{-x cosh t} cosh t dt."""
    mp.mp.dps = 30
    val = mp.quad(lambda t: mp.exp(-x * mp.cosh(t)) * mp.cosh(t), [0, mp.inf])
    return float(val)


class TestBesselK1:
    def test_small_argument_limit(self):
        x = 1e-6
        assert x * bessel_k1(x) == pytest.approx(1.0, abs=1e-6)

    def test_reference_value_at_one(self):
        # frozen from the quadrature oracle (30 digits): 0.601907230197235...
        assert bessel_k1(1.0) == pytest.approx(0.6019072302, abs=1e-9)

    def test_large_argument_asymptotics(self):
        series = math.sqrt(math.pi / 20.0) * math.exp(-10.0) * (1.0 + 3.0 / 80.0 - 15.0 / 12800.0)
        assert bessel_k1(10.0) == pytest.approx(series, rel=1e-4)

    def test_against_quadrature_oracle(self):
        for x in np.logspace(-8, np.log10(600.0), 20):
            ref = k1_quadrature_oracle(float(x))
            assert bessel_k1(float(x)) == pytest.approx(ref, rel=1e-8)

    def test_fine_accuracy_sample(self):
        # 1e-9 relative contract over [1e-8, 700], checked against mpmath
        mp.mp.dps = 25
        for x in np.logspace(-8, np.log10(700.0), 50):
            ref = float(mp.besselk(1, mp.mpf(float(x))))
            assert bessel_k1(float(x)) == pytest.approx(ref, rel=1e-9)

    def test_underflow_returns_zero(self):
        assert bessel_k1(760.0) == 0.0

    def test_rejects_nonpositive(self):
        with pytest.raises(InvalidArgumentError):
            bessel_k1(0.0)
        with pytest.raises(InvalidArgumentError):
            bessel_k1(-1.0)
        with pytest.raises(InvalidArgumentError):
            bessel_k1(np.array([1.0, -2.0]))

    def test_vectorized_matches_scalar(self):
        xs = np.array([1e-4, 0.5, 2.0, 7.5, 40.0])
        np.testing.assert_allclose(bessel_k1(xs), [bessel_k1(float(x)) for x in xs], rtol=1e-15)


class TestKernelSpec:
    def test_quasirelativistic_needs_mass(self):
        with pytest.raises(InvalidArgumentError):
            KernelSpec("quasirelativistic", mass=0.0)

    def test_cauchy_mass_normalized_to_zero(self):
        assert KernelSpec("cauchy", mass=3.0).mass == 0.0

    def test_unknown_family(self):
        with pytest.raises(InvalidArgumentError):
            KernelSpec("gaussian")


class TestLevyDensity:
    def test_cauchy_at_one(self):
        assert levy_density(KernelSpec("cauchy"), 1.0) == pytest.approx(1.0 / math.pi, rel=1e-15)

    def test_tiny_mass_reproduces_cauchy(self):
        spec = KernelSpec("quasirelativistic", mass=1e-6)
        assert levy_density(spec, 1.0) == pytest.approx(1.0 / math.pi, rel=1e-5)

    def test_mass_one_tail_is_negligible(self):
        spec = KernelSpec("quasirelativistic", mass=1.0)
        # the exponential tail crosses 1e-21 near z ~ 42; at the z = 50
        # truncation radius it is comfortably below
        assert levy_density(spec, 45.0) < 1e-21
        assert levy_density(spec, 50.0) < 1e-21
        assert levy_density(spec, 20.0) < 1e-11

    def test_singular_point(self):
        with pytest.raises(SingularPointError):
            levy_density(KernelSpec("cauchy"), 0.0)

    @pytest.mark.parametrize("family,mass", [("cauchy", 0.0), ("quasirelativistic", 0.7)])
    def test_symmetry_and_positivity(self, family, mass):
        spec = KernelSpec(family, mass=mass)
        for z in (1e-3, 0.1, 1.0, 7.0):
            plus = levy_density(spec, z)
            minus = levy_density(spec, -z)
            assert plus == minus
            assert plus > 0.0

    def test_mass_ordering(self):
        # K1 decays in its argument: nu_m1 > nu_m2 pointwise for m1 < m2
        zs = np.array([0.01, 0.1, 1.0, 5.0])
        lighter = levy_density(KernelSpec("quasirelativistic", 0.5), zs)
        heavier = levy_density(KernelSpec("quasirelativistic", 2.0), zs)
        assert np.all(lighter > heavier)
        cauchy = levy_density(KernelSpec("cauchy"), zs)
        assert np.all(cauchy > lighter)

    def test_small_z_universality(self):
        # z^2 nu(z) -> 1/pi for every mass
        for mass in (0.0, 0.5, 1.0, 5.0):
            spec = KernelSpec("cauchy") if mass == 0.0 else KernelSpec("quasirelativistic", mass)
            z = 1e-6
            assert z * z * levy_density(spec, z) == pytest.approx(1.0 / math.pi, rel=1e-4)


class TestTabulateKernel:
    def test_cauchy_truncates_at_box_and_tail_mass(self):
        grid = make_grid(50.0, 0.001)
        table = tabulate_kernel(KernelSpec("cauchy"), grid)
        # the jump integral never reaches past the declared box
        assert table.truncation_radius == pytest.approx(50.0, rel=1e-12)
        assert table.tail_mass == pytest.approx(1.0 / (50.0 * math.pi), rel=1e-12)
        assert table.weights.size == grid.half

    def test_weights_sampled_at_cell_centers(self):
        grid = make_grid(5.0, 0.01)
        spec = KernelSpec("quasirelativistic", mass=2.0)
        table = tabulate_kernel(spec, grid)
        j = 17
        assert table.weights[j - 1] == pytest.approx(levy_density(spec, j * grid.dx) * grid.dx, rel=1e-14)

    def test_weights_non_increasing(self):
        grid = make_grid(5.0, 0.01)
        for spec in (KernelSpec("cauchy"), KernelSpec("quasirelativistic", 1.0)):
            w = tabulate_kernel(spec, grid).weights
            assert np.all(np.diff(w) <= 0.0)
            assert np.all(w >= 0.0)

    def test_cauchy_singular_coefficient(self):
        grid = make_grid(50.0, 0.001)
        table = tabulate_kernel(KernelSpec("cauchy"), grid)
        assert table.singular_coeff == pytest.approx(grid.dx / (2.0 * math.pi), rel=1e-12)

    def test_quasirelativistic_singular_coefficient(self):
        # c0 = int_0^{dx/2} z^2 nu_m(z) dz against high-precision quadrature
        grid = make_grid(5.0, 0.01)
        mass = 3.0
        table = tabulate_kernel(KernelSpec("quasirelativistic", mass), grid)
        mp.mp.dps = 30
        ref = mp.quad(
            lambda z: z * z * (mass / mp.pi) * mp.besselk(1, mass * z) / z,
            [0, grid.dx / 2.0],
        )
        assert table.singular_coeff == pytest.approx(float(ref), rel=1e-10)

    def test_massive_kernel_truncated_early(self):
        # m = 1 on a = 50: the cutoff lands where nu < 1e-16 * nu(dx), near z ~ 19
        grid = make_grid(50.0, 0.001)
        spec = KernelSpec("quasirelativistic", mass=1.0)
        table = tabulate_kernel(spec, grid)
        assert table.truncation_radius < 20.0
        assert levy_density(spec, table.truncation_radius) < 1e-16 * levy_density(spec, grid.dx)
        # truncating at z = 50 would leave density below 1e-21 outside
        assert levy_density(spec, 50.0) < 1e-21
        assert table.tail_mass < 1e-12

    def test_csv_round_trip(self, tmp_path):
        grid = make_grid(3.0, 0.05)
        table = tabulate_kernel(KernelSpec("quasirelativistic", mass=1.5), grid)
        path = tmp_path / "kernel.csv"
        dump_kernel_csv(table, path)
        z, w = load_kernel_csv(path)
        np.testing.assert_array_equal(w, table.weights)
        np.testing.assert_allclose(z, np.arange(1, table.weights.size + 1) * grid.dx, rtol=1e-15)
