import numpy as np
import pytest

from levyspec import (
    DegenerateVectorError,
    DomainTooSmallError,
    GridFunction,
    IncompatibleGridsError,
    InvalidArgumentError,
    inner_product,
    make_grid,
    norm,
    normalize,
    trial_basis,
)

from conftest import random_function


class TestMakeGrid:
    def test_paper_resolution_point_count(self):
        assert make_grid(50.0, 0.001).n_points == 100001

    def test_small_grid_points(self):
        g = make_grid(1.0, 0.5)
        assert g.n_points == 5
        np.testing.assert_allclose(g.x, [-1.0, -0.5, 0.0, 0.5, 1.0], atol=1e-15)

    def test_a20_point_count(self):
        assert make_grid(20.0, 0.001).n_points == 40001

    def test_symmetry_and_origin(self):
        g = make_grid(7.3, 0.013)
        assert g.n_points % 2 == 1
        assert g.x[g.half] == 0.0
        np.testing.assert_array_equal(g.x, -g.x[::-1])
        assert abs(g.dx * (g.n_points - 1) - 2 * g.a) <= 1e-12 * g.a
        assert abs(g.x[0] + g.a) <= 1e-12 * g.a

    def test_spacing_adjustment_reported(self):
        g = make_grid(1.0, 0.3)
        assert g.n_points == 7
        assert g.dx == pytest.approx(1.0 / 3.0, rel=1e-15)

    @pytest.mark.parametrize("a,dx", [(-1.0, 0.1), (0.0, 0.1), (1.0, -0.1), (1.0, 0.0)])
    def test_rejects_nonpositive(self, a, dx):
        with pytest.raises(InvalidArgumentError):
            make_grid(a, dx)

    def test_rejects_huge_ratio(self):
        with pytest.raises(InvalidArgumentError):
            make_grid(1e12, 1e-9)


class TestGridFunction:
    def test_rejects_wrong_length(self, small_grid):
        with pytest.raises(InvalidArgumentError):
            GridFunction(small_grid, np.zeros(small_grid.n_points - 1))

    def test_rejects_nonfinite(self, small_grid):
        vals = np.zeros(small_grid.n_points)
        vals[3] = np.nan
        with pytest.raises(InvalidArgumentError):
            GridFunction(small_grid, vals)

    def test_values_are_immutable(self, small_grid):
        f = GridFunction(small_grid, np.zeros(small_grid.n_points))
        with pytest.raises(ValueError):
            f.values[0] = 1.0


class TestInnerProduct:
    def test_constant_rectangle_rule(self):
        # every node carries weight dx, endpoints included: n_points * dx = 2a + dx
        g = make_grid(1.0, 0.5)
        one = GridFunction(g, np.ones(g.n_points))
        assert inner_product(one, one) == pytest.approx(2 * g.a + g.dx, rel=1e-14)

    def test_odd_times_even_vanishes(self):
        g = make_grid(3.0, 0.01)
        odd = GridFunction(g, g.x**3)
        even = GridFunction(g, np.cosh(g.x))
        assert abs(inner_product(odd, even)) <= 1e-14 * norm(odd) * norm(even)

    def test_box_mode_square_integral(self):
        # integral of cos^2(pi x/2) over [-1, 1] is exactly 1
        g = make_grid(2.0, 0.001)
        vals = np.where(np.abs(g.x) < 1.0, np.cos(np.pi * g.x / 2.0), 0.0)
        f = GridFunction(g, vals)
        assert inner_product(f, f) == pytest.approx(1.0, abs=1e-5)

    def test_grid_mismatch(self):
        f = GridFunction(make_grid(1.0, 0.5), np.ones(5))
        g = GridFunction(make_grid(1.0, 0.25), np.ones(9))
        with pytest.raises(IncompatibleGridsError):
            inner_product(f, g)

    def test_symmetric_bilinear_positive(self, small_grid, rng):
        f = random_function(small_grid, rng)
        g = random_function(small_grid, rng)
        h = random_function(small_grid, rng)
        assert inner_product(f, g) == pytest.approx(inner_product(g, f), rel=1e-12)
        lhs = inner_product(GridFunction(small_grid, 2.0 * f.values + 3.0 * g.values), h)
        rhs = 2.0 * inner_product(f, h) + 3.0 * inner_product(g, h)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
        assert inner_product(f, f) > 0.0
        zero = GridFunction(small_grid, np.zeros(small_grid.n_points))
        assert inner_product(zero, zero) == 0.0


class TestNormalize:
    def test_scaling_recovers_unit_vector(self, small_grid, rng):
        f = normalize(random_function(small_grid, rng))
        doubled = GridFunction(small_grid, 2.0 * f.values)
        np.testing.assert_allclose(normalize(doubled).values, f.values, atol=1e-14)

    def test_unit_norm(self, small_grid, rng):
        f = normalize(random_function(small_grid, rng))
        assert norm(f) == pytest.approx(1.0, abs=1e-12)

    def test_zero_vector_rejected(self, small_grid):
        with pytest.raises(DegenerateVectorError):
            normalize(GridFunction(small_grid, np.zeros(small_grid.n_points)))

    def test_idempotent(self, small_grid, rng):
        f = normalize(random_function(small_grid, rng))
        np.testing.assert_allclose(normalize(f).values, f.values, atol=1e-12)


class TestTrialBasis:
    def test_first_mode_is_cosine(self):
        g = make_grid(2.0, 0.001)
        basis = trial_basis(1, g)
        f = basis[0]
        assert f.values[g.half] == pytest.approx(1.0, rel=1e-3)
        outside = np.abs(g.x) >= 1.0
        assert np.all(f.values[outside] == 0.0)

    def test_second_mode_is_odd_sine(self):
        g = make_grid(2.0, 0.001)
        f = trial_basis(2, g)[1]
        assert f.values[g.half] == 0.0
        np.testing.assert_allclose(f.values, -f.values[::-1], atol=1e-13)

    def test_mode_orthogonality(self):
        g = make_grid(2.0, 0.001)
        basis = trial_basis(5, g)
        for i in range(5):
            assert norm(basis[i]) == pytest.approx(1.0, abs=1e-12)
            for j in range(i):
                assert abs(inner_product(basis[i], basis[j])) <= 1e-6

    def test_parity_by_label(self):
        # odd label -> even function, even label -> odd function
        g = make_grid(1.5, 0.01)
        for i, f in enumerate(trial_basis(4, g), start=1):
            sign = 1.0 if i % 2 else -1.0
            np.testing.assert_allclose(f.values, sign * f.values[::-1], atol=1e-13)

    def test_domain_too_small(self):
        with pytest.raises(DomainTooSmallError):
            trial_basis(2, make_grid(0.5, 0.01))

    def test_bad_count(self, small_grid):
        with pytest.raises(InvalidArgumentError):
            trial_basis(0, small_grid)
