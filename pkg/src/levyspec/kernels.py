"""Jump densities of the nonlocal kinetic operators and their lattice tables.

The massless (Cauchy) operator |nabla| has jump density nu(z) = 1/(pi z^2);
the massive quasirelativistic operator sqrt(-Delta + m^2) - m has

    nu_m(z) = (m/pi) K1(m|z|) / |z|,

with K1 the modified Bessel function of the second kind.  Both densities are
symmetric, positive, and carry a non-integrable 1/z^2 singularity at the
origin which the principal-value pairing removes.

Discretization: weights w_j = nu(j*dx)*dx at lattice offsets j*dx for
j = 1..J, truncated at z_max = min(a, first offset where nu drops below
1e-16 * nu(dx)).  The origin cell |z| < dx/2 is excised; its second-moment
mass c0 = int_0^{dx/2} z^2 nu(z) dz is recorded on the table (it is the
coefficient of the second-difference correction that a pointwise-accurate
application would add, but it is *not* applied by the operators module:
at h = dx = 0.001 it pushes the linearized shift (1 - hT) past its
stability boundary).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, SingularPointError
from .grid import Grid

_EULER_GAMMA = 0.5772156649015328606

# Chebyshev coefficients of e^x sqrt(x) K1(x) in u = 8/x - 2 on x in [2, inf),
# generated by 40-digit quadrature of K1(x) = int_0^inf e^{-x cosh t} cosh t dt
# (worst relative error 3e-20 over [2, 700] before float64 rounding).
_K1_LARGE_CHEB = (
    2.720626190484442669447,
    0.1039237365768172384374,
    -0.0028578168596227793868,
    0.0001952155184713516311077,
    -1.93619797416608296002e-05,
    2.406484947837217117059e-06,
    -3.501960603087812542096e-07,
    5.741084125450049292307e-08,
    -1.034576246567809702666e-08,
    2.015049755197034616148e-09,
    -4.190354759341925584241e-10,
    9.218315187605314125826e-11,
    -2.129967838427791021553e-11,
    5.139639673482343540396e-12,
    -1.289173960949822935196e-12,
    3.348419666052243120094e-13,
    -8.976705182010146069111e-14,
    2.477154424219598681247e-14,
    -7.019837089214768849332e-15,
    2.038703166239860875455e-15,
    -6.057047270643017721228e-16,
    1.838093575243045193973e-16,
    -5.689462849193643067534e-17,
    1.794051047886345071566e-17,
    -5.756744482073019642899e-18,
    1.877865190161668851707e-18,
    -6.22164528733722387049e-19,
    2.09191252694693843405e-19,
    -7.132712907485784743202e-20,
)

_SERIES_TERMS = 20


def _k1_series(x: np.ndarray) -> np.ndarray:
    # ascending series, x <= 2:
    #   K1(x) = 1/x + ln(x/2) I1(x) - (x/4) sum_k [psi(k+1)+psi(k+2)] q^k / (k!(k+1)!)
    # with q = x^2/4; all coefficients exact via recurrences.
    q = x * x / 4.0
    i1_sum = np.zeros_like(x)
    psi_sum = np.zeros_like(x)
    term = np.ones_like(x)  # q^k / (k!(k+1)!)
    psi_a = -_EULER_GAMMA  # psi(k+1)
    psi_b = 1.0 - _EULER_GAMMA  # psi(k+2)
    for k in range(_SERIES_TERMS):
        i1_sum += term
        psi_sum += (psi_a + psi_b) * term
        term = term * q / ((k + 1) * (k + 2))
        psi_a += 1.0 / (k + 1)
        psi_b += 1.0 / (k + 2)
    i1 = (x / 2.0) * i1_sum
    return 1.0 / x + np.log(x / 2.0) * i1 - (x / 4.0) * psi_sum


def _k1_chebyshev(x: np.ndarray) -> np.ndarray:
    # Clenshaw evaluation of the scaled expansion, x > 2.
    t = 8.0 / x - 2.0  # in (-2, 2]
    b0 = np.zeros_like(x)
    b1 = np.zeros_like(x)
    for c in _K1_LARGE_CHEB[:0:-1]:
        b0, b1 = t * b0 - b1 + c, b0
    g = (t / 2.0) * b0 - b1 + _K1_LARGE_CHEB[0] / 2.0
    with np.errstate(under="ignore"):
        return np.exp(-x) * g / np.sqrt(x)


def bessel_k1(x):
    """Modified Bessel function K1 for x > 0 (scalar or array).

    Relative error is at machine level over [1e-8, 700]; for arguments
    large enough that e^{-x} underflows the result is exactly 0.
    """
    arr = np.asarray(x, dtype=np.float64)
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise InvalidArgumentError("bessel_k1 requires finite x > 0")
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    out = np.empty_like(arr)
    small = arr <= 2.0
    if small.any():
        out[small] = _k1_series(arr[small])
    if (~small).any():
        out[~small] = _k1_chebyshev(arr[~small])
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class KernelSpec:
    """Jump-density family: 'cauchy' (massless) or 'quasirelativistic' (m > 0)."""

    family: str
    mass: float = 0.0

    def __post_init__(self):
        if self.family not in ("cauchy", "quasirelativistic"):
            raise InvalidArgumentError(f"unknown kernel family {self.family!r}")
        if self.family == "quasirelativistic":
            if not (self.mass > 0) or not math.isfinite(self.mass):
                raise InvalidArgumentError("quasirelativistic kernel requires mass > 0")
        else:
            object.__setattr__(self, "mass", 0.0)


def levy_density(spec: KernelSpec, z):
    """Jump density nu(z) for z != 0 (scalar or array); symmetric in z."""
    arr = np.asarray(z, dtype=np.float64)
    if np.any(arr == 0.0):
        raise SingularPointError("jump density is singular at z = 0")
    scalar = arr.ndim == 0
    az = np.abs(np.atleast_1d(arr))
    if spec.family == "cauchy":
        out = 1.0 / (np.pi * az * az)
    else:
        m = spec.mass
        out = (m / np.pi) * bessel_k1(m * az) / az
    return float(out[0]) if scalar else out


@dataclass(frozen=True)
class KernelTable:
    """Lattice discretization of a jump density on a given grid.

    weights[j-1] = nu(j*dx)*dx for offsets j = 1..J (one-sided; the density
    is symmetric).  ``singular_coeff`` is the excised origin-cell second
    moment int_0^{dx/2} z^2 nu dz; ``tail_mass`` records (a bound on) the
    one-sided density mass beyond ``truncation_radius``.
    """

    spec: KernelSpec
    grid: Grid
    weights: np.ndarray = field(repr=False)
    singular_coeff: float
    truncation_radius: float
    tail_mass: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        w = w.copy()
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "_plan_cache", {})


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _origin_cell_moment(spec: KernelSpec, dx: float) -> float:
    # int_0^{dx/2} z^2 nu(z) dz: leading 1/(pi z^2) part integrates to dx/(2 pi);
    # the mass-dependent remainder (smooth, O(m^2 z^2 log)) goes to quadrature.
    lead = dx / (2.0 * np.pi)
    if spec.family == "cauchy":
        return lead
    half = dx / 4.0
    zs = half * (_GL_NODES + 1.0)  # (0, dx/2)
    rem = zs * zs * levy_density(spec, zs) - 1.0 / np.pi
    return lead + float(half * (_GL_WEIGHTS @ rem))


def _tail_mass_bound(spec: KernelSpec, z_max: float) -> float:
    # one-sided int_{z_max}^inf nu dz; exact for Cauchy, upper bound otherwise:
    # nu_m < nu_0 gives 1/(pi z_max); for m z_max >= 2 the sharper
    # K0(w)/(pi w) <= sqrt(pi/2w) e^{-w} / (pi w) applies (w = m z_max).
    cauchy_tail = 1.0 / (np.pi * z_max)
    if spec.family == "cauchy":
        return cauchy_tail
    w = spec.mass * z_max
    if w < 2.0:
        return cauchy_tail
    sharp = math.sqrt(math.pi / (2.0 * w)) * math.exp(-w) / (math.pi * w)
    return min(cauchy_tail, sharp)


_NEGLIGIBLE_RATIO = 1e-16


def tabulate_kernel(spec: KernelSpec, grid: Grid) -> KernelTable:
    """Sample the density at lattice offsets and record the regularization data.

    The truncation radius is min(a, first offset where nu < 1e-16 * nu(dx)):
    the jump integral never reaches past the declared box [-a, a], and
    exponentially decaying massive kernels are cut where they stop mattering.
    """
    dx = grid.dx
    j_max = grid.half
    z = np.arange(1, j_max + 1) * dx
    nu = levy_density(spec, z)
    threshold = _NEGLIGIBLE_RATIO * levy_density(spec, dx)
    below = nu < threshold
    j_cut = int(np.argmax(below)) if below.any() else j_max
    j_cut = max(j_cut, 1)
    weights = nu[:j_cut] * dx
    z_max = j_cut * dx
    return KernelTable(
        spec=spec,
        grid=grid,
        weights=weights,
        singular_coeff=_origin_cell_moment(spec, dx),
        truncation_radius=z_max,
        tail_mass=_tail_mass_bound(spec, z_max),
    )


def dump_kernel_csv(table: KernelTable, path) -> None:
    """Write the (offset, weight) table as CSV with header ``z,weight``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["z", "weight"])
        dx = table.grid.dx
        for j, w in enumerate(table.weights, start=1):
            writer.writerow([repr(j * dx), repr(float(w))])


def load_kernel_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read a table written by :func:`dump_kernel_csv`; returns (z, weight)."""
    zs, ws = [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:2] != ["z", "weight"]:
            raise InvalidArgumentError(f"unexpected kernel CSV header {header!r}")
        for row in reader:
            zs.append(float(row[0]))
            ws.append(float(row[1]))
    return np.asarray(zs), np.asarray(ws)
