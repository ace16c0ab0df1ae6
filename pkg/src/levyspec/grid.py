"""Uniform 1D lattice, grid functions and the trigonometric trial basis.

Everything downstream works on a symmetric lattice x_j = (j - half)*dx
covering [-a, a] with an odd number of nodes, so that x = 0 and the well
edges |x| = 1 are lattice points.  Functions are implicitly zero outside
[-a, a]; inner products use the plain rectangle rule with weight dx at
every node, which keeps the discretized jump operators exactly symmetric.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateVectorError,
    DomainTooSmallError,
    IncompatibleGridsError,
    InvalidArgumentError,
)

_MAX_HALF_POINTS = 10**9


@dataclass(frozen=True)
class Grid:
    """Symmetric uniform lattice on [-a, a] with an odd node count.

    ``dx`` is the actual spacing 2a/(n_points-1); when the requested
    spacing does not divide a exactly, :func:`make_grid` adjusts it and
    the adjusted value is what this field reports.
    """

    a: float
    dx: float
    n_points: int

    @property
    def half(self) -> int:
        return (self.n_points - 1) // 2

    @property
    def x(self) -> np.ndarray:
        """Node coordinates; x[half] is exactly 0 and x[-j] == -x[j]."""
        pts = (np.arange(self.n_points) - self.half) * self.dx
        pts.setflags(write=False)
        return pts


def make_grid(a: float, dx: float) -> Grid:
    """Build the symmetric odd-count lattice for half-width a and spacing ~dx.

    Raises InvalidArgumentError for non-positive a or dx, or when a/dx
    exceeds the supported integer range.
    """
    if not (a > 0) or not np.isfinite(a):
        raise InvalidArgumentError(f"half-width a must be positive, got {a}")
    if not (dx > 0) or not np.isfinite(dx):
        raise InvalidArgumentError(f"spacing dx must be positive, got {dx}")
    half = round(a / dx)
    if half < 1:
        raise InvalidArgumentError(f"dx={dx} is larger than the domain half-width a={a}")
    if half > _MAX_HALF_POINTS:
        raise InvalidArgumentError(f"a/dx={a / dx:.3g} exceeds the supported point count")
    return Grid(a=float(a), dx=a / half, n_points=2 * half + 1)


@dataclass(frozen=True)
class GridFunction:
    """Real-valued samples on a :class:`Grid`, zero-extended beyond it."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.shape != (self.grid.n_points,):
            raise InvalidArgumentError(
                f"values have shape {vals.shape}, grid has {self.grid.n_points} points"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidArgumentError("grid function values must be finite")
        vals = vals.copy()
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


def _require_same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise IncompatibleGridsError(
            f"grids differ: (a={f.grid.a}, n={f.grid.n_points}) vs (a={g.grid.a}, n={g.grid.n_points})"
        )


def inner_product(f: GridFunction, g: GridFunction) -> float:
    """Rectangle-rule L2 product sum_j f_j g_j dx (weight dx at every node)."""
    _require_same_grid(f, g)
    return float(f.values @ g.values) * f.grid.dx


def norm(f: GridFunction) -> float:
    return float(np.sqrt(f.values @ f.values * f.grid.dx))


def normalize(f: GridFunction) -> GridFunction:
    """Return f / ||f||; raises DegenerateVectorError when ||f|| vanishes."""
    n = norm(f)
    if n <= 0.0 or not np.isfinite(n):
        raise DegenerateVectorError("cannot normalize a zero vector")
    return GridFunction(f.grid, f.values / n)


def trial_basis(n: int, grid: Grid) -> list[GridFunction]:
    """First n box modes on [-1, 1], zero outside, normalized on the grid.

    Mode i uses label i: odd labels are cos(i*pi*x/2) (even functions),
    even labels sin(i*pi*x/2) (odd functions).  Requires grid.a >= 1 so
    the support fits inside the lattice.
    """
    if n < 1:
        raise InvalidArgumentError(f"state count must be >= 1, got {n}")
    if grid.a < 1.0:
        raise DomainTooSmallError(f"trial basis needs a >= 1, grid has a={grid.a}")
    x = grid.x
    inside = np.abs(x) < 1.0
    basis = []
    for i in range(1, n + 1):
        vals = np.zeros(grid.n_points)
        phase = i * np.pi * x[inside] / 2.0
        vals[inside] = np.cos(phase) if i % 2 else np.sin(phase)
        basis.append(normalize(GridFunction(grid, vals)))
    return basis
