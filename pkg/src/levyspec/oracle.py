"""Brute-force verifier: dense assembly and an in-house symmetric eigensolver.

The dense matrix is materialized column by column through the same
``apply_hamiltonian`` path the propagator uses, so a comparison against
its eigenvalues isolates iteration and splitting error from shared
discretization error.  Diagonalization is Householder tridiagonalization
followed by implicit-shift QL with eigenvector accumulation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidArgumentError, InvalidMatrixError, MatrixTooLargeError
from .grid import Grid
from .operators import HamiltonianSpec, _potential_array, kinetic_applier

MAX_DENSE_DIM = 5000
_SYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class DenseOperator:
    """Symmetric dense matrix; symmetry is a construction invariant."""

    dimension: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=np.float64)
        if a.shape != (self.dimension, self.dimension):
            raise InvalidArgumentError("entries shape does not match dimension")
        object.__setattr__(self, "entries", a)


def assemble_dense(h_spec: HamiltonianSpec, grid: Grid, backend: str = "auto") -> DenseOperator:
    """Materialize H by applying it to every canonical basis vector."""
    n = grid.n_points
    if n > MAX_DENSE_DIM:
        raise MatrixTooLargeError(f"dense assembly capped at {MAX_DENSE_DIM} points, grid has {n}")
    apply_t = kinetic_applier(h_spec.kinetic, grid, backend)
    a = np.empty((n, n))
    chunk = 256
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        basis = np.zeros((stop - start, n))
        basis[np.arange(stop - start), np.arange(start, stop)] = 1.0
        a[start:stop] = apply_t(basis)
    # rows hold T e_j = column j; T is symmetric so the transpose convention
    # is immaterial, but keep columns = images for clarity
    a = a.T.copy()
    if h_spec.potential.kind != "none":
        a[np.diag_indices(n)] += _potential_array(h_spec.potential, grid)
    return DenseOperator(dimension=n, entries=a)


def _check_symmetry(a: np.ndarray) -> None:
    scale = float(np.abs(a).max()) or 1.0
    skew = float(np.abs(a - a.T).max())
    if skew > _SYMMETRY_TOL * scale:
        raise InvalidMatrixError(f"matrix asymmetry {skew:.3e} exceeds {_SYMMETRY_TOL:.0e} * max|A|")


def _tridiagonalize(a: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Householder reduction A = Q T Q^T; returns (diag, offdiag, Q)."""
    n = a.shape[0]
    t = 0.5 * (a + a.T)  # symmetrize roundoff before reduction
    q = np.eye(n)
    for k in range(n - 2):
        x = t[k + 1 :, k]
        xnorm = float(np.linalg.norm(x))
        if xnorm == 0.0:
            continue
        alpha = -np.copysign(xnorm, x[0]) if x[0] != 0.0 else -xnorm
        v = x.copy()
        v[0] -= alpha
        vnorm2 = float(v @ v)
        if vnorm2 == 0.0:
            continue
        beta = 2.0 / vnorm2
        block = t[k + 1 :, k + 1 :]
        u = block @ v
        w = beta * u - (0.5 * beta * beta * float(v @ u)) * v
        block -= np.outer(v, w) + np.outer(w, v)
        t[k + 1 :, k] = 0.0
        t[k, k + 1 :] = 0.0
        t[k + 1, k] = alpha
        t[k, k + 1] = alpha
        qblock = q[:, k + 1 :]
        qblock -= np.outer(qblock @ v, beta * v)
    d = np.diag(t).copy()
    e = np.zeros(n)
    if n > 1:
        e[: n - 1] = np.diag(t, 1)
    return d, e, q


def _ql_implicit(d: np.ndarray, e: np.ndarray, q: np.ndarray, max_iter: int = 50) -> None:
    """Implicit-shift QL sweeps on the tridiagonal (d, e), rotations
    accumulated into the columns of q.  In-place; d ends as eigenvalues."""
    n = d.size
    eps = np.finfo(np.float64).eps
    for l in range(n):
        for _iteration in range(max_iter):
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = np.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + np.copysign(r, g))
            s, c = 1.0, 1.0
            p = 0.0
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = np.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                col_i = q[:, i].copy()
                col_i1 = q[:, i + 1].copy()
                q[:, i + 1] = s * col_i + c * col_i1
                q[:, i] = c * col_i - s * col_i1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
        else:
            raise InvalidMatrixError(f"QL iteration did not deflate state {l}")


def dense_eigensolve(a: DenseOperator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Lowest n eigenpairs of a symmetric dense operator, ascending.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns,
    orthonormal in the Euclidean sense.
    """
    dim = a.dimension
    if not (1 <= n <= dim):
        raise InvalidArgumentError(f"need 1 <= n <= {dim}, got {n}")
    _check_symmetry(a.entries)
    d, e, q = _tridiagonalize(a.entries)
    _ql_implicit(d, e, q)
    order = np.argsort(d, kind="stable")[:n]
    return d[order].copy(), q[:, order].copy()
