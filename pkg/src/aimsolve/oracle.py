"""Independent eigenvalue reference by direct discretization.

-psi'' + V psi is replaced by the 3-point stencil on a uniform grid, the
resulting symmetric tridiagonal matrix is diagonalized by Sturm-sequence
bisection, and two grid levels are Richardson-extrapolated.  Nothing here
touches the jet/AIM code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

BOUNDARIES = ("dirichlet_both", "even_at_zero", "odd_at_zero")

# absolute eigenvalue tolerance for bisection; the default (eps * ||T||) is
# far too loose once a singular V puts 1e10-sized entries on the diagonal
BISECTION_TOL = 1e-13


@dataclass(frozen=True)
class GridEigenProblem:
    r_max: float
    m: int
    potential: Callable
    boundary: str = "dirichlet_both"
    x_min: float = 0.0

    def __post_init__(self):
        if self.m < 100:
            raise ValueError("need at least 100 grid points")
        if self.r_max <= self.x_min:
            raise ValueError("r_max must exceed x_min")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"unknown boundary {self.boundary!r}")
        if self.boundary != "dirichlet_both" and self.x_min != 0.0:
            raise ValueError("parity boundaries need x_min = 0")

    def with_points(self, m: int) -> "GridEigenProblem":
        return GridEigenProblem(self.r_max, m, self.potential, self.boundary, self.x_min)


def tridiagonal(gp: GridEigenProblem):
    """Diagonal, off-diagonal, grid and spacing of the discretized operator."""
    L = gp.r_max - gp.x_min
    if gp.boundary == "even_at_zero":
        # cell-centred grid; the ghost value psi(-h/2) = psi(h/2) gives psi'(0)=0
        h = L / (gp.m + 0.5)
        x = h * (np.arange(1, gp.m + 1) - 0.5)
    else:
        h = L / (gp.m + 1)
        x = gp.x_min + h * np.arange(1, gp.m + 1)
    d = 2.0 / h**2 + np.asarray(gp.potential(x), dtype=float)
    if gp.boundary == "even_at_zero":
        d[0] -= 1.0 / h**2
    e = np.full(gp.m - 1, -1.0 / h**2)
    if not np.all(np.isfinite(d)):
        raise ValueError("potential is not finite on the interior grid")
    return d, e, x, h


def sturm_count(d: np.ndarray, e: np.ndarray, shift) -> np.ndarray:
    """Number of eigenvalues of T below each shift (vectorized over shifts)."""
    shift = np.atleast_1d(np.asarray(shift, dtype=float))
    tiny = np.finfo(float).tiny
    count = np.zeros(shift.shape, dtype=int)
    q = d[0] - shift
    q = np.where(q == 0, -tiny, q)
    count += q < 0
    e2 = e * e
    for i in range(1, d.size):
        q = d[i] - shift - e2[i - 1] / q
        q = np.where(q == 0, -tiny, q)
        count += q < 0
    return count


def grid_eigenvalues(gp: GridEigenProblem, count: int) -> tuple[np.ndarray, float]:
    if count > gp.m:
        raise ValueError(f"requested {count} eigenvalues from a {gp.m}-point grid")
    d, e, _, h = tridiagonal(gp)
    vals = eigvalsh_tridiagonal(
        d, e, select="i", select_range=(0, count - 1), lapack_driver="stebz", tol=BISECTION_TOL
    )
    return np.sort(vals), h


def fd_eigenvalues(gp: GridEigenProblem, count: int, extrapolate: bool = True) -> list[float]:
    """Lowest ``count`` eigenvalues; Richardson across m and 2m points."""
    e1, h1 = grid_eigenvalues(gp, count)
    if not extrapolate:
        return [float(v) for v in e1]
    e2, h2 = grid_eigenvalues(gp.with_points(2 * gp.m), count)
    ratio = (h1 / h2) ** 2
    return [float(v) for v in e2 + (e2 - e1) / (ratio - 1.0)]


def _symmetric(problem) -> bool:
    if problem.kind in ("harmonic1d", "quartic"):
        return True
    if problem.kind == "custom":
        return all(float(b).is_integer() and int(b) % 2 == 0 for b in problem.potential.exponents)
    return False


def fd_spectrum(problem, count: int, r_max: float = 12.0, m: int = 2000) -> list[float]:
    """Oracle spectrum for a catalog problem.

    Half-line problems use Dirichlet at both ends; symmetric full-line
    problems are split into even and odd parity on the half line.
    """
    V = problem.potential_fn()
    if V is None:
        raise ValueError(f"{problem.kind} has no potential")
    if problem.half_line:
        return fd_eigenvalues(GridEigenProblem(r_max, m, V, "dirichlet_both"), count)
    if _symmetric(problem):
        n_even = (count + 1) // 2
        even = fd_eigenvalues(GridEigenProblem(r_max, m, V, "even_at_zero"), n_even)
        odd = fd_eigenvalues(GridEigenProblem(r_max, m, V, "odd_at_zero"), count - n_even) if count > 1 else []
        return sorted(even + odd)[:count]
    return fd_eigenvalues(GridEigenProblem(r_max, 2 * m, V, "dirichlet_both", x_min=-r_max), count)
