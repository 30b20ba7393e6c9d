"""Closed-form results used as references: constant-coefficient ratios,
Hermite polynomials in their 1F1 form, Gol'dman-Krivchenkov wavefunctions,
exact spectra, and the general-solution quadrature

    y(x) = exp(-int alpha) [C2 + C1 int exp(int (lambda_0 + 2 alpha))].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import cumulative_simpson

from aimsolve.problems import ProblemSpec


class ConvergenceError(ArithmeticError):
    pass


class ReconstructionError(ValueError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


@dataclass
class ReconstructionResult:
    xs: np.ndarray
    y_vals: np.ndarray
    psi_vals: np.ndarray
    constants: tuple[float, float]


def constant_coeff_alpha(lambda0: float, s0: float) -> tuple[float, float]:
    """Roots of r**2 + lambda0 r - s0 = 0, larger first.

    With r the limiting s_n/lambda_n, exp(-r x) solves y'' = lambda0 y' + s0 y.
    """
    disc = lambda0 * lambda0 + 4 * s0
    if disc < 0:
        raise ValueError(f"complex ratio roots (discriminant {disc})")
    sq = math.sqrt(disc)
    return (-lambda0 + sq) / 2, (-lambda0 - sq) / 2


def pochhammer(a, n: int):
    """Rising factorial (a)_n by direct product; exact for int/Fraction a."""
    out = 1
    for i in range(n):
        out = out * (a + i)
    return out


def _nonpos_int(v) -> bool:
    return float(v).is_integer() and v <= 0


def kummer_1f1(a, b, z, tol: float = 1e-14, max_terms: int = 500):
    """Confluent hypergeometric 1F1(a; b; z); z may be an array."""
    if _nonpos_int(b):
        raise ValueError(f"1F1 undefined for b={b}")
    z = np.asarray(z, dtype=float)
    term = np.ones_like(z)
    total = np.ones_like(z)
    if _nonpos_int(a):
        for j in range(int(-a)):
            term = term * (a + j) / ((b + j) * (j + 1)) * z
            total = total + term
        return total[()] if total.ndim == 0 else total
    for j in range(max_terms):
        term = term * (a + j) / ((b + j) * (j + 1)) * z
        total = total + term
        if np.all(np.abs(term) <= tol * np.abs(total)):
            return total[()] if total.ndim == 0 else total
    raise ConvergenceError(f"1F1({a}; {b}; z) did not converge in {max_terms} terms")


def hermite_coeffs(k: int) -> list[Fraction]:
    """Exact power-basis coefficients of the Hermite-equation solution f_k.

    Normalized as f_0 = 1, f_1 = x, f_2 = 2x^2 - 1, f_3 = 2x^3 - 3x, ...,
    i.e. (-1)^j 2^j (b)_j x^s 1F1(-j; b; x^2) with k = 2j + s, b = s + 1/2.
    """
    j, s = divmod(k, 2)
    b = Fraction(1, 2) + s
    pref = (-1) ** j * 2**j * pochhammer(b, j)
    out = [Fraction(0)] * (k + 1)
    term = Fraction(1)
    for i in range(j + 1):
        out[2 * i + s] = pref * term
        term = term * (-j + i) / ((b + i) * (i + 1))
    return out


def hermite_f(k: int, x):
    """f_k(x) through the 1F1 representation."""
    if k < 0:
        raise ValueError("k must be >= 0")
    j, s = divmod(k, 2)
    b = 0.5 + s
    x = np.asarray(x, dtype=float)
    val = (-1) ** j * 2.0**j * pochhammer(b, j) * x**s * kummer_1f1(-j, b, x * x)
    return val[()] if np.ndim(val) == 0 else val


def gk_norm(n: int, gamma: float) -> float:
    b = gamma + 1.5
    log_n2 = math.log(2.0) + math.lgamma(b + n) - math.lgamma(n + 1) - 2 * math.lgamma(b)
    return math.exp(0.5 * log_n2)


def gk_wavefunction(n: int, gamma: float, r):
    """Normalized eigenfunction n of -d2/dr2 + r^2 + gamma(gamma+1)/r^2."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if gamma <= -1.5:
        raise ValueError("gamma must exceed -3/2")
    r = np.asarray(r, dtype=float)
    b = gamma + 1.5
    val = (-1) ** n * gk_norm(n, gamma) * r ** (gamma + 1) * np.exp(-r * r / 2) * kummer_1f1(-n, b, r * r)
    return val[()] if np.ndim(val) == 0 else val


def exact_energy(p: ProblemSpec, n: int) -> float | None:
    """Closed-form E_n where one exists, else None."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if p.kind == "harmonic1d" or (p.kind == "quartic" and p.A == 0):
        return 2.0 * n + 1.0
    if p.kind == "goldman_krivchenkov" or (p.kind == "spiked" and p.A == 0):
        return 4.0 * n + 2.0 * p.gamma + 3.0
    return None


def reconstruct_solution(lambda0, alpha, grid, C1: float, C2: float, envelope=None) -> ReconstructionResult:
    """Sample the general solution from sampled alpha = s_n/lambda_n.

    ``lambda0`` and ``envelope`` may be callables or arrays on ``grid``.
    Integrals run from grid[0] by cumulative composite Simpson.
    """
    xs = np.asarray(grid, dtype=float)
    if xs.ndim != 1 or xs.size < 3 or np.any(np.diff(xs) <= 0):
        raise ValueError("grid must be strictly increasing with at least 3 points")
    a = np.asarray(alpha, dtype=float)
    bad = np.flatnonzero(~np.isfinite(a))
    if bad.size:
        i = int(bad[0])
        raise ReconstructionError(f"alpha is not finite at grid point x={xs[i]!r}", i)
    lam = lambda0(xs) if callable(lambda0) else np.asarray(lambda0, dtype=float)
    lam = np.broadcast_to(lam, xs.shape)

    int_alpha = cumulative_simpson(a, x=xs, initial=0.0)
    inner = cumulative_simpson(lam + 2 * a, x=xs, initial=0.0)
    outer = cumulative_simpson(np.exp(inner), x=xs, initial=0.0)
    y = np.exp(-int_alpha) * (C2 + C1 * outer)
    if envelope is None:
        psi = y.copy()
    else:
        env = envelope(xs) if callable(envelope) else np.asarray(envelope, dtype=float)
        psi = env * y
    return ReconstructionResult(xs, y, psi, (C1, C2))
