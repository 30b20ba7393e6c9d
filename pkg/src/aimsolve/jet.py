"""Truncated Taylor series ("jets") about a fixed expansion point.

A jet of order M about x0 stores c_0..c_M with c_j = f^(j)(x0)/j!.  All
operations are pure and return new jets; operands must share x0 and M.

Coefficients are float64 by default.  Passing ``dtype=object`` keeps plain
Python numbers, so integer / ``Fraction`` inputs give exact arithmetic and
``mpmath.mpf`` inputs give extended precision through the same code path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Jet",
    "JetError",
    "JetDomainError",
    "jet_const",
    "jet_variable",
    "jet_add",
    "jet_mul",
    "jet_scale",
    "jet_derive",
    "jet_power",
    "jet_eval",
]


class JetError(ValueError):
    """Operands with mismatched expansion point or truncation order."""


class JetDomainError(ValueError):
    """Expansion point sits on a singularity of the requested function."""


def _is_finite(v) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        # mpmath.mpf and friends
        import mpmath

        return bool(mpmath.isfinite(v))


@dataclass(frozen=True, eq=False)
class Jet:
    x0: float
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs)
        if c.ndim != 1 or c.size == 0:
            raise JetError("coeffs must be a non-empty 1-d sequence")
        if c.dtype != object:
            c = c.astype(np.float64, copy=True)
            if not np.all(np.isfinite(c)):
                raise JetError("non-finite jet coefficient")
        else:
            c = c.copy()
            if not all(_is_finite(v) for v in c):
                raise JetError("non-finite jet coefficient")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return self.coeffs.size - 1

    @property
    def exact(self) -> bool:
        return self.coeffs.dtype == object

    def magnitude(self):
        """Largest coefficient magnitude."""
        if self.exact:
            return max(abs(v) for v in self.coeffs)
        return float(np.max(np.abs(self.coeffs)))

    def __call__(self, x):
        return jet_eval(self, x)

    def __add__(self, other):
        if isinstance(other, Jet):
            return jet_add(self, other)
        c = self.coeffs.copy()
        c[0] = c[0] + other
        return Jet(self.x0, c)

    __radd__ = __add__

    def __neg__(self):
        return jet_scale(self, -1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Jet):
            return jet_mul(self, other)
        return jet_scale(self, other)

    __rmul__ = __mul__

    def __repr__(self):
        return f"Jet(x0={self.x0!r}, order={self.order}, coeffs={list(self.coeffs)!r})"


def _check_pair(a: Jet, b: Jet) -> None:
    if a.x0 != b.x0:
        raise JetError(f"expansion points differ: {a.x0!r} vs {b.x0!r}")
    if a.order != b.order:
        raise JetError(f"truncation orders differ: {a.order} vs {b.order}")


def _zeros(M: int, dtype):
    if dtype == object:
        return np.array([0] * (M + 1), dtype=object)
    return np.zeros(M + 1)


def jet_const(v, x0, M: int, dtype=np.float64) -> Jet:
    if M < 0:
        raise JetError("order must be non-negative")
    c = _zeros(M, dtype)
    c[0] = v
    return Jet(x0, c)


def jet_variable(x0, M: int, dtype=np.float64) -> Jet:
    """Jet of the identity function x about x0."""
    c = _zeros(M, dtype)
    c[0] = x0
    if M >= 1:
        c[1] = 1
    return Jet(x0, c)


def jet_add(a: Jet, b: Jet) -> Jet:
    _check_pair(a, b)
    return Jet(a.x0, a.coeffs + b.coeffs)


def jet_scale(a: Jet, c) -> Jet:
    return Jet(a.x0, a.coeffs * c)


def jet_mul(a: Jet, b: Jet) -> Jet:
    _check_pair(a, b)
    n = a.coeffs.size
    if a.exact or b.exact:
        ca, cb = a.coeffs, b.coeffs
        out = np.array(
            [sum(ca[i] * cb[j - i] for i in range(j + 1)) for j in range(n)],
            dtype=object,
        )
        return Jet(a.x0, out)
    return Jet(a.x0, np.convolve(a.coeffs, b.coeffs)[:n])


def jet_derive(a: Jet) -> Jet:
    """Derivative, padded back to order M with a trailing zero."""
    c = a.coeffs
    out = _zeros(a.order, c.dtype)
    if a.order >= 1:
        out[:-1] = c[1:] * np.arange(1, c.size, dtype=object if a.exact else np.float64)
    return Jet(a.x0, out)


def _is_nonneg_int(beta) -> bool:
    return float(beta).is_integer() and beta >= 0


def jet_power(beta, coefficient, x0, M: int, dtype=np.float64) -> Jet:
    """Jet of ``coefficient * x**beta`` about ``x0``.

    Uses the binomial recurrence c_j = c_{j-1} (beta - j + 1) / (j x0).
    Non-negative integer powers are expanded directly so that x0 = 0 is
    allowed for them.
    """
    if M < 0:
        raise JetError("order must be non-negative")
    c = _zeros(M, dtype)
    if _is_nonneg_int(beta):
        p = int(beta)
        for j in range(min(p, M) + 1):
            c[j] = coefficient * math.comb(p, j) * x0 ** (p - j)
        return Jet(x0, c)
    if x0 <= 0:
        raise JetDomainError(
            f"x**{beta} cannot be expanded about x0={x0!r}; need x0 > 0"
        )
    c[0] = coefficient * x0**beta
    for j in range(1, M + 1):
        c[j] = c[j - 1] * (beta - j + 1) / (j * x0)
    return Jet(x0, c)


def jet_eval(a: Jet, x):
    """Horner evaluation of sum c_j (x - x0)^j."""
    h = x - a.x0
    acc = a.coeffs[-1]
    for cj in a.coeffs[-2::-1]:
        acc = acc * h + cj
    return acc
