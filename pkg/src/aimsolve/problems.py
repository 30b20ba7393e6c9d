"""Schrodinger-type problems in AIM base form.

Each problem -psi'' + V psi = E psi is factored as psi = f(x) y(x) with
f = x**p * exp(-x**2/2); y then satisfies y'' = lambda_0 y' + s_0 y where
lambda_0 = 2x - 2p/x and s_0 = V - E - f''/f.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from aimsolve.jet import Jet, JetDomainError, jet_const, jet_power, jet_variable

KINDS = ("hermite", "harmonic1d", "goldman_krivchenkov", "spiked", "quartic", "custom")


class ProblemError(ValueError):
    pass


class PotentialSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


def _fmt(v: float) -> str:
    v = float(v)
    if v.is_integer() and abs(v) < 1e16:
        return str(int(v))
    return repr(v)


@dataclass(frozen=True)
class PotentialExpression:
    """V(x) = sum of c * x**beta, terms sorted by exponent."""

    terms: tuple[tuple[float, float], ...] = ()

    @classmethod
    def from_terms(cls, terms) -> "PotentialExpression":
        merged: dict[float, float] = {}
        for c, b in terms:
            merged[float(b)] = merged.get(float(b), 0.0) + float(c)
        return cls(tuple((c, b) for b, c in sorted(merged.items()) if c != 0.0))

    def coefficient(self, exponent: float) -> float:
        for c, b in self.terms:
            if b == exponent:
                return c
        return 0.0

    @property
    def exponents(self) -> tuple[float, ...]:
        return tuple(b for _, b in self.terms)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for c, b in self.terms:
            out = out + c * x**b
        return out

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for i, (c, b) in enumerate(self.terms):
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if b == 0:
                body = _fmt(mag)
            else:
                xb = "x" if b == 1 else f"x^{_fmt(b)}"
                body = xb if mag == 1 else f"{_fmt(mag)}*{xb}"
            if i == 0:
                parts.append(("-" if sign == "-" else "") + body)
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)


_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def _ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _number(self) -> float | None:
        self._ws()
        m = _NUMBER.match(self.text, self.pos)
        if not m:
            return None
        self.pos = m.end()
        return float(m.group())

    def _signed_number(self) -> float:
        sign = 1.0
        c = self._peek()
        if c and c in "+-":
            sign = -1.0 if c == "-" else 1.0
            self.pos += 1
        v = self._number()
        if v is None:
            raise PotentialSyntaxError("expected exponent", self.pos)
        return sign * v

    def _term(self, sign: float) -> tuple[float, float]:
        coef = self._number()
        if coef is not None:
            nxt = self._peek()
            if nxt == "*":
                self.pos += 1
                if self._peek() != "x":
                    raise PotentialSyntaxError("expected 'x'", self.pos)
            elif nxt in ("", "+", "-"):
                return sign * coef, 0.0
            else:
                raise PotentialSyntaxError("expected '*' or operator", self.pos)
        else:
            coef = 1.0
            if self._peek() != "x":
                raise PotentialSyntaxError("expected number or 'x'", self.pos)
        self.pos += 1  # consume x
        exponent = 1.0
        if self._peek() == "^":
            self.pos += 1
            exponent = self._signed_number()
        return sign * coef, exponent

    def parse(self) -> PotentialExpression:
        terms = []
        sign = 1.0
        if self._peek() == "-":
            sign = -1.0
            self.pos += 1
        elif self._peek() == "+":
            self.pos += 1
        terms.append(self._term(sign))
        while True:
            c = self._peek()
            if c == "":
                break
            if c not in "+-":
                raise PotentialSyntaxError("expected '+' or '-'", self.pos)
            self.pos += 1
            terms.append(self._term(-1.0 if c == "-" else 1.0))
        return PotentialExpression.from_terms(terms)


def parse_potential(text: str) -> PotentialExpression:
    """Parse ``"x^2 + 0.1*x^4"``-style sums of power terms."""
    return _Parser(text).parse()


def gamma_from_lN(l: int, N: int) -> float:
    if N < 2:
        raise ProblemError("dimension N must be >= 2")
    if l < 0:
        raise ProblemError("angular momentum l must be >= 0")
    return l + (N - 3) / 2


def gamma_from_centrifugal(c: float) -> float:
    """Root gamma >= -1/2 of gamma (gamma + 1) = c."""
    disc = 1.0 + 4.0 * c
    if disc < 0:
        raise ProblemError(f"gamma(gamma+1) = {c} has no real root")
    return (-1.0 + math.sqrt(disc)) / 2.0


@dataclass(frozen=True)
class ProblemSpec:
    kind: str
    gamma: float = 0.0
    A: float = 0.0
    alpha_exp: float = 2.0
    k: int = 0
    N_dim: int | None = None
    l: int | None = None
    potential: PotentialExpression | None = field(default=None, compare=True)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ProblemError(f"unknown problem kind {self.kind!r}")
        if (self.N_dim is None) != (self.l is None):
            raise ProblemError("N and l must be given together")
        if self.N_dim is not None:
            object.__setattr__(self, "gamma", gamma_from_lN(self.l, self.N_dim))
        if self.gamma < -1:
            raise ProblemError("gamma must be >= -1")
        if self.A < 0:
            raise ProblemError("coupling A must be >= 0")
        if self.alpha_exp <= 0:
            raise ProblemError("alpha_exp must be > 0")
        if self.k < 0 or int(self.k) != self.k:
            raise ProblemError("Hermite order k must be a non-negative integer")
        if self.kind == "custom" and self.potential is None:
            raise ProblemError("custom problems need a potential expression")

    # constructors -----------------------------------------------------------
    @classmethod
    def hermite(cls, k: int) -> "ProblemSpec":
        return cls("hermite", k=k)

    @classmethod
    def harmonic1d(cls) -> "ProblemSpec":
        return cls("harmonic1d")

    @classmethod
    def goldman_krivchenkov(cls, gamma: float = 0.0, N: int | None = None, l: int | None = None):
        return cls("goldman_krivchenkov", gamma=gamma, N_dim=N, l=l)

    @classmethod
    def spiked(cls, gamma: float = 0.0, A: float = 0.0, alpha_exp: float = 2.0,
               N: int | None = None, l: int | None = None):
        return cls("spiked", gamma=gamma, A=A, alpha_exp=alpha_exp, N_dim=N, l=l)

    @classmethod
    def quartic(cls, A: float) -> "ProblemSpec":
        return cls("quartic", A=A)

    @classmethod
    def custom(cls, potential) -> "ProblemSpec":
        if isinstance(potential, str):
            potential = parse_potential(potential)
        return cls("custom", potential=potential)

    # descriptors ------------------------------------------------------------
    @property
    def is_eigenproblem(self) -> bool:
        return self.kind != "hermite"

    @property
    def centrifugal(self) -> float:
        return self.gamma * (self.gamma + 1)

    @property
    def half_line(self) -> bool:
        """True when the problem lives on (0, inf) with psi(0) = 0."""
        if self.kind in ("goldman_krivchenkov", "spiked"):
            return True
        if self.kind == "custom":
            return any(b < 0 or not float(b).is_integer() for b in self.potential.exponents)
        return False

    def potential_fn(self):
        """V(x) as a vectorized callable (None for the Hermite equation)."""
        if self.kind == "hermite":
            return None
        if self.kind == "harmonic1d":
            return lambda x: np.asarray(x, dtype=float) ** 2
        if self.kind == "quartic":
            A = self.A
            return lambda x: np.asarray(x, dtype=float) ** 2 + A * np.asarray(x, dtype=float) ** 4
        if self.kind == "custom":
            return self.potential
        c, A, a = self.centrifugal, self.A if self.kind == "spiked" else 0.0, self.alpha_exp

        def V(x):
            x = np.asarray(x, dtype=float)
            out = x**2 + c / x**2
            if A:
                out = out + A / x**a
            return out

        return V

    def params(self) -> dict:
        """Parameters relevant to this kind, for logs and CSV."""
        if self.kind == "hermite":
            return {"k": self.k}
        if self.kind == "harmonic1d":
            return {}
        if self.kind == "quartic":
            return {"A": self.A}
        if self.kind == "custom":
            return {"potential": str(self.potential)}
        d = {"gamma": self.gamma}
        if self.N_dim is not None:
            d.update(N=self.N_dim, l=self.l)
        if self.kind == "spiked":
            d.update(A=self.A, alpha_exp=self.alpha_exp)
        return d


def classify_potential(expr: PotentialExpression) -> ProblemSpec:
    """Map a parsed potential onto the catalog when it has a known form."""
    terms = {b: c for c, b in expr.terms}
    if terms.get(2.0) != 1.0:
        return ProblemSpec.custom(expr)
    rest = {b: c for b, c in terms.items() if b != 2.0}
    if not rest:
        return ProblemSpec.harmonic1d()
    if set(rest) == {4.0} and rest[4.0] > 0:
        return ProblemSpec.quartic(rest[4.0])
    if all(b < 0 for b in rest) and all(c > 0 for b, c in rest.items() if b != -2.0):
        cent = rest.pop(-2.0, 0.0)
        try:
            gamma = gamma_from_centrifugal(cent)
        except ProblemError:
            return ProblemSpec.custom(expr)
        if not rest:
            return ProblemSpec.goldman_krivchenkov(gamma)
        if len(rest) == 1:
            (b, A), = rest.items()
            return ProblemSpec.spiked(gamma, A, -b)
    return ProblemSpec.custom(expr)


def asymptotic_factor(p: ProblemSpec) -> tuple[float, bool]:
    """(power exponent, gaussian?) of the envelope x**pe * exp(-x**2/2)."""
    if p.kind == "hermite":
        return 0.0, False
    if p.kind == "goldman_krivchenkov":
        return p.gamma + 1.0, True
    return 0.0, True


def build_coefficients(p: ProblemSpec, E, x0, M: int, dtype=np.float64) -> tuple[Jet, Jet]:
    """Jets of lambda_0 and s_0 about x0 for energy E."""
    x = jet_variable(x0, M, dtype)
    lam0 = x * 2
    if p.kind == "hermite":
        return lam0, jet_const(-2 * p.k, x0, M, dtype)
    if p.kind == "harmonic1d":
        return lam0, jet_const(1 - E, x0, M, dtype)
    if p.kind == "quartic":
        return lam0, jet_const(1 - E, x0, M, dtype) + jet_power(4, p.A, x0, M, dtype)
    if p.kind == "goldman_krivchenkov":
        g = p.gamma
        if g + 1 != 0:
            lam0 = lam0 + jet_power(-1, -2 * (g + 1), x0, M, dtype)
        return lam0, jet_const(2 * g + 3 - E, x0, M, dtype)
    if p.kind == "spiked":
        if x0 <= 0:
            raise JetDomainError(f"spiked problems need x0 > 0, got {x0!r}")
        s0 = jet_const(1 - E, x0, M, dtype)
        if p.A:
            s0 = s0 + jet_power(-p.alpha_exp, p.A, x0, M, dtype)
        if p.centrifugal:
            s0 = s0 + jet_power(-2, p.centrifugal, x0, M, dtype)
        return lam0, s0
    # custom: Gaussian envelope only, s_0 = 1 - E + V(x) - x^2
    bad = [b for b in p.potential.exponents if b < -2]
    if bad:
        raise ProblemError(
            f"term x^{_fmt(bad[0])} is more singular than x^-2; not supported for custom potentials"
        )
    s0 = jet_const(1 - E, x0, M, dtype)
    for c, b in p.potential.terms:
        s0 = s0 + jet_power(b, c, x0, M, dtype)
    s0 = s0 + jet_power(2, -1, x0, M, dtype)
    return lam0, s0
