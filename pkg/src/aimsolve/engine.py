"""The asymptotic iteration recurrence on jets.

Starting from y'' = lambda_0 y' + s_0 y, repeated differentiation gives
y^(n+2) = lambda_n y' + s_n y with

    lambda_n = lambda_{n-1}' + s_{n-1} + lambda_0 lambda_{n-1}
    s_n      = s_{n-1}'      + s_0 lambda_{n-1}

The iteration terminates when s_n/lambda_n = s_{n-1}/lambda_{n-1}, i.e. when

    delta_n = s_n lambda_{n-1} - s_{n-1} lambda_n

vanishes.  For eigenproblems the zeros of delta_n in E are the energies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from aimsolve.jet import Jet, jet_add, jet_derive, jet_eval, jet_mul

RESCALE_HIGH = 1e100
RESCALE_LOW = 1e-100
TERMINATION_TOL = 1e-12
TERMINATION_WINDOW = 3


class IterationOverflow(ArithmeticError):
    """Non-finite coefficients appeared at iteration ``n``."""

    def __init__(self, n: int):
        super().__init__(f"AIM iteration overflowed at n={n}")
        self.n = n


class DegenerateRatioError(ZeroDivisionError):
    """lambda_n vanishes at the evaluation point; move x."""


@dataclass(frozen=True)
class AimState:
    lambda_: Jet
    s: Jet
    n: int = 0
    scale_log: float = 0.0


@dataclass(frozen=True)
class IterationRecord:
    n: int
    delta_at_x0: float
    alpha_at_x0: float
    relative_delta: float


@dataclass
class RunResult:
    records: list[IterationRecord] = field(default_factory=list)
    terminated: bool = False
    terminated_at: int | None = None
    final: AimState | None = None


def _pair_max(a: np.ndarray, b: np.ndarray) -> float:
    return float(max(np.max(np.abs(a)), np.max(np.abs(b))))


def aim_step(state: AimState, lambda0: Jet, s0: Jet) -> AimState:
    """One application of the recurrence, with joint rescaling on overflow risk."""
    lam, s = state.lambda_, state.s
    n = state.n + 1
    if lam.exact or s.exact:
        new_lam = jet_add(jet_add(jet_derive(lam), s), jet_mul(lambda0, lam))
        new_s = jet_add(jet_derive(s), jet_mul(s0, lam))
        return AimState(new_lam, new_s, n, state.scale_log)

    # float fast path; same arithmetic as the Jet operations
    m = lam.coeffs.size
    dl = np.zeros(m)
    dl[:-1] = lam.coeffs[1:] * np.arange(1, m)
    ds = np.zeros(m)
    ds[:-1] = s.coeffs[1:] * np.arange(1, m)
    lam_c = dl + s.coeffs + np.convolve(lambda0.coeffs, lam.coeffs)[:m]
    s_c = ds + np.convolve(s0.coeffs, lam.coeffs)[:m]
    if not (np.all(np.isfinite(lam_c)) and np.all(np.isfinite(s_c))):
        raise IterationOverflow(n)
    scale_log = state.scale_log
    big = _pair_max(lam_c, s_c)
    if big > RESCALE_HIGH or 0.0 < big < RESCALE_LOW:
        lam_c = lam_c / big
        s_c = s_c / big
        scale_log -= math.log(big)
    return AimState(Jet(lam.x0, lam_c), Jet(lam.x0, s_c), n, scale_log)


def delta_jet(prev: AimState, cur: AimState) -> Jet:
    """Full jet of s_n lambda_{n-1} - s_{n-1} lambda_n."""
    if cur.n != prev.n + 1:
        raise ValueError(f"states are not consecutive: n={prev.n}, {cur.n}")
    return jet_add(jet_mul(cur.s, prev.lambda_), jet_mul(prev.s, cur.lambda_) * -1)


def delta(prev: AimState, cur: AimState, x) -> float:
    if cur.n != prev.n + 1:
        raise ValueError(f"states are not consecutive: n={prev.n}, {cur.n}")
    return jet_eval(cur.s, x) * jet_eval(prev.lambda_, x) - jet_eval(prev.s, x) * jet_eval(
        cur.lambda_, x
    )


def delta_scale(prev: AimState, cur: AimState):
    """Magnitude against which delta is judged to be zero."""
    return cur.s.magnitude() * prev.lambda_.magnitude() + prev.s.magnitude() * cur.lambda_.magnitude()


def alpha_ratio(state: AimState, x) -> float:
    lam = jet_eval(state.lambda_, x)
    if abs(lam) < 1e-300:
        raise DegenerateRatioError(f"lambda_{state.n}({x}) vanishes; choose another x")
    return jet_eval(state.s, x) / lam


class AimEngine:
    """Holds lambda_0 and s_0 and produces successive states."""

    def __init__(self, lambda0: Jet, s0: Jet):
        if lambda0.x0 != s0.x0 or lambda0.order != s0.order:
            raise ValueError("lambda0 and s0 must share expansion point and order")
        self.lambda0 = lambda0
        self.s0 = s0

    def initial(self) -> AimState:
        return AimState(self.lambda0, self.s0, 0, 0.0)

    def step(self, state: AimState) -> AimState:
        return aim_step(state, self.lambda0, self.s0)

    def states(self, max_iter: int):
        """Yield states n = 0..max_iter."""
        st = self.initial()
        yield st
        for _ in range(max_iter):
            st = self.step(st)
            yield st

    def delta_sequence(self, max_iter: int, x) -> np.ndarray:
        """delta_n(x) for n = 1..max_iter, each in its own rescaled units."""
        out = []
        prev = None
        for st in self.states(max_iter):
            if prev is not None:
                out.append(delta(prev, st, x))
            prev = st
        return np.array(out, dtype=object if self.lambda0.exact else np.float64)


def run(
    lambda0: Jet,
    s0: Jet,
    max_iter: int,
    x_eval,
    tol: float = TERMINATION_TOL,
    window: int = TERMINATION_WINDOW,
    stop_early: bool = True,
) -> RunResult:
    """Iterate up to ``max_iter`` times, recording delta_n and alpha_n at ``x_eval``.

    The run is flagged terminated once |delta_n| / scale stays below ``tol``
    for ``window`` consecutive n.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    engine = AimEngine(lambda0, s0)
    result = RunResult()
    prev = engine.initial()
    streak = 0
    for _ in range(max_iter):
        cur = engine.step(prev)
        d = delta(prev, cur, x_eval)
        scale = delta_scale(prev, cur)
        rel = float(abs(d) / scale) if scale else 0.0
        try:
            a = alpha_ratio(cur, x_eval)
        except DegenerateRatioError:
            a = math.nan
        result.records.append(IterationRecord(cur.n, d, a, rel))
        streak = streak + 1 if rel < tol else 0
        prev = cur
        if streak >= window and not result.terminated:
            result.terminated = True
            result.terminated_at = cur.n - window + 1
            if stop_early:
                break
    result.final = prev
    return result
