"""Eigenvalues as sign changes of delta_n(E) at a fixed evaluation point."""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from aimsolve.engine import AimEngine, IterationOverflow, delta, delta_scale
from aimsolve.jet import jet_eval
from aimsolve.problems import ProblemError, ProblemSpec, build_coefficients

log = logging.getLogger(__name__)

X0_POLICIES = ("auto", "zero", "potential_min", "s0_zero")
X_SEARCH_MAX = 10.0


@dataclass
class SolverConfig:
    """Settings for scan + refine.

    ``x0_policy`` is one of X0_POLICIES or a number (fixed point).
    ``jet_order`` defaults to 2 * max_iter + 8.  ``stab_tol`` defaults to
    10 * root_tol.  ``e_max=None`` widens the window until enough roots
    are found.
    """

    x0_policy: str | float = "auto"
    max_iter: int = 12
    jet_order: int | None = None
    e_min: float = 0.0
    e_max: float | None = None
    e_step: float = 0.05
    stab_window: int = 3
    root_tol: float = 1e-10
    stab_tol: float | None = None
    max_workers: int | None = None

    def __post_init__(self):
        if self.max_iter < 2:
            raise ValueError("max_iter must be >= 2")
        if self.e_step <= 0:
            raise ValueError("e_step must be > 0")
        if self.e_max is not None and self.e_min >= self.e_max:
            raise ValueError("e_min must be below e_max")
        if not 1 <= self.stab_window <= self.max_iter:
            raise ValueError("stab_window must lie in [1, max_iter]")
        if self.root_tol <= 0:
            raise ValueError("root_tol must be > 0")
        if isinstance(self.x0_policy, str) and self.x0_policy not in X0_POLICIES:
            raise ValueError(f"unknown x0 policy {self.x0_policy!r}")
        if self.jet_order is not None and self.jet_order < self.max_iter:
            raise ValueError("jet_order must be >= max_iter")

    @property
    def order(self) -> int:
        return self.jet_order if self.jet_order is not None else 2 * self.max_iter + 8

    @property
    def stabilization_tol(self) -> float:
        return self.stab_tol if self.stab_tol is not None else 10 * self.root_tol

    @property
    def workers(self) -> int:
        if self.max_workers is not None:
            return max(1, self.max_workers)
        return max(1, int(os.environ.get("AIM_MAX_THREADS", "1")))


@dataclass
class EigenvalueResult:
    E: float
    n_used: int
    delta_residual: float
    x0_used: float
    stabilized: bool
    depth_roots: dict[int, float] = field(default_factory=dict)


# -- evaluation point ---------------------------------------------------------


def _power_sum_derivative(terms):
    """d/dx of sum c x**b for (c, b) pairs."""

    def dV(x):
        return sum(c * b * x ** (b - 1) for c, b in terms if b != 0)

    return dV


def _local_minimum(V, lo: float = 1e-3, hi: float = X_SEARCH_MAX, dV=None) -> float:
    xs = np.geomspace(lo, hi, 4000)
    with np.errstate(all="ignore"):
        v = np.asarray(V(xs), dtype=float)
    idx = [i for i in range(1, xs.size - 1) if v[i] <= v[i - 1] and v[i] <= v[i + 1] and np.isfinite(v[i])]
    if not idx:
        raise ProblemError("potential has no interior minimum on (0, 10]")
    i = min(idx, key=lambda j: v[j])
    if dV is not None and dV(xs[i - 1]) < 0 < dV(xs[i + 1]):
        # V is flat at its minimum, so V itself only pins x to ~sqrt(eps); V' does better
        return float(brentq(dV, xs[i - 1], xs[i + 1], xtol=1e-14))
    res = minimize_scalar(V, bounds=(xs[i - 1], xs[i + 1]), method="bounded", options={"xatol": 1e-10})
    return float(res.x)


def x0_potential_min(p: ProblemSpec) -> float:
    """Interior minimum of the full potential.

    For x^2 + A x^-a this is (a A / 2)^(1/(a+2)); a centrifugal term, when
    present, is included in the minimization.
    """
    if p.kind == "spiked":
        if p.centrifugal == 0:
            if p.A == 0:
                raise ProblemError("A = 0: x^2 has no interior minimum; use another x0 policy")
            return (p.alpha_exp * p.A / 2) ** (1 / (p.alpha_exp + 2))
        if p.A == 0 and p.centrifugal < 0:
            raise ProblemError("potential has no interior minimum; use another x0 policy")
        terms = [(1.0, 2.0), (p.centrifugal, -2.0), (p.A, -p.alpha_exp)]
        return _local_minimum(p.potential_fn(), dV=_power_sum_derivative(terms))
    if p.kind == "goldman_krivchenkov":
        if p.centrifugal <= 0:
            raise ProblemError("gamma(gamma+1) <= 0: no interior minimum")
        return p.centrifugal**0.25
    if p.kind in ("harmonic1d", "quartic"):
        return 0.0
    if p.kind == "custom":
        return _local_minimum(p.potential, dV=_power_sum_derivative(p.potential.terms))
    raise ProblemError(f"{p.kind} has no potential")


def _s0_fn(p: ProblemSpec, E: float):
    def s0(x):
        _, s = build_coefficients(p, E, float(x), 0)
        return float(s.coeffs[0])

    return s0


def x0_s0_zero(p: ProblemSpec, E_guess: float) -> float:
    """A point where s_0(x; E_guess) = 0."""
    if p.kind == "spiked" and p.alpha_exp == 4:
        if E_guess == 1:
            raise ProblemError("E_guess = 1 makes the closed-form x0 singular")
        if E_guess > 1:
            q = p.centrifugal / (2 * (E_guess - 1))
            inner = q * q + p.A / (E_guess - 1)
            if inner >= 0 and q + math.sqrt(inner) > 0:
                return math.sqrt(q + math.sqrt(inner))
    if p.kind == "hermite":
        raise ProblemError("s0 is constant for the Hermite equation")
    s0 = _s0_fn(p, E_guess)
    lo = 1e-3 if p.half_line else 0.0
    xs = np.linspace(lo, X_SEARCH_MAX, 2001)
    vals = np.array([s0(x) for x in xs])
    sgn = np.sign(vals)
    hits = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    exact = np.flatnonzero(vals == 0)
    if exact.size:
        return float(xs[exact[-1]])
    if not hits.size:
        raise ProblemError(f"s0(x; E={E_guess}) has no sign change on (0, 10]; try x0 potential_min")
    i = hits[-1]
    return float(brentq(s0, xs[i], xs[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps))


def default_x0_policy(p: ProblemSpec) -> str | float:
    if p.kind in ("harmonic1d", "quartic", "hermite"):
        return "zero"
    if p.kind == "goldman_krivchenkov":
        return "potential_min" if p.centrifugal > 0 else 1.0
    if p.kind == "spiked":
        return "potential_min"
    return "potential_min" if p.half_line else "zero"


def resolve_x0(p: ProblemSpec, policy, E_guess: float | None = None) -> float:
    if policy == "auto":
        policy = default_x0_policy(p)
    if not isinstance(policy, str):
        return float(policy)
    if policy == "zero":
        return 0.0
    if policy == "potential_min":
        return x0_potential_min(p)
    if E_guess is None:
        raise ProblemError("s0_zero policy needs an energy guess")
    return x0_s0_zero(p, E_guess)


# -- delta as a function of E ---------------------------------------------------


def delta_at(p: ProblemSpec, E: float, x0: float, n: int, order: int) -> tuple[float, float]:
    """delta_n(E) at x0 and its cancellation scale."""
    lam0, s0 = build_coefficients(p, E, x0, order)
    engine = AimEngine(lam0, s0)
    prev = engine.initial()
    for _ in range(n):
        cur = engine.step(prev)
        if cur.n == n:
            return float(delta(prev, cur, x0)), float(delta_scale(prev, cur))
        prev = cur
    raise AssertionError("unreachable")


def _sign(v: float) -> int:
    return (v > 0) - (v < 0)


def bisect_sign(f, lo: float, hi: float, tol: float, flo: float | None = None, fhi: float | None = None):
    """Bisection on the sign of f only; returns None without a sign change."""
    flo = f(lo) if flo is None else flo
    if _sign(flo) == 0:
        return lo
    fhi = f(hi) if fhi is None else fhi
    if _sign(fhi) == 0:
        return hi
    if _sign(flo) == _sign(fhi):
        return None
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        s = _sign(fm)
        if s == 0:
            return mid
        if s == _sign(flo):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass
class ScanResult:
    brackets: list[tuple[float, float]]
    skipped: list[tuple[float, str]]


def _energy_grid(e_min: float, e_max: float, step: float) -> np.ndarray:
    k = int(math.floor((e_max - e_min) / step + 1e-9))
    return e_min + step * np.arange(k + 1)


def scan(p: ProblemSpec, cfg: SolverConfig, e_max: float | None = None) -> ScanResult:
    """Brackets where delta_{max_iter}(E) changes sign on the energy grid."""
    if not p.is_eigenproblem:
        raise ProblemError(f"{p.kind} is not an eigenvalue problem in E")
    top = e_max if e_max is not None else cfg.e_max
    if top is None:
        raise ValueError("scan needs an upper energy")
    grid = _energy_grid(cfg.e_min, top, cfg.e_step)
    fixed_x0 = None if cfg.x0_policy == "s0_zero" else resolve_x0(p, cfg.x0_policy)

    def point(E):
        try:
            x0 = fixed_x0 if fixed_x0 is not None else resolve_x0(p, "s0_zero", E)
            return delta_at(p, E, x0, cfg.max_iter, cfg.order)[0], None
        except IterationOverflow as exc:
            return None, str(exc)
        except ProblemError as exc:
            return None, str(exc)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            values = list(pool.map(point, grid))
    else:
        values = [point(E) for E in grid]

    brackets, skipped = [], []
    prev_E, prev_v = None, None
    for E, (v, err) in zip(grid, values):
        E = float(E)
        if v is None:
            log.warning("skipping E=%g: %s", E, err)
            skipped.append((E, err))
            prev_E, prev_v = None, None
            continue
        if v == 0:
            brackets.append((E, E))
        elif prev_v is not None and prev_v != 0 and _sign(v) != _sign(prev_v):
            brackets.append((prev_E, E))
        prev_E, prev_v = E, v
    return ScanResult(brackets, skipped)


def refine(p: ProblemSpec, cfg: SolverConfig, bracket: tuple[float, float]) -> EigenvalueResult:
    """Bisect at n = max_iter, then at the preceding depths for stabilization."""
    lo, hi = bracket
    mid = 0.5 * (lo + hi)
    x0 = resolve_x0(p, cfg.x0_policy, E_guess=mid)
    n = cfg.max_iter
    roots: dict[int, float] = {}
    for depth in range(n, n - cfg.stab_window, -1):
        f = lambda E, d=depth: delta_at(p, E, x0, d, cfg.order)[0]  # noqa: E731
        r = bisect_sign(f, lo, hi, cfg.root_tol) if lo < hi or depth == n else None
        if r is None and depth < n:
            # a shallower root may sit just outside the bracket (or the bracket is a
            # single grid point where delta_n hit zero); allow half a step of slack
            r = bisect_sign(f, lo - cfg.e_step / 2, hi + cfg.e_step / 2, cfg.root_tol)
        if r is None:
            break
        roots[depth] = r
    if n not in roots:
        return EigenvalueResult(mid, n, math.nan, x0, False, roots)
    E = roots[n]
    d, scale = delta_at(p, E, x0, n, cfg.order)
    residual = abs(d) / scale if scale else 0.0
    vals = list(roots.values())
    stabilized = len(vals) == cfg.stab_window and max(vals) - min(vals) <= cfg.stabilization_tol
    return EigenvalueResult(E, n, residual, x0, stabilized, roots)


def solve_spectrum(p: ProblemSpec, cfg: SolverConfig, count: int) -> list[EigenvalueResult]:
    """Lowest ``count`` roots, ascending; unstabilized roots are kept and flagged."""
    if not p.is_eigenproblem:
        raise ProblemError(f"{p.kind} is not an eigenvalue problem in E")
    if count < 1:
        raise ValueError("count must be >= 1")
    if cfg.e_max is not None:
        tops = [cfg.e_max]
    else:
        first = cfg.e_min + 4.0 * count + 10.0
        tops = [cfg.e_min + (first - cfg.e_min) * 2**i for i in range(4)]
    results: list[EigenvalueResult] = []
    for top in tops:
        sr = scan(p, cfg, e_max=top)
        results = []
        for br in sr.brackets:
            res = refine(p, cfg, br)
            if results and abs(res.E - results[-1].E) <= cfg.root_tol:
                if res.stabilized and not results[-1].stabilized:
                    results[-1] = res
                continue
            results.append(res)
        if len(results) >= count:
            break
    return results[:count]


REMOVABLE_RTOL = 1e-8


def sample_alpha(p: ProblemSpec, E: float, grid, n_iter: int, order: int | None = None):
    """s_n/lambda_n and lambda_n sampled on ``grid``, one jet expansion per point."""
    order = order if order is not None else 2 * n_iter + 8
    alpha = np.empty(len(grid))
    lam = np.empty(len(grid))
    for i, x in enumerate(grid):
        lam0, s0 = build_coefficients(p, E, float(x), order)
        st = None
        for st in AimEngine(lam0, s0).states(n_iter):
            pass
        lv = float(jet_eval(st.lambda_, float(x)))
        sv = float(jet_eval(st.s, float(x)))
        lam[i] = lv
        alpha[i] = sv / lv if lv != 0 else _removable_ratio(st.s.coeffs, st.lambda_.coeffs)
    return alpha, lam


def _removable_ratio(s_coeffs, lam_coeffs) -> float:
    """Limit of s/lambda at the expansion point when lambda vanishes there (nan for a pole).

    Leading s coefficients below REMOVABLE_RTOL of the jet's largest one are
    treated as zero; with E known only to root_tol they never vanish exactly.
    """
    lam_c = np.asarray(lam_coeffs, dtype=float)
    s_c = np.asarray(s_coeffs, dtype=float)
    nz = np.flatnonzero(lam_c)
    if nz.size == 0:
        return math.nan
    j = int(nz[0])
    if np.any(np.abs(s_c[:j]) > REMOVABLE_RTOL * np.max(np.abs(s_c))):
        return math.nan
    return float(s_c[j] / lam_c[j])
