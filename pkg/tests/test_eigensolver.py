import math

import pytest

from aimsolve.closed_form import exact_energy
from aimsolve.eigensolver import (
    EigenvalueResult,
    SolverConfig,
    bisect_sign,
    default_x0_policy,
    refine,
    resolve_x0,
    sample_alpha,
    scan,
    solve_spectrum,
    x0_potential_min,
    x0_s0_zero,
)
from aimsolve.problems import ProblemError, ProblemSpec, build_coefficients


class TestConfig:
    def test_defaults(self):
        cfg = SolverConfig()
        assert cfg.order == 2 * 12 + 8
        assert cfg.stabilization_tol == pytest.approx(1e-9)

    @pytest.mark.parametrize(
        "kwargs",
        [dict(max_iter=1), dict(e_step=0.0), dict(e_min=5.0, e_max=1.0), dict(root_tol=0.0),
         dict(x0_policy="middle"), dict(jet_order=4), dict(stab_window=0)],
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SolverConfig(**kwargs)

    def test_thread_cap_from_environment(self, monkeypatch):
        monkeypatch.setenv("AIM_MAX_THREADS", "3")
        assert SolverConfig().workers == 3
        assert SolverConfig(max_workers=2).workers == 2


class TestX0:
    def test_potential_min_closed_form(self):
        assert x0_potential_min(ProblemSpec.spiked(0.0, 1.0, 4.0)) == pytest.approx(2 ** (1 / 6), rel=1e-12)
        assert x0_potential_min(ProblemSpec.spiked(0.0, 2.0, 2.0)) == pytest.approx(2**0.25, rel=1e-12)

    def test_potential_min_needs_coupling(self):
        with pytest.raises(ProblemError):
            x0_potential_min(ProblemSpec.spiked(0.0, 0.0, 4.0))

    def test_potential_min_includes_centrifugal_term(self):
        p = ProblemSpec.spiked(3.0, 0.001, 4.0)
        x = x0_potential_min(p)
        V = p.potential_fn()
        h = 1e-5
        assert V(x) < V(x - h) and V(x) < V(x + h)
        assert x == pytest.approx(12**0.25, rel=1e-4)

    def test_potential_min_custom(self):
        assert x0_potential_min(ProblemSpec.custom("x^2 + 4*x^-1")) == pytest.approx(2 ** (1 / 3) * 1.0, rel=1e-8)

    def test_s0_zero_closed_form(self):
        assert x0_s0_zero(ProblemSpec.spiked(0.0, 1.0, 4.0), 5.0) == pytest.approx(0.25**0.25, rel=1e-12)

    def test_s0_zero_substitutes_back(self):
        p = ProblemSpec.spiked(3.0, 0.001, 4.0)
        x0 = x0_s0_zero(p, 9.0)
        _, s0 = build_coefficients(p, 9.0, x0, 0)
        assert abs(s0.coeffs[0]) < 1e-12

    def test_s0_zero_numeric_branch(self):
        p = ProblemSpec.spiked(1.0, 10.0, 1.9)
        x0 = x0_s0_zero(p, 9.0)
        _, s0 = build_coefficients(p, 9.0, x0, 0)
        assert abs(s0.coeffs[0]) < 1e-12

    def test_s0_zero_singular_guess(self):
        with pytest.raises(ProblemError):
            x0_s0_zero(ProblemSpec.spiked(0.0, 0.1, 4.0), 1.0)

    def test_s0_zero_no_sign_change(self):
        with pytest.raises(ProblemError, match="potential_min"):
            x0_s0_zero(ProblemSpec.spiked(0.0, 0.1, 4.0), 0.5)

    def test_defaults(self):
        assert default_x0_policy(ProblemSpec.quartic(0.1)) == "zero"
        assert default_x0_policy(ProblemSpec.harmonic1d()) == "zero"
        assert default_x0_policy(ProblemSpec.spiked(3.0, 0.1, 4.0)) == "potential_min"
        assert resolve_x0(ProblemSpec.harmonic1d(), 0.75) == 0.75
        with pytest.raises(ProblemError):
            resolve_x0(ProblemSpec.spiked(3.0, 0.1, 4.0), "s0_zero")


class TestBisection:
    def test_finds_root(self):
        assert bisect_sign(lambda x: x * x - 2, 0.0, 2.0, 1e-12) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_no_sign_change(self):
        assert bisect_sign(lambda x: x * x + 1, -1.0, 1.0, 1e-12) is None

    def test_endpoint_root(self):
        assert bisect_sign(lambda x: x - 1.0, 1.0, 2.0, 1e-12) == 1.0


class TestScan:
    def test_harmonic(self):
        sr = scan(ProblemSpec.harmonic1d(), SolverConfig(e_max=10.0, e_step=0.5))
        for (lo, hi), E in zip(sr.brackets, [1, 3, 5, 7, 9]):
            assert lo <= E <= hi
        assert len(sr.brackets) == 5

    def test_gk(self):
        sr = scan(ProblemSpec.goldman_krivchenkov(2.0), SolverConfig(e_max=20.0))
        assert len(sr.brackets) == 4
        for (lo, hi), E in zip(sr.brackets, [7, 11, 15, 19]):
            assert lo <= E <= hi

    def test_quartic_six_brackets(self):
        oracle = [1.0652855, 3.3068720, 5.7479593, 8.3526778, 11.0985956, 13.9699262]
        sr = scan(ProblemSpec.quartic(0.1), SolverConfig(max_iter=40, e_max=15.0))
        assert len(sr.brackets) == 6
        for (lo, hi), E in zip(sr.brackets, oracle):
            assert abs(0.5 * (lo + hi) - E) < 0.05

    def test_skips_overflow(self):
        cfg = SolverConfig(x0_policy="s0_zero", e_min=0.5, e_max=1.5, e_step=0.25)
        sr = scan(ProblemSpec.spiked(0.0, 0.1, 4.0), cfg)
        assert [E for E, _ in sr.skipped] == [0.5, 0.75, 1.0]

    def test_rejects_hermite(self):
        with pytest.raises(ProblemError):
            scan(ProblemSpec.hermite(3), SolverConfig(e_max=5.0))


class TestRefine:
    def test_harmonic(self):
        r = refine(ProblemSpec.harmonic1d(), SolverConfig(), (0.5, 1.5))
        assert isinstance(r, EigenvalueResult)
        assert r.E == pytest.approx(1.0, abs=1e-10)
        assert r.stabilized and r.n_used == 12

    def test_spiked_table_row(self):
        r = refine(ProblemSpec.spiked(3.0, 0.001, 4.0), SolverConfig(), (8.95, 9.05))
        assert r.E == pytest.approx(9.00011427833, rel=1e-9)

    def test_quartic_fifth_excited_state(self):
        r = refine(ProblemSpec.quartic(0.1), SolverConfig(max_iter=40), (13.9, 14.0))
        assert r.E == pytest.approx(13.96695, abs=1e-3)
        assert abs(r.E - 13.96993) > 1e-3

    def test_lost_bracket_is_flagged(self):
        r = refine(ProblemSpec.harmonic1d(), SolverConfig(), (1.5, 2.5))
        assert not r.stabilized and math.isnan(r.delta_residual)

    def test_s0_zero_policy(self):
        r = refine(ProblemSpec.spiked(3.0, 0.001, 4.0), SolverConfig(x0_policy="s0_zero"), (8.95, 9.05))
        assert r.x0_used == pytest.approx(x0_s0_zero(ProblemSpec.spiked(3.0, 0.001, 4.0), 9.0), rel=1e-12)
        assert r.E == pytest.approx(9.00011427912, rel=1e-7)


class TestSpectrum:
    def test_harmonic(self):
        res = solve_spectrum(ProblemSpec.harmonic1d(), SolverConfig(), 4)
        assert [r.E for r in res] == pytest.approx([1, 3, 5, 7], abs=1e-9)
        assert all(r.stabilized for r in res)

    @pytest.mark.parametrize("gamma", [0.0, 1.0, 2.5, 5.0])
    def test_gk_exact(self, gamma):
        p = ProblemSpec.goldman_krivchenkov(gamma)
        res = solve_spectrum(p, SolverConfig(max_iter=12, jet_order=48), 6)
        assert [r.E for r in res] == pytest.approx([exact_energy(p, n) for n in range(6)], abs=1e-8)

    def test_harmonic_exact_to_level_five(self):
        res = solve_spectrum(ProblemSpec.harmonic1d(), SolverConfig(max_iter=12, jet_order=48), 6)
        assert [r.E for r in res] == pytest.approx([1, 3, 5, 7, 9, 11], abs=1e-8)

    def test_generalized_spiked_dimension_five(self):
        res = solve_spectrum(ProblemSpec.spiked(A=10.0, alpha_exp=1.9, N=5, l=0), SolverConfig(), 1)
        assert res[0].E == pytest.approx(9.16309, abs=1e-4)

    def test_dimension_map_bitwise(self):
        a = solve_spectrum(ProblemSpec.spiked(A=10.0, alpha_exp=1.9, N=3, l=0), SolverConfig(), 1)[0]
        b = solve_spectrum(ProblemSpec.spiked(0.0, 10.0, 1.9), SolverConfig(), 1)[0]
        assert a == b

    def test_hermite_is_not_an_eigenproblem(self):
        with pytest.raises(ProblemError):
            solve_spectrum(ProblemSpec.hermite(3), SolverConfig(), 1)

    def test_count(self):
        with pytest.raises(ValueError):
            solve_spectrum(ProblemSpec.harmonic1d(), SolverConfig(), 0)

    def test_parallel_scan_is_deterministic(self):
        p = ProblemSpec.quartic(0.1)
        serial = solve_spectrum(p, SolverConfig(max_iter=20), 3)
        threaded = solve_spectrum(p, SolverConfig(max_iter=20, max_workers=4), 3)
        assert serial == threaded

    def test_harmonic_x0_independent(self):
        Es = [solve_spectrum(ProblemSpec.harmonic1d(), SolverConfig(x0_policy=x0), 1)[0].E for x0 in (0.0, 0.5, 1.0)]
        assert max(Es) - min(Es) < 1e-6


MONOTONE_CASES = [
    ProblemSpec.harmonic1d(),
    ProblemSpec.quartic(0.1),
    ProblemSpec.goldman_krivchenkov(2.0),
    ProblemSpec.spiked(3.0, 0.001, 4.0),
    ProblemSpec.spiked(A=10.0, alpha_exp=1.9, N=5, l=0),
]


@pytest.mark.parametrize("p", MONOTONE_CASES, ids=lambda p: p.kind)
def test_monotone_convergence(p):
    for r in solve_spectrum(p, SolverConfig(), 3):
        n = max(r.depth_roots)
        gaps = [abs(r.depth_roots[d] - r.depth_roots[n]) for d in sorted(r.depth_roots)]
        assert all(a >= b for a, b in zip(gaps, gaps[1:]))


class TestSampleAlpha:
    def test_hermite_k2_ratio(self):
        xs = [1.0, 1.5, 2.0]
        alpha, lam = sample_alpha(ProblemSpec.hermite(2), 0.0, xs, 4)
        assert alpha == pytest.approx([-4 * x / (2 * x * x - 1) for x in xs], rel=1e-12)

    def test_removable_zero(self):
        alpha, lam = sample_alpha(ProblemSpec.harmonic1d(), 1.0, [0.0, 0.5], 6)
        assert list(alpha) == [0.0, 0.0]

    def test_pole_is_nan(self):
        alpha, lam = sample_alpha(ProblemSpec.harmonic1d(), 3.0, [0.0, 0.5], 6)
        assert math.isnan(alpha[0])
        assert alpha[1] == pytest.approx(-1 / 0.5, rel=1e-12)
