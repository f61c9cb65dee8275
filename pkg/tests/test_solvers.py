import numpy as np
import pytest
from scipy.special import logit

from recal import (
    DiscreteScoreDist,
    DomainError,
    InfeasibleError,
    NoRootError,
    PosteriorCurve,
    SolverSettings,
    TargetSpec,
    bisect_root,
    fixed_point_f0,
    implied_auc,
    logistic_cspd_family,
    mean_under,
    platt_family,
    solve_qmm_2d,
    source_implied_auc,
)


class TestBisectRoot:
    def test_linear(self):
        root = bisect_root(lambda x: x - 1.0, 0.0, 2.0, 1e-12)
        assert abs(root - 1.0) <= 1e-9

    def test_exact_endpoint_root(self):
        assert bisect_root(lambda x: x, 0.0, 2.0, 1e-12) == 0.0

    def test_expansion_reaches_distant_root(self):
        root = bisect_root(lambda x: x - 1000.0, 0.0, 1.0, 1e-9)
        assert abs(root - 1000.0) <= 1e-5

    def test_expansion_respects_lo_anchor(self):
        calls = []

        def f(x):
            calls.append(x)
            return x - 1000.0

        bisect_root(f, 0.0, 1.0, 1e-9, expand_lo=False)
        assert min(calls) >= 0.0

    def test_no_root_error_carries_probed_interval(self):
        with pytest.raises(NoRootError) as err:
            bisect_root(lambda x: x * x + 1.0, -1.0, 1.0, 1e-9, max_expansions=5)
        lo, hi = err.value.probed_interval
        assert lo < -1.0 and hi > 1.0

    def test_closed_interval_without_expansion(self):
        with pytest.raises(NoRootError):
            bisect_root(lambda x: x - 5.0, 0.0, 1.0, 1e-9, expand_lo=False, expand_hi=False)

    def test_degenerate_interval(self):
        assert bisect_root(lambda x: 0.0, 2.0, 2.0, 1e-9) == 2.0
        with pytest.raises(NoRootError):
            bisect_root(lambda x: 1.0, 2.0, 2.0, 1e-9)

    def test_invalid_interval(self):
        with pytest.raises(DomainError):
            bisect_root(lambda x: x, 1.0, 0.0, 1e-9)

    def test_deterministic(self):
        f = lambda x: np.sin(x) - 0.3
        assert bisect_root(f, 0.0, 1.0, 1e-14) == bisect_root(f, 0.0, 1.0, 1e-14)

    def test_residual_tolerance_honoured(self):
        f = lambda x: np.expm1(x) - 0.5
        root = bisect_root(f, 0.0, 1.0, 1e-10)
        assert abs(f(root)) <= 1e-10


def _toy_problem(n=5, q=0.08, seed=0):
    rng = np.random.default_rng(seed)
    support = np.arange(n, dtype=float)
    probs = rng.uniform(0.1, 1.0, n)
    probs /= probs.sum()
    target = TargetSpec(DiscreteScoreDist(support, probs), q)
    values = np.sort(rng.uniform(0.05, 0.95, n))
    curve = PosteriorCurve(support, values)
    return target, curve


class TestSolveQmm2d:
    def test_identity_solution_when_nothing_shifts(self, example_scenario):
        """With target features equal to the source features and q = p, the
        identity transform already satisfies both matching equations."""
        src = example_scenario.source
        target = TargetSpec(src.feature_dist, src.prior)
        auc = source_implied_auc(src)
        a, b, diag = solve_qmm_2d(logistic_cspd_family(), auc, src.prior, target, src.posterior)
        assert diag.converged
        assert abs(a - 1.0) <= 1e-3
        assert abs(b) <= 1e-2
        values = logistic_cspd_family().posterior_values(src.posterior.values, a, b)
        np.testing.assert_allclose(values, src.posterior.values, atol=1e-4)

    def test_platt_with_half_auc_target_collapses(self):
        """Target AUC 1/2 is met exactly by a constant transform: zero slope
        and intercept at the log-odds of the target prior."""
        target, curve = _toy_problem(q=0.07)
        a, b, diag = solve_qmm_2d(platt_family(), 0.5, 0.07, target, curve)
        assert diag.converged
        assert a == 0.0
        assert abs(b - logit(0.07)) <= 1e-6
        values = platt_family().posterior_values(curve.values, a, b)
        np.testing.assert_allclose(values, 0.07, atol=1e-9)

    def test_example_logistic_cspd_row(self, example_scenario):
        src, tgt = example_scenario.source, example_scenario.target
        auc_target = source_implied_auc(src)
        fam = logistic_cspd_family()
        a, b, diag = solve_qmm_2d(fam, auc_target, tgt.prior, tgt, src.posterior)
        assert diag.converged
        values = fam.posterior_values(src.posterior.values, a, b)
        curve = PosteriorCurve(tgt.support, values)
        assert abs(mean_under(tgt.feature_dist, curve) - 0.050) <= 1.5e-3
        assert abs(implied_auc(tgt.feature_dist, curve) - 0.803) <= 1.5e-3

    def test_residual_contracts_hold_when_converged(self):
        rng = np.random.default_rng(21)
        for trial in range(20):
            target, curve = _toy_problem(
                n=int(rng.integers(3, 10)), q=float(rng.uniform(0.02, 0.2)), seed=trial
            )
            # a self-consistent reachable AUC target: the curve's own implied
            # AUC under the target features
            auc_target = implied_auc(target.feature_dist, curve)
            a, b, diag = solve_qmm_2d(platt_family(), auc_target, target.prior, target, curve)
            assert diag.converged
            assert diag.residual_mean <= 1e-9
            assert diag.residual_auc <= 1e-6

    def test_infeasible_target_reports_attainable_range(self):
        target, curve = _toy_problem(n=2, q=0.3, seed=3)
        with pytest.raises(InfeasibleError) as err:
            solve_qmm_2d(platt_family(), 0.9999, 0.3, target, curve)
        low, high = err.value.attainable_auc_range
        assert 0.5 <= low <= high < 0.9999

    def test_below_half_target_is_infeasible(self):
        target, curve = _toy_problem(q=0.1)
        with pytest.raises(InfeasibleError):
            solve_qmm_2d(platt_family(), 0.3, 0.1, target, curve)

    def test_bracket_recorded(self, example_scenario):
        src, tgt = example_scenario.source, example_scenario.target
        a, b, diag = solve_qmm_2d(
            logistic_cspd_family(), source_implied_auc(src), tgt.prior, tgt, src.posterior
        )
        assert diag.bracket is not None
        lo, hi = diag.bracket
        assert lo <= a <= hi

    def test_deterministic(self, example_scenario):
        src, tgt = example_scenario.source, example_scenario.target
        auc = source_implied_auc(src)
        first = solve_qmm_2d(platt_family(), auc, tgt.prior, tgt, src.posterior)
        second = solve_qmm_2d(platt_family(), auc, tgt.prior, tgt, src.posterior)
        assert first[0] == second[0] and first[1] == second[1]

    def test_interior_source_required(self):
        target, _ = _toy_problem()
        bad = PosteriorCurve(target.support, [0.0, 0.2, 0.4, 0.6, 0.8])
        with pytest.raises(DomainError):
            solve_qmm_2d(logistic_cspd_family(), 0.7, 0.1, target, bad)


class TestFixedPointF0:
    def test_identity_converges_immediately(self):
        init = np.array([0.2, 0.5, 0.8])
        out, diag = fixed_point_f0(lambda x: x, init)
        assert diag.converged and diag.iterations == 1
        np.testing.assert_allclose(out, init, atol=0)

    def test_affine_contraction_reaches_closed_form(self):
        out, diag = fixed_point_f0(lambda x: x / 2.0 + 0.25, np.array([0.2, 0.4, 0.6]))
        assert diag.converged
        np.testing.assert_allclose(out, 0.5, atol=1e-9)

    def test_non_convergence_flagged_not_raised(self):
        slow = lambda x: 0.5 + 0.999 * (x - 0.5)
        out, diag = fixed_point_f0(slow, np.array([0.2, 0.4, 0.6]), tol=1e-12, max_iter=5)
        assert not diag.converged
        assert diag.iterations == 5
        assert diag.residual_fixed_point > 1e-12
        assert out.shape == (3,)

    def test_init_validation(self):
        with pytest.raises(DomainError):
            fixed_point_f0(lambda x: x, np.array([0.5, 0.4]))
        with pytest.raises(DomainError):
            fixed_point_f0(lambda x: x, np.array([0.0, 0.5]))
        with pytest.raises(DomainError):
            fixed_point_f0(lambda x: x, np.array([0.2, 1.0]))

    def test_order_preserving_update_keeps_order(self):
        rng = np.random.default_rng(22)
        init = np.sort(rng.uniform(0.05, 0.95, 6))
        out, diag = fixed_point_f0(lambda x: 0.6 * x + 0.2, init)
        assert diag.converged
        assert np.all(np.diff(out) >= 0.0)
        assert np.all(out > 0.0) and np.all(out < 1.0)


class TestSolverSettings:
    def test_defaults(self):
        s = SolverSettings()
        assert s.tol_mean == 1e-9
        assert s.tol_auc == 1e-6
        assert s.tol_fixed_point == 1e-10
        assert s.max_iter == 200
