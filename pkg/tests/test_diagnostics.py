import math

import numpy as np
import pytest

from hjb_growth.diagnostics import (
    CounterexampleSuite,
    PathDiagnostics,
    counterexample_suite,
    euler_residual,
    magic_of_capital_demo,
    subgradient_interval,
    transversality_check,
)
from hjb_growth.errors import FormMismatch, ModelDomainError, PreconditionError
from hjb_growth.hjb_solver import closed_form_value
from hjb_growth.model import ces_utility, make_ak
from hjb_growth.ode import IntegratorConfig, log_ak_path, optimal_path


@pytest.fixture
def log_ak_long_path(log_ak):
    return log_ak_path(log_ak, 1.0, np.linspace(0.0, 200.0, 4001))


class TestSubgradient:
    def test_kink(self):
        interval = subgradient_interval(lambda x: min(x, 2.0 - x), 1.0, 0.1)
        assert interval.d_plus == pytest.approx(-1.0)
        assert interval.d_minus == pytest.approx(1.0)
        assert interval.width == pytest.approx(2.0)

    def test_smooth_function_has_thin_interval(self):
        interval = subgradient_interval(math.log, 2.0, 1e-2)
        assert interval.d_plus == pytest.approx(0.5, rel=1e-6)
        assert abs(interval.width) < 1e-6

    def test_random_smooth_concave_functions(self):
        rng = np.random.default_rng(29)
        for a, s, b, x in rng.uniform([0.5, 0.1, 0.0, 1.0], [2.0, 1.0, 1.0, 3.0], (20, 4)):
            interval = subgradient_interval(lambda z: a * math.log(z + s) - b * z * z, x, 1e-2)
            assert abs(interval.width) <= 1e-4
            assert interval.d_plus == pytest.approx(a / (x + s) - 2.0 * b * x, abs=1e-4)

    def test_stencil_must_stay_positive(self):
        with pytest.raises(PreconditionError):
            subgradient_interval(math.log, 0.1, 0.2)

    def test_infinite_values(self):
        with pytest.raises(ModelDomainError):
            subgradient_interval(lambda x: -math.inf if x < 1.0 else 0.0, 1.0, 0.1)


class TestEulerAndTransversality:
    def test_euler_residual_vanishes_on_optimal_path(self, log_ak, log_ak_long_path):
        residual = euler_residual(log_ak, log_ak_long_path)
        assert residual.size == len(log_ak_long_path) - 2
        assert np.max(np.abs(residual)) < 1e-5

    def test_euler_residual_second_order_in_step(self, log_ak):
        coarse = euler_residual(log_ak, log_ak_path(log_ak, 1.0, np.linspace(0.0, 200.0, 401)))
        fine = euler_residual(log_ak, log_ak_path(log_ak, 1.0, np.linspace(0.0, 200.0, 801)))
        assert np.max(np.abs(coarse)) >= 3.5 * np.max(np.abs(fine))

    def test_euler_residual_small_on_solved_rck_path(self, rck, rck_solution):
        value, _ = rck_solution
        k_ss = 3.0 ** (1.0 / 0.7)
        path = optimal_path(rck, value, k_ss / 2.0, IntegratorConfig(t_end=100.0, samples=4001))
        residual = euler_residual(rck, path)
        marginal = rck.rck.marginal_utility(path.consumption)
        assert np.max(np.abs(residual)) <= 1e-2 * np.max(np.abs(marginal))

    def test_euler_residual_needs_rck_form(self, log_ak_long_path):
        model = make_ak(0.1, ces_utility(0.5, 0.25), 0.05)
        with pytest.raises(FormMismatch):
            euler_residual(model, log_ak_long_path)

    def test_transversality(self, log_ak, log_ak_long_path):
        verdict, samples = transversality_check(log_ak, log_ak_long_path)
        assert verdict.passed
        values = [v for _, v in samples]
        # e^{-ρT}·γ/ρ
        assert values[0] == pytest.approx(2.0 * math.exp(-2.5), rel=1e-10)

    def test_transversality_tolerance(self, log_ak, log_ak_long_path):
        verdict, _ = transversality_check(log_ak, log_ak_long_path, tol=0.5)
        assert verdict.passed and verdict.tol == 0.5

    def test_samples_inside_support(self, log_ak, log_ak_long_path):
        with pytest.raises(PreconditionError):
            transversality_check(log_ak, log_ak_long_path, samples=[10.0, 300.0])


class TestPathDiagnostics:
    def test_closed_form_path_passes(self, log_ak):
        path = log_ak_path(log_ak, 1.0, np.linspace(0.0, 40.0, 801))
        report = PathDiagnostics(log_ak, path, closed_form_value(log_ak), transversality_tol=0.5).run_all()
        assert report.passed
        assert report.hjb_sup < 1e-8
        assert report.skipped == ()

    def test_skips_checks_without_rck_form(self, log_ak):
        model = make_ak(0.1, ces_utility(0.5, 0.25), 0.05)
        path = log_ak_path(log_ak, 1.0, np.linspace(0.0, 10.0, 51))
        report = PathDiagnostics(model, path).run_all()
        assert set(report.skipped) == {"euler_residual", "transversality", "hjb_along_path"}
        assert report.verdicts == ()

    def test_report_serializes(self, log_ak):
        path = log_ak_path(log_ak, 1.0, np.linspace(0.0, 40.0, 81))
        data = PathDiagnostics(log_ak, path).run_all().to_dict()
        assert data["skipped"] == ["hjb_along_path"]
        assert {v["name"] for v in data["verdicts"]} == {"euler_residual", "transversality"}


class TestCounterexample:
    def test_non_uniqueness_at_rho_one(self):
        report = counterexample_suite(1.0)
        assert [a for a, _, _ in report.fact1] == [1.0, 2.0, 5.0]
        assert all(ok for _, _, ok in report.fact1)
        assert report.fact1_ok
        assert report.fact1_sublinear == (0.5, math.inf)

    def test_constant_fraction_payoffs_bounded(self):
        report = counterexample_suite(1.0)
        payoffs = [v for _, v in report.fact2]
        assert len(payoffs) == 5
        assert all(0.0 <= v <= 1.0 + 1e-9 for v in payoffs)
        assert report.fact2_bound_ok

    def test_forced_quadratic_contradiction(self):
        report = counterexample_suite(1.0)
        k, dv = report.forced_pair
        assert k == pytest.approx(0.01)
        assert dv == pytest.approx(0.02)
        assert report.contradiction
        assert report.passed

    def test_other_discount_breaks_fact1(self):
        report = CounterexampleSuite(1.0, rho_fact1=1.5).run_all()
        assert not report.fact1_ok

    def test_rejects_nonpositive_capital(self):
        with pytest.raises(PreconditionError):
            CounterexampleSuite(0.0)


class TestMagicOfCapital:
    def test_payoff_above_bound(self):
        report = magic_of_capital_demo()
        assert report.lower_bound == pytest.approx(-6.697, abs=1e-3)
        assert report.payoff >= report.lower_bound
        assert report.payoff == pytest.approx(-math.sqrt(8.0 * math.pi), abs=1e-3)
        assert report.passed

    def test_path_is_admissible(self):
        report = magic_of_capital_demo()
        assert all(abs(r) <= 1e-12 for _, r in report.admissibility)
