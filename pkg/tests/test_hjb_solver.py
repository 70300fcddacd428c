import numpy as np
import pytest

from hjb_growth.errors import DegenerateGrid, NonConvergence, UnboundedHamiltonian
from hjb_growth.hjb_solver import (
    INCONCLUSIVE,
    SATISFIED,
    VIOLATED,
    AnalyticValue,
    HJBSolver,
    SolveConfig,
    ValueGrid,
    assumption6_upper_bound,
    check_class_V,
    closed_form_value,
    growth_condition,
    hjb_residual,
    hjb_residual_profile,
    solve_hjb,
)
from hjb_growth.model import make_ak_crra


def _linear_value(nodes):
    return ValueGrid.from_function(nodes, lambda k: k, lambda k: np.ones_like(k), label="k")


class TestValueGrid:
    def test_template(self):
        grid = ValueGrid.template(0.1, 10.0, 50)
        assert grid.size == 50
        assert grid.domain == pytest.approx((0.1, 10.0))

    def test_rejects_unsorted_nodes(self):
        with pytest.raises(DegenerateGrid):
            ValueGrid(np.array([1.0, 3.0, 2.0]), np.zeros(3))

    def test_interpolates_between_nodes(self):
        nodes = np.geomspace(0.1, 10.0, 200)
        grid = ValueGrid.from_function(nodes, np.log, lambda k: 1.0 / k)
        k = np.array([0.37, 1.9, 7.3])
        np.testing.assert_allclose(grid.value(k), np.log(k), atol=1e-5)
        np.testing.assert_allclose(grid.deriv(k), 1.0 / k, rtol=1e-4)

    def test_constant_elasticity_tail(self):
        nodes = np.geomspace(0.1, 10.0, 200)
        grid = ValueGrid.from_function(nodes, np.log, lambda k: 1.0 / k)
        assert grid.value(100.0) == pytest.approx(np.log(100.0), rel=1e-6)
        assert grid.deriv(0.01) == pytest.approx(100.0, rel=1e-6)


class TestResidual:
    def test_closed_form_log_ak(self, log_ak):
        V = closed_form_value(log_ak)
        nodes = np.geomspace(0.1, 10.0, 25)
        assert np.max(np.abs(hjb_residual_profile(log_ak, V, nodes))) <= 1e-8

    def test_closed_form_ak_crra(self):
        model = make_ak_crra(0.1, 2.0, 0.05)
        V = closed_form_value(model)
        nodes = np.geomspace(0.1, 10.0, 25)
        scale = np.max(np.abs(V.value(nodes)))
        assert np.max(np.abs(hjb_residual_profile(model, V, nodes))) <= 1e-8 * scale

    def test_unbounded_supremum_is_infinite(self, linear_rho1):
        V = AnalyticValue(lambda k: 0.5 * k, lambda k: 0.5 + 0.0 * k)
        assert hjb_residual(linear_rho1, V, 1.0) == np.inf


class TestLogAK:
    def test_value_matches_closed_form(self, log_ak, log_ak_solution):
        value, _ = log_ak_solution
        exact = closed_form_value(log_ak)
        k = value.nodes[1:-1]
        target = exact.value(k)
        error = np.max(np.abs(value.values[1:-1] - target)) / np.max(np.abs(target))
        assert error <= 1e-2

    def test_derivative_matches_closed_form(self, log_ak, log_ak_solution):
        value, _ = log_ak_solution
        k = value.nodes[1:-1]
        exact = closed_form_value(log_ak).deriv(k)
        assert np.max(np.abs(value.derivs[1:-1] / exact - 1.0)) <= 2e-2

    def test_certificate(self, log_ak_solution):
        _, certificate = log_ak_solution
        assert certificate.increasing
        assert certificate.concave
        assert certificate.growth_condition.status == SATISFIED
        assert certificate.in_class_V
        assert certificate.max_abs_residual < 1e-6

    def test_policy_is_stored(self, log_ak, log_ak_solution):
        value, _ = log_ak_solution
        assert value.policy is not None
        np.testing.assert_allclose(value.policy[1:-1], 0.05 * value.nodes[1:-1], rtol=2e-2)

    def test_initialization_does_not_matter(self, log_ak, log_ak_a6, log_ak_solution):
        value, _ = log_ak_solution
        cfg = SolveConfig()
        other, _ = solve_hjb(log_ak, ValueGrid.template(0.1, 10.0, 400), cfg,
                             initial="assumption6", a6=log_ak_a6)
        assert np.max(np.abs(other.values - value.values)) <= 10 * cfg.residual_tol / log_ak.rho

    def test_upper_bound_dominates(self, log_ak, log_ak_a6, log_ak_solution):
        value, _ = log_ak_solution
        bound = assumption6_upper_bound(log_ak, log_ak_a6, value.nodes)
        assert np.all(value.values <= bound + 1e-6 * np.abs(bound))

    def test_upper_bound_is_exact_for_log_ak(self, log_ak, log_ak_a6):
        k = np.geomspace(0.1, 10.0, 20)
        np.testing.assert_allclose(assumption6_upper_bound(log_ak, log_ak_a6, k),
                                   closed_form_value(log_ak).value(k), rtol=1e-12)


class TestSolver:
    def test_too_few_nodes(self, log_ak):
        with pytest.raises(DegenerateGrid):
            solve_hjb(log_ak, ValueGrid.template(0.1, 10.0, 20))

    def test_marginal_utility_violation(self, linear_rho1):
        with pytest.raises(UnboundedHamiltonian):
            solve_hjb(linear_rho1, ValueGrid.template(0.01, 10.0, 50))

    def test_iteration_budget(self, log_ak):
        cfg = SolveConfig(max_iters=3, scheme="upwind_explicit")
        with pytest.raises(NonConvergence) as info:
            solve_hjb(log_ak, ValueGrid.template(0.1, 10.0, 100), cfg)
        assert info.value.iterations == 3

    def test_grid_is_padded_above(self, log_ak):
        solver = HJBSolver(log_ak, ValueGrid.template(0.1, 10.0, 100)).build_grid()
        assert solver.k[-1] > 10.0
        assert solver.n_user == 100

    def test_ak_crra(self):
        model = make_ak_crra(0.1, 2.0, 0.05)
        value, certificate = solve_hjb(model, ValueGrid.template(0.1, 10.0, 400))
        target = closed_form_value(model).value(value.nodes[1:-1])
        error = np.max(np.abs(value.values[1:-1] - target)) / np.max(np.abs(target))
        assert error <= 1e-2
        assert certificate.increasing and certificate.concave

    def test_refinement_changes_shrink(self, log_ak):
        values = [solve_hjb(log_ak, ValueGrid.template(0.1, 10.0, n))[0] for n in (50, 99, 197)]
        changes = []
        for coarse, fine in zip(values, values[1:]):
            np.testing.assert_allclose(fine.nodes[::2], coarse.nodes, rtol=1e-12)
            changes.append(np.max(np.abs(fine.values[::2] - coarse.values)))
        assert changes[0] >= 1.5 * changes[1]

    def test_rck_shape(self, rck_solution):
        value, certificate = rck_solution
        assert certificate.increasing
        assert certificate.concave


class TestGrowthCondition:
    def test_violated_at_rho_one(self, linear_rho1):
        nodes = np.geomspace(0.01, 10.0, 50)
        report = check_class_V(linear_rho1, _linear_value(nodes))
        assert report.growth_condition.status == VIOLATED
        assert not report.in_class_V

    def test_satisfied_at_rho_two(self, linear_rho2):
        nodes = np.geomspace(0.01, 10.0, 50)
        report = check_class_V(linear_rho2, _linear_value(nodes))
        assert report.growth_condition.status == SATISFIED
        assert report.in_class_V

    def test_report_serializes(self, linear_rho2):
        data = check_class_V(linear_rho2, _linear_value(np.geomspace(0.01, 10.0, 50))).to_dict()
        assert data["growth_condition"]["status"] == SATISFIED
        assert len(data["residual_profile"]["k"]) == 48

    def test_default_horizon(self, linear_rho2):
        report = growth_condition(linear_rho2, _linear_value(np.geomspace(0.01, 10.0, 50)))
        assert report.horizon == pytest.approx(15.0)
        assert report.status == SATISFIED

    def test_slow_decay_above_tolerance_is_inconclusive(self, linear_rho2):
        # k̄ = 10: magnitudes 10·e^{-T} turun, tetapi 10·e^{-10} ≈ 4.5e-4 masih di atas growth_tol
        report = growth_condition(linear_rho2, _linear_value(np.geomspace(0.01, 10.0, 50)), horizon=10.0)
        k_bar, series, status = report.samples[-1]
        assert k_bar == pytest.approx(10.0)
        assert series[-1][1] > report.growth_tol
        assert status == INCONCLUSIVE
        assert report.status == INCONCLUSIVE

    def test_decay_below_tolerance_is_satisfied(self, linear_rho2):
        report = growth_condition(linear_rho2, _linear_value(np.geomspace(0.01, 10.0, 50)),
                                  horizon=10.0, growth_tol=1e-3)
        assert report.status == SATISFIED
