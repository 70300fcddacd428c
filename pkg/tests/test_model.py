import math

import numpy as np
import pytest

from hjb_growth.errors import ModelDomainError, PreconditionError
from hjb_growth.model import (
    FAIL,
    PASS,
    UNKNOWN,
    ModelSpec,
    SamplingConfig,
    ScalarField2,
    ces_utility,
    central_difference,
    check_assumptions,
    crra_array,
    crra_eval,
    crra_utility,
    log_utility,
    make_ak,
    make_ak_crra,
    make_linear_counterexample,
    make_log_ak,
    make_magic_of_capital,
    make_rck_cobb_douglas,
    stationary_consumption,
)


BUILTIN_MODELS = [
    pytest.param(lambda: make_log_ak(0.1, 0.05), id="log_ak"),
    pytest.param(lambda: make_ak_crra(0.1, 2.0, 0.05), id="ak_crra"),
    pytest.param(lambda: make_rck_cobb_douglas(0.3, 0.05, 0.05), id="rck_cd"),
    pytest.param(lambda: make_rck_cobb_douglas(0.3, 0.05, 0.05, theta=2.0), id="rck_cd_theta2"),
    pytest.param(lambda: make_linear_counterexample(1.0), id="linear"),
    pytest.param(make_magic_of_capital, id="magic"),
    pytest.param(lambda: make_ak(0.1, ces_utility(0.5, 0.25), 0.05), id="ces"),
]


class TestCRRA:
    def test_log_branch(self):
        assert crra_eval(1.0, math.e) == pytest.approx(1.0)

    def test_power_branch(self):
        assert crra_eval(2.0, 2.0) == pytest.approx(0.5)
        assert crra_eval(0.5, 4.0) == pytest.approx(2.0)

    def test_continuous_across_log_branch(self):
        assert crra_eval(1.0 + 1e-9, 3.0) == pytest.approx(math.log(3.0), rel=1e-7)

    @pytest.mark.parametrize("theta", [1.0 - 1e-6, 1.0 + 1e-6])
    @pytest.mark.parametrize("x", [0.5, 1.0, 2.0, 10.0])
    def test_continuous_near_log_branch(self, theta, x):
        assert abs(crra_eval(theta, x) - math.log(x)) <= 1e-4

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.0, 5.0])
    def test_increasing_and_concave_on_triples(self, theta):
        rng = np.random.default_rng(3)
        x = np.sort(rng.uniform(0.1, 10.0, (3, 100)), axis=0)
        u = crra_array(theta, x)
        assert np.all(u[0] < u[1]) and np.all(u[1] < u[2])
        left = (u[1] - u[0]) / (x[1] - x[0])
        right = (u[2] - u[1]) / (x[2] - x[1])
        assert np.all(left >= right - 1e-10 * np.abs(left))
        mid = crra_array(theta, 0.5 * (x[0] + x[2]))
        assert np.all(mid >= 0.5 * (u[0] + u[2]) - 1e-12 * np.maximum(1.0, np.abs(mid)))

    def test_zero_below_one(self):
        assert crra_eval(0.5, 0.0) == pytest.approx(-2.0)

    def test_array_extended_real_at_zero(self):
        assert crra_array(2.0, np.array([0.0]))[0] == -np.inf

    @pytest.mark.parametrize("theta, x", [(1.0, 0.0), (2.0, 0.0), (0.5, -1.0)])
    def test_domain_errors(self, theta, x):
        with pytest.raises(ModelDomainError):
            crra_eval(theta, x)

    def test_theta_must_be_positive(self):
        with pytest.raises(PreconditionError):
            crra_eval(0.0, 1.0)


class TestScalarField2:
    def test_central_difference_matches_analytic(self):
        u = crra_utility(2.0)
        c = np.array([0.5, 1.0, 2.0, 7.0])
        k = np.ones_like(c)
        analytic = u.partial_x(c, k)
        numeric = central_difference(u, c, k, axis=0)
        np.testing.assert_allclose(numeric, analytic, rtol=1e-5)

    @pytest.mark.parametrize("factory", BUILTIN_MODELS)
    def test_builtin_partials_match_differences(self, factory):
        model = factory()
        rng = np.random.default_rng(17)
        k = np.exp(rng.uniform(np.log(model.k_lo), np.log(model.k_hi), 100))
        c = np.exp(rng.uniform(np.log(0.05), np.log(5.0), 100))
        for fld, x, y in ((model.utility, c, k), (model.technology, k, c)):
            assert fld.has_analytic_partials
            np.testing.assert_allclose(fld.partial_x(x, y), central_difference(fld, x, y, axis=0),
                                       rtol=1e-5, atol=1e-9)
            np.testing.assert_allclose(fld.partial_y(x, y), central_difference(fld, x, y, axis=1),
                                       rtol=1e-5, atol=1e-9)

    def test_missing_partials_fall_back_to_differences(self):
        fld = ScalarField2(eval=lambda k, c: k ** 0.5 - c)
        assert not fld.has_analytic_partials
        assert fld.partial_x(4.0, 1.0) == pytest.approx(0.25, rel=1e-5)
        assert fld.partial_y(4.0, 1.0) == pytest.approx(-1.0, rel=1e-5)

    def test_broadcasts(self):
        out = log_utility()(np.array([1.0, math.e]), 3.0)
        np.testing.assert_allclose(out, [0.0, 1.0])


class TestModelSpec:
    def test_domain_must_be_ordered(self):
        with pytest.raises(PreconditionError):
            ModelSpec(rho=0.05, utility=log_utility(),
                      technology=ScalarField2(eval=lambda k, c: k - c), k_domain=(1.0, 0.5), c_cap=1.0)

    def test_technology_must_vanish_at_origin(self):
        with pytest.raises(ModelDomainError):
            ModelSpec(rho=0.05, utility=log_utility(),
                      technology=ScalarField2(eval=lambda k, c: k - c + 1.0), k_domain=(0.1, 10.0),
                      c_cap=1.0)

    def test_log_ak_needs_gamma_above_rho(self):
        with pytest.raises(PreconditionError):
            make_log_ak(0.05, 0.1)

    def test_ak_crra_needs_finite_value(self):
        with pytest.raises(PreconditionError):
            make_ak_crra(0.1, 0.2, 0.05)

    def test_log_ak_family(self, log_ak):
        assert log_ak.family == "log_ak"
        assert log_ak.F(2.0, 0.1) == pytest.approx(0.1)

    def test_stationary_consumption(self, log_ak):
        k = np.array([0.5, 1.0, 4.0])
        np.testing.assert_allclose(stationary_consumption(log_ak, k), 0.1 * k, rtol=1e-10)

    def test_sampling_needs_eight_points(self):
        with pytest.raises(PreconditionError):
            SamplingConfig(n_k=4)


class TestAssumptions:
    def test_log_ak_report(self, log_ak, log_ak_a6):
        report = check_assumptions(log_ak, a6=log_ak_a6)
        statuses = {v.assumption: v.status for v in report.verdicts}
        assert statuses == {1: PASS, 2: PASS, 3: PASS, 4: UNKNOWN, 5: PASS, 6: PASS, 7: PASS}
        assert not report.any_failed

    def test_upper_bound_unknown_without_params(self, log_ak):
        assert check_assumptions(log_ak).status(6) == UNKNOWN

    def test_linear_counterexample_fails_only_marginal_utility(self, linear_rho1):
        report = check_assumptions(linear_rho1)
        assert report.failing() == [4]
        witness = report.verdict(4).witness
        assert witness is not None and "point" in witness

    def test_nonpositive_discount_reported(self):
        model = ModelSpec(rho=-0.1, utility=log_utility(),
                          technology=ScalarField2(eval=lambda k, c: 0.1 * k - c), k_domain=(0.1, 10.0),
                          c_cap=10.0)
        assert check_assumptions(model).status(1) == FAIL

    def test_rck_has_no_failures(self, rck):
        assert check_assumptions(rck).failing() == []

    def test_report_is_serializable(self, log_ak):
        data = check_assumptions(log_ak, SamplingConfig(n_k=8, n_c=8, n_pairs=16)).to_dict()
        assert data["sample_count"] == 64
        assert [v["assumption"] for v in data["verdicts"]] == list(range(1, 8))

    def test_ak_crra_bound_params(self):
        model = make_ak_crra(0.1, 2.0, 0.05)
        assert check_assumptions(model).status(1) == PASS

    def test_rck_cobb_douglas_alpha_range(self):
        with pytest.raises(PreconditionError):
            make_rck_cobb_douglas(1.2, 0.05, 0.05)
