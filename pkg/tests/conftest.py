import pytest

from hjb_growth.hjb_solver import ValueGrid, solve_hjb
from hjb_growth.model import (
    Assumption6Params,
    make_linear_counterexample,
    make_log_ak,
    make_rck_cobb_douglas,
)


@pytest.fixture(scope="session")
def log_ak():
    return make_log_ak(0.1, 0.05)


@pytest.fixture(scope="session")
def log_ak_a6():
    return Assumption6Params(k_star=1.0, k_plus=1.0, c_star=0.0, gamma=0.1, delta=1.0, theta=1.0,
                             a=1.0, b=0.0, cc=0.0)


@pytest.fixture(scope="session")
def log_ak_solution(log_ak):
    """(ValueGrid, CertificateReport) pada [0.1, 10] × 400."""
    return solve_hjb(log_ak, ValueGrid.template(0.1, 10.0, 400))


@pytest.fixture(scope="session")
def rck():
    return make_rck_cobb_douglas(0.3, 0.05, 0.05)


@pytest.fixture(scope="session")
def rck_solution(rck):
    return solve_hjb(rck, ValueGrid.template(1.0, 10.0, 400))


@pytest.fixture
def linear_rho1():
    return make_linear_counterexample(1.0)


@pytest.fixture
def linear_rho2():
    return make_linear_counterexample(2.0)
