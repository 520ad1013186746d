import pytest

from app.context import init_tower, reset_tower
from app.utils.pii_series import zero_param_solution


@pytest.fixture(scope="session", autouse=True)
def tower():
    """The process-wide tower every service module works in."""
    reset_tower()
    return init_tower()


@pytest.fixture(scope="session")
def zero_param_series(tower):
    # (lambda^(0), nu^(0)) through eta^-6
    return zero_param_solution(tower, 6)
