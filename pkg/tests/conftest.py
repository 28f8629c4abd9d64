import pytest

from kahlap.catalog import TypeI, potential
from kahlap.geometry import metric_from_potential


@pytest.fixture(scope="session")
def type1_metric_order8():
    """The 2x2 matrix-domain metric at order 8; shared because it is the
    most expensive catalog build."""
    return metric_from_potential(potential(TypeI(2, 2), 8))


@pytest.fixture(scope="session")
def type1_metric_order10():
    return metric_from_potential(potential(TypeI(2, 2), 10))
