import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "repo",
    deadline=None,
    max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def rel(a, b):
    """Relative distance of ``a`` from ``b`` (absolute when ``b`` is zero)."""
    d = abs(complex(a) - complex(b))
    return d / abs(complex(b)) if b != 0 else d


@pytest.fixture
def rel_err():
    return rel
