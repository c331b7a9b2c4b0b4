import numpy as np
import pytest

MOMENT_FIELDS = ("n1", "n2", "m1", "m2", "ms", "mc")
PARAM_FIELDS = ("z1", "z2", "r", "nu1", "nu2")


def moment_diff(a, b) -> float:
    return max(abs(getattr(a, f) - getattr(b, f)) for f in MOMENT_FIELDS)


def param_diff(a, b) -> float:
    return max(abs(getattr(a, f) - getattr(b, f)) for f in PARAM_FIELDS)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
