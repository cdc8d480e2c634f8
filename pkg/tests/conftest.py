import numpy as np
import pytest

from qready import QuboInstance


@pytest.fixture
def toy_q() -> QuboInstance:
    """Two-variable instance with two degenerate minima at energy 0."""
    return QuboInstance(2, {(0, 0): 1.0, (0, 1): -2.0, (1, 1): 1.0})


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260810)


TOY_INSTANCE_TEXT = "2 3\n1 1 1\n1 2 -2\n2 2 1\n"
