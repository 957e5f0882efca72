import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def bloch_state(x, y, z):
    return 0.5 * np.array([[1 + z, x - 1j * y], [x + 1j * y, 1 - z]])
