import numpy as np
import pytest

from superbath.lattice import BathParams
from superbath.selfenergy import EmitterConfig


@pytest.fixture
def bath():
    return BathParams(J=1.0, delta=1.0, N=64)


@pytest.fixture
def mbs_emitter():
    return EmitterConfig("A", (0, 0), 0.0, 0.5)


@pytest.fixture
def rng():
    return np.random.default_rng(20261015)
