import numpy as np
import pytest

from fbgame.game import GameConfig


@pytest.fixture
def small_cfg():
    """Four users, four antennas, a 200-trial bank."""
    return GameConfig(n_s=4, n_t=4, mc_trials=200, master_seed=7)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
