import numpy as np
import pytest

from renewal_opt.models import FileDownloadModel, deterministic_model, synthetic_from_config
from renewal_opt.tests.helpers import recorded_run, two_action_table


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def file_model():
    return FileDownloadModel()


@pytest.fixture
def reward_model():
    return FileDownloadModel(penalty="reward", shift="auto")


@pytest.fixture
def unit_model():
    """One event, one action, outcome always (y=1, T=1, z=(0)), c=(1)."""
    return deterministic_model(y=1.0, T=1.0, z=[0.0], c=[1.0])


@pytest.fixture
def mixing_model():
    """Binding constraint: actions (0, 1, (2)) and (10, 1, (0)) with c=(1); optimum mixes 50/50."""
    return synthetic_from_config(two_action_table((0.0, 1.0, (2.0,)), (10.0, 1.0, (0.0,))))


@pytest.fixture
def short_run(reward_model):
    """2000 recorded frames of the shifted reward model at V=100, delta=0.7."""
    series, _ = recorded_run(reward_model, 2000)
    return series
