import numpy as np
import pytest

from oamaoa.config import ExperimentConfig
from oamaoa.experiments import Scenario


@pytest.fixture(scope="session")
def config():
    return ExperimentConfig()


@pytest.fixture(scope="session")
def geom(config):
    return config.geometry()


@pytest.fixture(scope="session")
def scenario(config):
    return Scenario.from_config(config)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
