"""Shared fixtures.

The expensive session fixtures (full-size datasets, trained checkpoints at
the shipped defaults) are built once and reused by the acceptance suite;
unit tests use small purpose-built inputs instead.
"""

import numpy as np
import pytest

from ricsim import api
from ricsim.config import build_scenario, default_config
from ricsim.rng import child_seed
from ricsim.spectrum import make_dataset
from ricsim.surface import configure_ra


@pytest.fixture(scope="session")
def default_cfg():
    return default_config()


@pytest.fixture(scope="session")
def scenario(default_cfg):
    return build_scenario(default_cfg)


@pytest.fixture(scope="session")
def sensing_profile(default_cfg):
    return configure_ra(default_cfg.surface.n_elements, default_cfg.surface.n_absorb)


@pytest.fixture(scope="session")
def small_datasets(default_cfg, scenario, sensing_profile):
    """Reduced train/test datasets on the default scenario (fast, separable)."""
    seed = default_cfg.run.seed
    train = make_dataset(40, sensing_profile, scenario, child_seed(seed, "dataset-train"), 1024)
    test = make_dataset(25, sensing_profile, scenario, child_seed(seed, "dataset-test"), 1024)
    return train, test


@pytest.fixture(scope="session")
def trained_checkpoints(tmp_path_factory):
    """2- and 4-layer checkpoints trained at the shipped defaults via the API."""
    models_dir = tmp_path_factory.mktemp("models")
    responses = {}
    for layers in (2, 4):
        req = api.TrainRequest(checkpoint=str(models_dir / f"onn-{layers}layer.ckpt"), layers=layers)
        responses[layers] = api.handle_train(req)
    return models_dir, responses
