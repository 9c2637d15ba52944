"""Shared pytest fixtures."""
import copy

import numpy as np
import pytest

import config as cfg
from operator_basis import build_hermitian_basis
from scenario_io import demo_scenario


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def basis2():
    return build_hermitian_basis(2)


@pytest.fixture
def basis3():
    return build_hermitian_basis(3)


@pytest.fixture(scope="session")
def demo_doc():
    return demo_scenario()


@pytest.fixture(scope="session")
def product_doc():
    return demo_scenario(zero_correlations=True)


@pytest.fixture
def restore_tolerances():
    """Undo any tolerance override made during a test."""
    saved = copy.deepcopy(cfg.config.tolerances)
    yield
    cfg.config.override_tolerances(saved)
