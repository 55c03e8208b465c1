import numpy as np
import pytest

from besovflow.littlewood_paley import build_filters


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)


@pytest.fixture(scope="session")
def bank64():
    return build_filters(64)


@pytest.fixture(scope="session")
def bank256():
    return build_filters(256)
