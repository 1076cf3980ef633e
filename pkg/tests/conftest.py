import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quasitone import (
    CatState,
    FockState,
    MapConfig,
    build_regular,
    sample_field,
)


@pytest.fixture(scope="session")
def cfg():
    return MapConfig()


@pytest.fixture(scope="session")
def fock0_field():
    return sample_field(FockState(0), build_regular(-6, 6, -6, 6, 256, 256))


@pytest.fixture(scope="session")
def fock1_field():
    return sample_field(FockState(1), build_regular(-6, 6, -6, 6, 256, 256))


@pytest.fixture(scope="session")
def fock1_30_field():
    return sample_field(FockState(1), build_regular(-5, 5, -5, 5, 30, 30))


@pytest.fixture(scope="session")
def cat1_field():
    # grid centered on the lobe centroid at (-1, 0)
    return sample_field(CatState(-1.0), build_regular(-7, 5, -6, 6, 256, 256))
