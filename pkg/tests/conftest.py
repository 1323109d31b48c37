import numpy as np
import pytest
from hypothesis import settings

import anisotable as at
from anisotable.sampling import SchemeParams

# the whole suite is deterministic; keep hypothesis that way too
settings.register_profile("deterministic", derandomize=True)
settings.load_profile("deterministic")


def pytest_addoption(parser):
    parser.addoption(
        "--run-acceptance",
        action="store_true",
        default=False,
        help="run the full-scale acceptance criteria",
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-acceptance"):
        return
    skip = pytest.mark.skip(reason="needs --run-acceptance")
    for item in items:
        if "acceptance" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def model_1d_sym15():
    return at.validate(1.5, 1, at.ConstantDensity(1.0))


@pytest.fixture(scope="session")
def model_1d_asym08():
    return at.validate(0.8, 1, at.HemisphereDensity(np.array([1.0]), 2.0, 1.0))


@pytest.fixture(scope="session")
def model_2d_iso1():
    return at.validate(1.0, 2, at.ConstantDensity(1.0))


@pytest.fixture(scope="session")
def halfline_pos():
    return at.HalfSpace(np.array([1.0]))


@pytest.fixture(scope="session")
def halfline_neg():
    return at.HalfSpace(np.array([-1.0]))


@pytest.fixture()
def fast_scheme():
    return SchemeParams(eps=0.05, delta=1 / 64, small_jump_mode="gaussian")
