import pytest

from banach_constants.config import default_opt_config, default_tolerances
from banach_constants.models.models import SpaceSpec
from banach_constants.spaces import BUILTIN_CORPUS, builtin_space


@pytest.fixture
def tol():
    return default_tolerances()


@pytest.fixture
def cfg():
    """
    Reduced search budget; the 2D estimators still seed from their grids.
    """
    return default_opt_config(
        restarts=8,
        seed=0,
        grid_resolution=64,
        direct_resolution=64,
        modulus_resolution=64,
    )


@pytest.fixture
def l2():
    return SpaceSpec.lp(2, 2)


@pytest.fixture
def l1():
    return SpaceSpec.lp(1, 2)


@pytest.fixture
def linf():
    return SpaceSpec.lp("inf", 2)


@pytest.fixture
def corpus():
    return [builtin_space(name) for name in BUILTIN_CORPUS]
