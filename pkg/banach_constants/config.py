import os
from dotenv import load_dotenv

from banach_constants.models.models import OptConfig, ToleranceConfig

load_dotenv()


class BanachConfig(object):
    EQ_TOL = float(os.environ.get("BANACH_EQ_TOL", 1e-9))
    OPT_TOL = float(os.environ.get("BANACH_OPT_TOL", 1e-8))
    VERIFY_TOL = float(os.environ.get("BANACH_VERIFY_TOL", 1e-3))
    LAMBDA_MAX = float(os.environ.get("BANACH_LAMBDA_MAX", 16.0))

    RESTARTS = int(os.environ.get("BANACH_RESTARTS", 64))
    MAX_ITERS = int(os.environ.get("BANACH_MAX_ITERS", 400))
    SEED = int(os.environ.get("BANACH_SEED", 0))
    SIMPLEX_INIT = float(os.environ.get("BANACH_SIMPLEX_INIT", 0.25))
    GRID_RESOLUTION = int(os.environ.get("BANACH_GRID_RESOLUTION", 64))
    DIRECT_RESOLUTION = int(os.environ.get("BANACH_DIRECT_RESOLUTION", 128))
    MODULUS_RESOLUTION = int(os.environ.get("BANACH_MODULUS_RESOLUTION", 256))

    LOG_LEVEL = os.environ.get("BANACH_LOG_LEVEL", "WARNING")

    # fixed grid sizes of the orthogonality predicates and scale searches
    BIRKHOFF_GRID = 1024
    ROBERTS_GRID = 256
    SCALE_GRID = 512
    SCALE_REPRESENTATIVE_STRIDE = 8
    MODULUS_EPS_GRID = 64
    MODULUS_EPS_INSET = 1e-6
    DEGENERATE_DENOMINATOR = 1e-12
    CANDIDATES_PER_RESTART = 8


def default_tolerances(**overrides):
    data = {
        "eq_tol": BanachConfig.EQ_TOL,
        "opt_tol": BanachConfig.OPT_TOL,
        "verify_tol": BanachConfig.VERIFY_TOL,
        "lambda_max": BanachConfig.LAMBDA_MAX,
    }
    data.update(overrides)
    return ToleranceConfig(**data)


def default_opt_config(**overrides):
    data = {
        "restarts": BanachConfig.RESTARTS,
        "max_iters": BanachConfig.MAX_ITERS,
        "seed": BanachConfig.SEED,
        "simplex_init": BanachConfig.SIMPLEX_INIT,
        "opt_tol": BanachConfig.OPT_TOL,
        "grid_resolution": BanachConfig.GRID_RESOLUTION,
        "direct_resolution": BanachConfig.DIRECT_RESOLUTION,
        "modulus_resolution": BanachConfig.MODULUS_RESOLUTION,
    }
    data.update(overrides)
    return OptConfig(**data)
