"""
Numerical estimation of geometric constants of finite-dimensional real
normed spaces, with a verifier for the identities relating them.
"""
from banach_constants.constants import ConstantRequest, estimate_constant, list_constants
from banach_constants.models.models import ConstantQuery, Estimate, OptConfig, SpaceSpec, ToleranceConfig
from banach_constants.verifier import check_identity, run_suite

__version__ = "0.1.0"
