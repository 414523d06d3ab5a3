"""
Finite-dimensional normed spaces: norm evaluation per family, unit-sphere
utilities, seeded sampling and the builtin corpus.

Every function here is pure; SpaceSpec records are immutable, so calls are
safe from any number of threads.
"""
import logging
import math
import os

import numpy as np

from banach_constants.exceptions import (
    ContractViolation,
    DegenerateInputError,
    DomainError,
    SpecParseError,
)
from banach_constants.models.models import SpaceSpec
from banach_constants.object_parser import SpaceSpecParser

logger = logging.getLogger(__name__)


def as_vector(x, dim=None):
    """
    Coerces x to a float array and checks the Vector invariants.

    Args:
        x : sequence of reals, or a batch with coordinates on the last axis
        dim (optional): required length of the last axis

    Returns:
        numpy array
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        raise ContractViolation("a vector needs at least one coordinate")
    if dim is not None and x.shape[-1] != dim:
        raise ContractViolation(
            "dimension mismatch: got %d coordinates, space has dim %d" % (x.shape[-1], dim)
        )
    if not np.all(np.isfinite(x)):
        raise DomainError("vector entries must be finite")
    return x


def norm(space, x):
    """
    ‖x‖ for the space's family. A 1-D input returns a float; a batch returns
    one norm per row of the last axis.
    """
    x = as_vector(x, space.dim)
    if x.ndim == 1:
        return _norm_single(space, x)
    return _norm_batch(space, x)


def _lp_single(values, p):
    magnitudes = [abs(float(v)) for v in values]
    peak = max(magnitudes)
    if peak == 0.0:
        return 0.0
    if math.isinf(p):
        return peak
    if p == 1.0:
        return math.fsum(magnitudes)
    if p == 2.0:
        if 1e-100 < peak < 1e100:
            return math.sqrt(math.fsum(m * m for m in magnitudes))
        return peak * math.sqrt(math.fsum((m / peak) ** 2 for m in magnitudes))
    return peak * math.fsum((m / peak) ** p for m in magnitudes) ** (1.0 / p)


def _lp_batch(values, p):
    magnitudes = np.abs(values)
    if math.isinf(p):
        return np.max(magnitudes, axis=-1)
    if p == 1.0:
        return np.sum(magnitudes, axis=-1)
    if p == 2.0:
        return np.sqrt(np.sum(magnitudes * magnitudes, axis=-1))
    peak = np.max(magnitudes, axis=-1)
    safe = np.where(peak > 0, peak, 1.0)
    scaled = np.sum((magnitudes / safe[..., None]) ** p, axis=-1) ** (1.0 / p)
    return np.where(peak > 0, peak * scaled, 0.0)


def _norm_single(space, x):
    family = space.family
    if family == "lp":
        return _lp_single(x, space.p)
    if family == "weighted-lp":
        return _lp_single(space.weights * x, space.p)
    if family == "polyhedral":
        return float(np.max(np.abs(space.functionals @ x)))
    return float(np.max(np.abs(x)))


def _norm_batch(space, x):
    family = space.family
    if family == "lp":
        return _lp_batch(x, space.p)
    if family == "weighted-lp":
        return _lp_batch(x * space.weights, space.p)
    if family == "polyhedral":
        return np.max(np.abs(x @ space.functionals.T), axis=-1)
    return np.max(np.abs(x), axis=-1)


def unit(space, x):
    """
    x/‖x‖. Raises DegenerateInputError for the zero vector (or any zero row
    of a batch).
    """
    x = as_vector(x, space.dim)
    n = norm(space, x)
    if np.any(np.asarray(n) == 0.0):
        raise DegenerateInputError("cannot normalize the zero vector")
    if x.ndim == 1:
        return x / n
    return x / n[..., None]


def boundary_point_2d(space, theta):
    """
    The point of S_X in direction (cos θ, sin θ); θ may be a scalar or an
    array, the result is 2π-periodic in θ.
    """
    if space.dim != 2:
        raise ContractViolation("boundary_point_2d needs a 2-dimensional space")
    theta = np.asarray(theta, dtype=float)
    direction = np.stack([np.cos(theta), np.sin(theta)], axis=-1)
    return unit(space, direction)


def rng_for(seed):
    """
    The documented generator: numpy PCG64 seeded with a 64-bit unsigned
    integer. Streams are identical across platforms.
    """
    return np.random.Generator(np.random.PCG64(int(seed)))


def sample_unit_vectors(space, seed, n):
    """
    n unit vectors from normalized Gaussian directions (full support on the
    sphere), deterministic for a given seed.

    Returns:
        numpy array of shape (n, dim)
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ContractViolation("n must be a positive integer")
    draws = rng_for(seed).standard_normal((int(n), space.dim))
    # an exactly zero Gaussian row has probability zero; redraw it anyway
    while True:
        zero_rows = ~np.any(draws, axis=1)
        if not np.any(zero_rows):
            break
        draws[zero_rows] = rng_for(seed + 1).standard_normal((int(zero_rows.sum()), space.dim))
    return unit(space, draws)


def is_inner_product(space):
    if space.dim == 1:
        return True
    return space.family in ("lp", "weighted-lp") and space.p == 2.0


def sample_points(space):
    """
    Sample abscissae r_i = α + i(β − α)/(grid − 1) of a discretized-sup space.
    """
    if space.family != "discretized-sup":
        raise ContractViolation("sample_points needs a discretized-sup space")
    return np.linspace(space.alpha, space.beta, space.grid)


def sample_function(space, fn):
    return np.asarray(fn(sample_points(space)), dtype=float)


def parse_space_spec(text):
    return SpaceSpecParser.parse_single(text)


BUILTIN_SPACES = {
    "l2": lambda: SpaceSpec.lp(2, 2, name="l2"),
    "l2-3": lambda: SpaceSpec.lp(2, 3, name="l2-3"),
    "l1": lambda: SpaceSpec.lp(1, 2, name="l1"),
    "l1-3": lambda: SpaceSpec.lp(1, 3, name="l1-3"),
    "linf": lambda: SpaceSpec.lp("inf", 2, name="linf"),
    "l1.5": lambda: SpaceSpec.lp(1.5, 2, name="l1.5"),
    "l3": lambda: SpaceSpec.lp(3, 2, name="l3"),
    "octagon": lambda: SpaceSpec.regular_polygon(8, name="octagon"),
    "random-polyhedral": lambda: SpaceSpec.random_polyhedral(7, dim=2, count=5, name="random-polyhedral"),
    "c01": lambda: SpaceSpec.discretized_sup(16, 0.0, 1.0, name="c01"),
}

BUILTIN_CORPUS = ("l2", "l1", "linf", "l1.5", "l3", "octagon", "random-polyhedral")

VERIFY_CORPUS = BUILTIN_CORPUS + ("l1-3", "l2-3", "c01")


def builtin_space(name):
    try:
        return BUILTIN_SPACES[name]()
    except KeyError:
        raise SpecParseError("unknown builtin space %r" % name) from None


def list_builtin_spaces():
    return [builtin_space(name) for name in BUILTIN_SPACES]


def resolve_space(token):
    """
    Resolves a --space argument: builtin name, lp:<p>:<dim> shorthand, path
    to a JSON document, or inline JSON.
    """
    token = token.strip()
    if token in BUILTIN_SPACES:
        return builtin_space(token)
    if token.startswith(SpaceSpecParser.SHORTHAND_PREFIX):
        return SpaceSpecParser.parse_shorthand(token)
    if token.startswith("{"):
        return SpaceSpecParser.parse_single(token)
    if os.path.isfile(token):
        with open(token, "r", encoding="utf-8") as handle:
            return SpaceSpecParser.parse_single(handle.read())
    raise SpecParseError("cannot resolve space %r" % token)


def resolve_corpus(token):
    """
    Resolves a --spaces argument: a corpus file (JSON list), inline JSON, or
    comma-separated space tokens.
    """
    token = token.strip()
    if os.path.isfile(token):
        with open(token, "r", encoding="utf-8") as handle:
            text = handle.read()
        if text.lstrip().startswith("{") and '"spaces"' not in text:
            return [SpaceSpecParser.parse_single(text)]
        return SpaceSpecParser.parse_multiple(text)
    if token.startswith("["):
        return SpaceSpecParser.parse_multiple(token)
    if token.startswith("{"):
        return [SpaceSpecParser.parse_single(token)]
    return [resolve_space(part) for part in token.split(",") if part.strip()]
