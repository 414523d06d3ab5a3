"""
Objective formulas of the geometric constants, their evaluation modes and
estimators, the modulus of convexity, and the values every constant takes on
Hilbert spaces.

Isosceles-constrained constants have two evaluation modes. Substituted mode
rewrites x ⊥_I y as x = u + v, y = u − v with u, v ∈ S_X, which turns the
constraint into an unconstrained problem on S_X × S_X. Direct mode evaluates
the raw definition on explicitly constructed isosceles pairs.
"""
import functools
import logging
import math

import numpy as np

from banach_constants.config import BanachConfig, default_opt_config, default_tolerances
from banach_constants.exceptions import (
    ContractViolation,
    DomainError,
    EstimationException,
    InfeasibleError,
    NearDegenerateError,
    NotAvailableError,
    NumericDegeneracy,
    SpecValidationError,
)
from banach_constants.models.models import (
    CONSTANT_IDS,
    DIRECT_IDS,
    ConstantQuery,
    Estimate,
    PairWitness,
)
from banach_constants.optimizer import (
    maximize_interval,
    maximize_pair_objective,
    minimize_interval,
    minimize_pair_objective,
)
from banach_constants.oracle import constrained_grid_sup_2d, grid_sup_2d
from banach_constants.orthogonality import (
    OrthoKind,
    independent_direction,
    isosceles_completion,
    isosceles_partners,
    isosceles_scales,
    orthogonality_test,
    plane_basis,
    plane_curve,
    refine_root,
)
from banach_constants.spaces import as_vector, boundary_point_2d, norm, sample_unit_vectors, unit
from banach_constants.utils import angle_grid, batched, sign_changes, zero_runs

logger = logging.getLogger(__name__)

RATIO_GRID = np.linspace(0.0, 1.0, 65)
LAMBDA_GRID_POINTS = 129
MODULUS_CANDIDATE_ROWS = 4

CONSTANT_INFO = {
    "C_NJ": ((), "von Neumann–Jordan constant sup (‖x+y‖²+‖x−y‖²)/(2‖x‖²+2‖y‖²)"),
    "C_NJ_prime": ((), "skew von Neumann–Jordan constant sup (‖x+y‖²+‖x−y‖²)/4 on S_X"),
    "A2": ((), "sup (‖x+y‖+‖x−y‖)/2 on S_X"),
    "J": ((), "sup ‖x+y‖ over isosceles-orthogonal x, y ∈ B_X"),
    "H": (("lam",), "sup (1+λ)/‖x+λy‖ over x ⊥_I y on S_X, λ ≥ 0"),
    "H_tilde": ((), "sup (‖x‖+‖y‖)/‖x+y‖ over isosceles-orthogonal pairs"),
    "H_tilde_sq": ((), "sup (‖x‖²+‖y‖²)/‖x+y‖² over isosceles-orthogonal pairs"),
    "E": (("t",), "sup ‖x+ty‖²+‖tx−y‖² on S_X"),
    "E_I": (("t",), "isosceles version of E(t)"),
    "L_YJ_prime": (("tau", "upsilon"), "skew constant sup (‖τx+υy‖²+‖υx−τy‖²)/(2(τ²+υ²))"),
    "L_YJ_I": (("tau", "upsilon"), "isosceles skew constant"),
    "C_NJ_I": ((), "isosceles von Neumann–Jordan constant"),
    "delta_X": (("eps",), "modulus of convexity inf 1 − ‖x+y‖/2, ‖x−y‖ = ε"),
    "A2_via_modulus": ((), "1 + sup (ε/2 − δ_X(ε)) over √2 ≤ ε < 2"),
}


def cli_name(constant):
    return constant.lower().replace("_", "-")


def constant_id(name):
    """
    Resolves a constant id or its CLI name (c-nj-prime) to the id (C_NJ_prime).
    """
    for candidate in CONSTANT_IDS:
        if name == candidate or name == cli_name(candidate):
            return candidate
    raise SpecValidationError("unknown constant %r" % name, "id")


def list_constants():
    """
    The stable constant vocabulary: ids, CLI names, parameters, modes.

    Returns:
        list of dicts
    """
    return [
        {
            "id": constant,
            "name": cli_name(constant),
            "params": list(CONSTANT_INFO[constant][0]),
            "modes": ["substituted", "direct"] if constant in DIRECT_IDS else ["substituted"],
            "description": CONSTANT_INFO[constant][1],
        }
        for constant in CONSTANT_IDS
    ]


def _guarded(numerator, denominator, scale):
    """
    numerator/denominator, refusing denominators below the degeneracy
    threshold relative to scale (NaN rows in a batch).
    """
    small = np.asarray(denominator) <= BanachConfig.DEGENERATE_DENOMINATOR * np.asarray(scale)
    if np.ndim(denominator) == 0:
        if small:
            raise NearDegenerateError(
                "denominator %.3g is degenerate at scale %.3g" % (denominator, scale)
            )
        return float(numerator / denominator)
    with np.errstate(all="ignore"):
        return np.where(small, np.nan, numerator / denominator)


def substituted_objective(space, q, tol=None):
    """
    The objective of q on S_X × S_X. Isosceles-constrained constants use the
    substitution x = u + v, y = u − v; their denominators are constants.
    """
    n = functools.partial(norm, space)
    kind = q.id

    if kind in ("C_NJ_prime", "H_tilde_sq"):

        def objective(a, b):
            return (n(a + b) ** 2 + n(a - b) ** 2) / 4.0

    elif kind in ("A2", "H_tilde"):

        def objective(a, b):
            return (n(a + b) + n(a - b)) / 2.0

    elif kind in ("E", "E_I", "L_YJ_I"):
        t = q.tau / q.upsilon if kind == "L_YJ_I" else q.t

        def objective(a, b):
            return n(a + t * b) ** 2 + n(t * a - b) ** 2

    elif kind == "L_YJ_prime":
        tau, upsilon = q.tau, q.upsilon
        denominator = 2.0 * (tau**2 + upsilon**2)

        def objective(a, b):
            return (n(tau * a + upsilon * b) ** 2 + n(upsilon * a - tau * b) ** 2) / denominator

    elif kind == "J":

        def objective(a, b):
            return 2.0 / np.maximum(n(a + b), n(a - b))

    elif kind == "C_NJ_I":

        def objective(a, b):
            return 4.0 / (n(a + b) ** 2 + n(a - b) ** 2)

    elif kind == "C_NJ":
        return batched(functools.partial(_cnj_best_ratio, space))
    elif kind == "H":
        return HObjective(space, tol, lam=q.param("lam"))
    else:
        raise ContractViolation("%s has no pair objective" % kind)

    return batched(objective)


def raw_objective(space, q):
    """
    The raw formula of an isosceles-constrained constant on a pair (x, y)
    assumed to satisfy x ⊥_I y.
    """
    n = functools.partial(norm, space)
    kind = q.id

    if kind == "H_tilde":

        def objective(x, y):
            nx, ny = n(x), n(y)
            return _guarded(nx + ny, n(x + y), nx + ny)

    elif kind == "H_tilde_sq":

        def objective(x, y):
            nx, ny = n(x), n(y)
            return _guarded(nx**2 + ny**2, n(x + y) ** 2, (nx + ny) ** 2)

    elif kind == "E_I":
        t = q.t

        def objective(x, y):
            numerator = n((t + 1) * x + (1 - t) * y) ** 2 + n((1 - t) * x - (t + 1) * y) ** 2
            return _guarded(numerator, n(x + y) ** 2, (n(x) + n(y)) ** 2)

    elif kind == "L_YJ_I":
        tau, upsilon = q.tau, q.upsilon

        def objective(x, y):
            numerator = (
                n((tau + upsilon) * x + (upsilon - tau) * y) ** 2
                + n((upsilon - tau) * x - (tau + upsilon) * y) ** 2
            )
            return _guarded(
                numerator, upsilon**2 * n(x + y) ** 2, upsilon**2 * (n(x) + n(y)) ** 2
            )

    elif kind in ("C_NJ_I", "C_NJ"):

        def objective(x, y):
            nx, ny = n(x), n(y)
            return _guarded(
                n(x + y) ** 2 + n(x - y) ** 2, 2.0 * (nx**2 + ny**2), (nx + ny) ** 2
            )

    elif kind == "J":

        def objective(x, y):
            nx, ny = n(x), n(y)
            return _guarded(n(x + y), np.maximum(nx, ny), nx + ny)

    else:
        raise ContractViolation("%s has no raw isosceles objective" % kind)

    return batched(objective)


def _cnj_ratios(space, a, b):
    a = np.asarray(a, dtype=float)[..., None, :]
    b = np.asarray(b, dtype=float)[..., None, :]
    r = RATIO_GRID[:, None]
    plus = norm(space, a + r * b)
    minus = norm(space, a - r * b)
    return (plus**2 + minus**2) / (2.0 * (1.0 + RATIO_GRID**2))


def _cnj_best_ratio(space, a, b):
    best = np.max(_cnj_ratios(space, a, b), axis=-1)
    return float(best) if np.ndim(best) == 0 else best


def _cnj_witness(space, a, b):
    r = float(RATIO_GRID[int(np.argmax(_cnj_ratios(space, a, b)))])
    return PairWitness(x=a, y=r * np.asarray(b), scale=r)


class DirectObjective(object):
    """
    Direct-mode objective on (a, b) ∈ S_X × S_X: the best raw value over the
    isosceles pairs (a, λb), λ ∈ {0} ∪ isosceles_scales(a, b), and the
    completion pair (a, αa + b).
    """

    batched = False

    def __init__(self, space, raw, tol=None):
        self._space = space
        self._raw = raw
        self._tol = tol or default_tolerances()

    def _candidates(self, a, b):
        a = as_vector(a, self._space.dim)
        b = as_vector(b, self._space.dim)
        scales = [0.0] + isosceles_scales(self._space, a, b, self._tol)
        partners = [lam * b for lam in scales]
        alpha = isosceles_completion(self._space, a, b, self._tol)
        partners.append(alpha * a + b)
        scales.append(None)
        return a, np.array(partners), scales

    def best(self, a, b):
        """
        Returns:
            (value, PairWitness of the raw pair attaining it)
        """
        a, partners, scales = self._candidates(a, b)
        values = np.asarray(
            self._raw(np.broadcast_to(a, partners.shape), partners), dtype=float
        )
        if not np.any(np.isfinite(values)):
            raise NearDegenerateError("no finite raw value at this pair")
        k = int(np.argmax(np.where(np.isfinite(values), values, -np.inf)))
        return float(values[k]), PairWitness(x=a, y=partners[k], scale=scales[k])

    def __call__(self, a, b):
        return self.best(a, b)[0]


class HObjective(object):
    """
    H on (a, b) ∈ S_X × S_X: over the isosceles partners ±y of a on the plane
    span{a, b} ∩ S_X, the best (1+λ)/‖a+λy‖ for λ ∈ [0, λ_max] (or at a fixed
    λ). λ = 0 always contributes 1.
    """

    batched = False

    def __init__(self, space, tol=None, lam=None):
        self._space = space
        self._tol = tol or default_tolerances()
        self._lam = lam

    def _partners(self, a, b):
        try:
            return isosceles_partners(self._space, a, b, self._tol)
        except ContractViolation:
            return isosceles_partners(self._space, a, independent_direction(a), self._tol)

    def _along(self, a, y):
        space = self._space
        if self._lam is not None:
            return (1.0 + self._lam) / norm(space, a + self._lam * y), self._lam

        def ratio(lams):
            return (1.0 + lams) / norm(space, a + np.multiply.outer(lams, y))

        value, lam, _ = maximize_interval(
            ratio, 0.0, self._tol.lambda_max, n_grid=LAMBDA_GRID_POINTS, vectorized=True
        )
        return value, lam

    def best(self, a, b):
        a = as_vector(a, self._space.dim)
        partners = self._partners(a, b)
        if not partners:
            raise InfeasibleError("no isosceles partner of a on the plane section")
        best = None
        for y in partners:
            for partner in (y, -y):
                value, lam = self._along(a, partner)
                if best is None or value > best[0]:
                    best = (float(value), partner, lam)
        value, partner, lam = best
        return value, PairWitness(x=a, y=partner, scale=lam)

    def __call__(self, a, b):
        return self.best(a, b)[0]


def _require_unit(space, tol, *vectors):
    for vector in vectors:
        if abs(norm(space, vector) - 1.0) > tol.eq_tol:
            raise ContractViolation("expected a unit vector, got norm %r" % norm(space, vector))


def _require_isosceles(space, tol, x, y):
    if not orthogonality_test(space, OrthoKind.ISOSCELES, x, y, tol):
        raise ContractViolation("direct mode needs an isosceles-orthogonal pair")


def _require_pair(x, y):
    if not np.any(x) and not np.any(y):
        raise ContractViolation("pair must satisfy (x, y) ≠ (0, 0)")


def evaluate_objective(space, q, a, b, tol=None):
    """
    Value of q's formula at one pair.

    Substituted mode expects a, b ∈ S_X (H additionally needs a ⊥_I b);
    direct mode expects a raw isosceles-orthogonal pair; C_NJ takes any
    non-zero pair and delta_X a pair with ‖a − b‖ = ε.
    """
    tol = tol or default_tolerances()
    a = as_vector(a, space.dim)
    b = as_vector(b, space.dim)
    if a.ndim != 1 or b.ndim != 1:
        raise ContractViolation("evaluate_objective takes single vectors")
    kind = q.id

    if kind == "A2_via_modulus":
        raise ContractViolation("A2_via_modulus has no pair objective")
    if kind == "delta_X":
        _require_unit(space, tol, a, b)
        if abs(norm(space, a - b) - q.eps) > tol.eq_tol * max(q.eps, 1.0):
            raise ContractViolation("delta_X needs ‖a − b‖ = ε")
        return 1.0 - norm(space, a + b) / 2.0
    if kind == "C_NJ":
        _require_pair(a, b)
        return raw_objective(space, q)(a, b)
    if kind == "H":
        _require_unit(space, tol, a, b)
        _require_isosceles(space, tol, a, b)
        return HObjective(space, tol, lam=q.param("lam"))._along(a, b)[0]
    if q.mode == "direct":
        _require_pair(a, b)
        _require_isosceles(space, tol, a, b)
        return raw_objective(space, q)(a, b)
    _require_unit(space, tol, a, b)
    return float(substituted_objective(space, q, tol)(a, b))


def hilbert_reference(q):
    """
    The exact value q takes on every Hilbert space.
    """
    kind = q.id
    if kind in ("C_NJ", "C_NJ_prime", "C_NJ_I", "H_tilde_sq", "L_YJ_prime"):
        return 1.0
    if kind in ("A2", "H_tilde", "J", "H"):
        return math.sqrt(2.0)
    if kind == "L_YJ_I":
        return 2.0 * (q.tau**2 + q.upsilon**2) / q.upsilon**2
    if kind in ("E", "E_I"):
        return 2.0 * (1.0 + q.t**2)
    raise NotAvailableError("no Hilbert reference value for %s" % kind)


def _seeded_maximum(space, objective, cfg):
    starts = []
    evals = 0
    if space.dim == 2 and cfg.grid_resolution:
        seed = grid_sup_2d(space, objective, cfg.grid_resolution)
        starts.append((seed.witness.x, seed.witness.y))
        evals = seed.evals
    estimate = maximize_pair_objective(space, objective, cfg, starts=starts)
    return estimate.replace(evals=estimate.evals + evals)


def _estimate_cnj(space, cfg):
    estimate = _seeded_maximum(space, substituted_objective(space, ConstantQuery(id="C_NJ")), cfg)
    return estimate.replace(witness=_cnj_witness(space, estimate.witness.x, estimate.witness.y))


def _screened_starts(space, objective, cfg):
    count = cfg.restarts * BanachConfig.CANDIDATES_PER_RESTART
    points = sample_unit_vectors(space, cfg.seed, 2 * count)
    pairs = list(zip(points[0::2], points[1::2]))
    values = []
    for a, b in pairs:
        try:
            values.append(objective(a, b))
        except NumericDegeneracy:
            values.append(-math.inf)
    order = np.argsort(-np.asarray(values), kind="stable")[: min(cfg.restarts, 8)]
    return [pairs[k] for k in order], len(pairs)


def _estimate_direct(space, q, cfg, tol):
    raw = raw_objective(space, q)
    objective = DirectObjective(space, raw, tol)
    seed = None
    if space.dim == 2:
        seed = constrained_grid_sup_2d(space, raw, cfg.direct_resolution, tol)
        starts = [(seed.witness.x, unit(space, seed.witness.y))]
        evals = seed.evals
    else:
        starts, evals = _screened_starts(space, objective, cfg)
    estimate = maximize_pair_objective(space, objective, cfg, starts=starts, random_starts=False)
    value, witness = objective.best(estimate.witness.x, estimate.witness.y)
    if seed is not None and seed.value > value:
        value, witness = seed.value, seed.witness
    return Estimate(
        value=value,
        witness=witness,
        cert="heuristic-lower-bound",
        evals=estimate.evals + evals,
    )


def _estimate_h(space, q, cfg, tol):
    if space.dim < 2:
        raise InfeasibleError("no isosceles-orthogonal pair on the sphere of a line")
    objective = HObjective(space, tol, lam=q.param("lam"))
    if space.dim == 2:
        thetas = angle_grid(cfg.grid_resolution or 64)
        firsts = boundary_point_2d(space, thetas)
        seconds = boundary_point_2d(space, thetas + np.pi / 2)
        values = [objective(a, b) for a, b in zip(firsts, seconds)]
        k = int(np.argmax(values))
        estimate = maximize_pair_objective(
            space, objective, cfg, starts=[(firsts[k], seconds[k])], random_starts=False
        )
        evals = estimate.evals + len(values)
    else:
        estimate = maximize_pair_objective(space, objective, cfg)
        evals = estimate.evals
    value, witness = objective.best(estimate.witness.x, estimate.witness.y)
    return Estimate(value=value, witness=witness, cert="heuristic-lower-bound", evals=evals)


def chord_partners(space, x, direction, eps, tol=None, samples=64):
    """
    Unit vectors y on the plane section span{x, direction} ∩ S_X with
    ‖x − y‖ = ε. The distance runs from 0 (φ = 0) to 2 (φ = ±π) along the
    section, so every ε ∈ (0, 2] has a solution on each half turn.

    Returns:
        list of unit vectors
    """
    tol = tol or default_tolerances()
    x = as_vector(x, space.dim)
    try:
        curve = _section(space, x, direction)
    except ContractViolation:
        curve = _section(space, x, independent_direction(x))
    phis = np.linspace(-np.pi, np.pi, 2 * samples + 1)
    gaps = norm(space, x - curve(phis)) - eps
    zero = np.abs(gaps) <= tol.eq_tol * max(eps, 1.0)

    angles = []
    for start, stop in zero_runs(zero):
        angles.extend({float(phis[start]), float(phis[stop])})
    for i in sign_changes(gaps, zero):
        root = refine_root(
            lambda phi: norm(space, x - curve(phi)) - eps,
            phis[i],
            phis[i + 1],
            tol.eq_tol * max(eps, 1.0),
        )
        if root is not None:
            angles.append(root)
    return [curve(phi) for phi in sorted(angles)]


def _section(space, x, direction):
    e1, e2 = plane_basis(x, direction)
    return functools.partial(plane_curve, space, e1, e2)


def _chord_minimum(space, x, direction, eps, tol, samples):
    """
    (value, y) minimizing 1 − ‖x + y‖/2 over the chord partners; value is
    +inf when the section holds none.
    """
    best = (math.inf, None)
    for y in chord_partners(space, x, direction, eps, tol, samples):
        value = 1.0 - norm(space, x + y) / 2.0
        if value < best[0]:
            best = (value, y)
    return best


def _modulus_2d(space, eps, cfg, tol):
    resolution = cfg.modulus_resolution
    thetas = angle_grid(resolution)
    points = boundary_point_2d(space, thetas)
    step = 2.0 * np.pi / resolution

    # rank rows by chord solutions interpolated on the node matrix
    offsets = (np.arange(resolution)[:, None] + np.arange(resolution + 1)[None, :]) % resolution
    others = points[offsets]
    gaps = norm(space, points[:, None, :] - others) - eps
    zero = np.abs(gaps) <= tol.eq_tol * max(eps, 1.0)
    zero[:, 0] = zero[:, -1] = False
    live = ~zero
    left, right = gaps[:, :-1], gaps[:, 1:]
    flips = (np.sign(left) * np.sign(right) < 0) & live[:, :-1] & live[:, 1:]
    rows, cols = np.nonzero(flips)
    fractions = left[rows, cols] / (left[rows, cols] - right[rows, cols])
    approx = boundary_point_2d(space, thetas[rows] + (cols + fractions) * step)
    row_best = np.full(resolution, np.inf)
    np.minimum.at(row_best, rows, 1.0 - norm(space, points[rows] + approx) / 2.0)
    zero_rows, zero_cols = np.nonzero(zero)
    if len(zero_rows):
        exact = 1.0 - norm(space, points[zero_rows] + others[zero_rows, zero_cols]) / 2.0
        np.minimum.at(row_best, zero_rows, exact)
    evals = gaps.size
    if not np.any(np.isfinite(row_best)):
        raise InfeasibleError("no pair with ‖x − y‖ = %g on the grid" % eps)

    def solve_row(theta):
        x = boundary_point_2d(space, theta)
        direction = np.array([-math.sin(theta), math.cos(theta)])
        value, y = _chord_minimum(space, x, direction, eps, tol, resolution // 2)
        return value, x, y

    best = (math.inf, None, None, None)
    for i in np.argsort(row_best, kind="stable")[:MODULUS_CANDIDATE_ROWS]:
        if not np.isfinite(row_best[i]):
            continue
        value, x, y = solve_row(thetas[i])
        evals += 1
        if value < best[0]:
            best = (value, x, y, thetas[i])
    if best[1] is None:
        raise InfeasibleError("chord solver found no pair with ‖x − y‖ = %g" % eps)

    refined = {}

    def h(theta):
        value, x, y = solve_row(theta)
        if y is not None and value < refined.get("value", math.inf):
            refined.update(value=value, x=x, y=y)
        return value

    theta = best[3]
    _, _, count = minimize_interval(h, theta - step, theta + step, n_grid=3, xatol=1e-10)
    evals += count
    if refined and refined["value"] < best[0]:
        return refined["value"], refined["x"], refined["y"], evals
    return best[0], best[1], best[2], evals


def _modulus_nd(space, eps, cfg, tol):
    def objective(a, b):
        return _chord_minimum(space, a, b, eps, tol, 64)[0]

    estimate = minimize_pair_objective(space, objective, cfg)
    a = estimate.witness.x
    value, y = _chord_minimum(space, a, estimate.witness.y, eps, tol, 64)
    if y is None:
        raise InfeasibleError("chord solver found no pair with ‖x − y‖ = %g" % eps)
    return value, a, y, estimate.evals


def modulus_estimate(space, eps, cfg=None, tol=None):
    """
    δ_X(ε) on S_X with the equality constraint ‖x − y‖ = ε. Every evaluated
    pair is feasible, so the value is an upper bound for the infimum.

    Returns:
        Estimate with cert heuristic-upper-bound and the attaining pair
    """
    cfg = cfg or default_opt_config()
    tol = tol or default_tolerances()
    eps = float(eps)
    if not 0.0 <= eps <= 2.0:
        raise DomainError("ε must lie in [0, 2]")
    if eps == 0.0:
        x = unit(space, np.eye(space.dim)[0])
        return Estimate(value=0.0, witness=PairWitness(x=x, y=x), cert="heuristic-upper-bound")
    if space.dim == 1:
        if eps < 2.0:
            raise InfeasibleError("on a line only ε ∈ {0, 2} is attainable")
        x = unit(space, np.ones(1))
        return Estimate(
            value=1.0, witness=PairWitness(x=x, y=-x), cert="heuristic-upper-bound", evals=1
        )
    if space.dim == 2:
        value, x, y, evals = _modulus_2d(space, eps, cfg, tol)
    else:
        value, x, y, evals = _modulus_nd(space, eps, cfg, tol)
    return Estimate(
        value=min(max(value, 0.0), 1.0),
        witness=PairWitness(x=x, y=y),
        cert="heuristic-upper-bound",
        evals=evals,
    )


def modulus_convexity(space, eps, cfg=None, tol=None):
    return modulus_estimate(space, eps, cfg, tol).value


def a2_via_modulus(space, cfg=None, tol=None):
    """
    1 + sup{ε/2 − δ_X(ε) : √2 ≤ ε < 2}, the half-open range evaluated on
    [√2, 2 − 1e-6]. δ_X is replaced by its running maximum along the ε grid,
    which keeps it non-decreasing.
    """
    cfg = cfg or default_opt_config()
    tol = tol or default_tolerances()
    eps_grid = np.linspace(
        math.sqrt(2.0), 2.0 - BanachConfig.MODULUS_EPS_INSET, BanachConfig.MODULUS_EPS_GRID
    )
    moduli = [modulus_estimate(space, eps, cfg, tol) for eps in eps_grid]
    evals = sum(m.evals for m in moduli)
    running = np.maximum.accumulate([m.value for m in moduli])
    gaps = eps_grid / 2.0 - running
    k = int(np.argmax(gaps))
    best_gap, best_witness = float(gaps[k]), moduli[k].witness

    def gap(eps):
        floor = running[int(np.searchsorted(eps_grid, eps, side="right")) - 1]
        modulus = modulus_estimate(space, eps, cfg, tol)
        return eps / 2.0 - max(modulus.value, floor)

    lo = eps_grid[max(k - 1, 0)]
    hi = eps_grid[min(k + 1, len(eps_grid) - 1)]
    refined_gap, refined_eps, count = maximize_interval(gap, lo, hi, n_grid=3, xatol=1e-8)
    evals += count
    if refined_gap > best_gap:
        best_gap = refined_gap
        best_witness = modulus_estimate(space, refined_eps, cfg, tol).witness
    return Estimate(
        value=1.0 + best_gap,
        witness=best_witness,
        cert="heuristic-lower-bound",
        evals=evals,
    )


def _dispatch(space, q, cfg, tol):
    if q.id == "delta_X":
        return modulus_estimate(space, q.eps, cfg, tol)
    if q.id == "A2_via_modulus":
        return a2_via_modulus(space, cfg, tol)
    if q.id == "H":
        return _estimate_h(space, q, cfg, tol)
    if q.mode == "direct":
        return _estimate_direct(space, q, cfg, tol)
    if q.id == "C_NJ":
        return _estimate_cnj(space, cfg)
    return _seeded_maximum(space, substituted_objective(space, q, tol), cfg)


def estimate_constant(space, q, cfg=None, tol=None):
    """
    Estimates q on space.

    Args:
        space : SpaceSpec
        q : ConstantQuery
        cfg (optional): OptConfig, defaults from BanachConfig
        tol (optional): ToleranceConfig, defaults from BanachConfig

    Returns:
        Estimate; suprema carry cert heuristic-lower-bound, δ_X carries
        heuristic-upper-bound
    """
    cfg = cfg or default_opt_config()
    tol = tol or default_tolerances()
    try:
        estimate = _dispatch(space, q, cfg, tol)
    except EstimationException:
        raise
    except NumericDegeneracy as e:
        raise EstimationException(str(e), space, q, cause=e) from e
    logger.info(
        "%s (%s) on %s: %.12g [%s, %d evaluations]",
        q.id,
        q.mode,
        space.label(),
        estimate.value,
        estimate.cert,
        estimate.evals,
    )
    return estimate


class ConstantRequest(object):
    """
    Encapsulates one estimation request: a space, a constant and its
    parameters. Parameters set to None are ignored, so optional CLI flags can
    be passed through unconditionally.
    """

    def __init__(self, space, constant, cfg=None, tol=None):
        """
        Args:
            space : SpaceSpec
            constant : constant id (C_NJ_prime) or CLI name (c-nj-prime)
            cfg (optional): OptConfig
            tol (optional): ToleranceConfig
        """
        self._space = space
        self._constant = constant_id(constant)
        self._cfg = cfg
        self._tol = tol
        self._params = {}

    def add_param(self, key, value):
        if key not in ConstantQuery.field_names() or key == "id":
            raise SpecValidationError("unknown parameter %r" % key, key)
        if value is not None:
            self._params[key] = value
        return self

    def add_params(self, params):
        if params is None:
            return self
        for key in params.keys():
            self.add_param(key, params[key])
        return self

    def query(self):
        return ConstantQuery(id=self._constant, **self._params)

    def execute(self):
        return estimate_constant(self._space, self.query(), self._cfg, self._tol)
