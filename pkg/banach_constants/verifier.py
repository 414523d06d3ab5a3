"""
Catalog of identities relating the constants (equalities, bounds,
characterizations of Hilbert spaces, sharpness examples) and the machinery
that checks them numerically on a corpus of spaces.
"""
import logging
import math

import numpy as np

from banach_constants.config import default_opt_config, default_tolerances
from banach_constants.constants import (
    estimate_constant,
    evaluate_objective,
    hilbert_reference,
)
from banach_constants.exceptions import (
    CatalogError,
    ContractViolation,
    EstimationException,
    NumericDegeneracy,
)
from banach_constants.models.models import ConstantQuery, IdentityReport, PairWitness
from banach_constants.spaces import is_inner_product, sample_function

logger = logging.getLogger(__name__)

HILBERT_MARGIN = 1e-2
MODULUS_TOL = 5e-3
EXACT_RELATIVE_TOL = 1e-12

# cert of closed-form sides and of values evaluated at an explicit pair
EXACT_CERT = "exact"

SKEW_DEFAULT = ({"tau": 1.0, "upsilon": 2.0},)
SKEW_SWEEP = ({"tau": 1.0, "upsilon": 2.0}, {"tau": 2.0, "upsilon": 1.0})
T_SWEEP = ({"t": 0.0}, {"t": 0.5}, {"t": 1.0}, {"t": 2.0})
L1_SWEEP = (
    {"tau": 1.0, "upsilon": 1.0},
    {"tau": 1.0, "upsilon": 2.0},
    {"tau": 2.0, "upsilon": 1.0},
)
NO_PARAMS = ({},)

CORE_SUITE = ("EQ-A2", "EQ-CNJ", "EQ-EI", "BD-H", "BD-LI", "HIL-1", "EX-L1")
SUITES = ("core", "full")


class Outcome(object):
    """
    Both sides of one identity as computed by its recipe, before a status is
    assigned.
    """

    def __init__(
        self, lhs, rhs, witnesses=(), notes="", details=None, status=None, tol=None, certs=(None, None)
    ):
        self.lhs = lhs
        self.rhs = rhs
        self.lhs_cert, self.rhs_cert = certs
        self.witnesses = [w for w in witnesses if w is not None]
        self.notes = notes
        self.details = details or {}
        self.status = status
        self.tol = tol


class Identity(object):
    """
    One catalog entry.

    Args:
        identity_id : catalog key, e.g. EQ-A2
        relation : equality, bound or observation
        recipe : callable (session, space, params) -> Outcome
        sweep : parameter dicts checked by run_suite
        applies : callable (space) -> bool
    """

    def __init__(self, identity_id, relation, recipe, sweep=NO_PARAMS, applies=None, summary=""):
        self.identity_id = identity_id
        self.relation = relation
        self.recipe = recipe
        self.sweep = sweep
        self.applies = applies or _planar_or_more
        self.summary = summary


def _planar_or_more(space):
    return space.dim >= 2


def _planar(space):
    return space.dim == 2


def _every_space(space):
    return True


def _is_l1(space):
    return space.family == "lp" and space.p == 1.0 and space.dim >= 2


def _is_sampled(space):
    return space.family == "discretized-sup"


class VerifierSession(object):
    """
    Encapsulates one verification run: budgets, tolerances and the estimates
    computed so far, memoized per (space, query) so identities sharing a
    constant reuse one estimate.
    """

    def __init__(self, cfg=None, tol=None):
        self.cfg = cfg or default_opt_config()
        self.tol = tol or default_tolerances()
        self._estimates = {}

    def estimate(self, space, constant, **params):
        query = ConstantQuery(id=constant, **params)
        key = (space.to_json(), query.to_json())
        if key not in self._estimates:
            self._estimates[key] = estimate_constant(space, query, self.cfg, self.tol)
        return self._estimates[key]

    def __len__(self):
        return len(self._estimates)


def _skew(params):
    return params["tau"], params["upsilon"]


def _eq_a2(session, space, params):
    lhs = session.estimate(space, "H_tilde", mode="direct")
    rhs = session.estimate(space, "A2")
    return Outcome(lhs.value, rhs.value, [lhs.witness, rhs.witness], certs=(lhs.cert, rhs.cert))


def _eq_cnj(session, space, params):
    lhs = session.estimate(space, "H_tilde_sq", mode="direct")
    rhs = session.estimate(space, "C_NJ_prime")
    return Outcome(lhs.value, rhs.value, [lhs.witness, rhs.witness], certs=(lhs.cert, rhs.cert))


def _eq_ei(session, space, params):
    lhs = session.estimate(space, "E_I", t=params["t"], mode="direct")
    rhs = session.estimate(space, "E", t=params["t"])
    return Outcome(lhs.value, rhs.value, [lhs.witness, rhs.witness], certs=(lhs.cert, rhs.cert))


def _eq_scale(session, space, params):
    tau, upsilon = _skew(params)
    skew = session.estimate(space, "L_YJ_prime", tau=tau, upsilon=upsilon)
    isosceles = session.estimate(space, "L_YJ_I", tau=tau, upsilon=upsilon)
    total = tau**2 + upsilon**2
    rhs = upsilon**2 / (2.0 * total) * isosceles.value
    printed = tau**2 / (2.0 * total) * isosceles.value
    tol = session.tol.verify_tol
    printed_holds = abs(skew.value - printed) <= tol
    corrected_holds = abs(skew.value - rhs) <= tol
    notes = "factor υ²/(2(τ²+υ²)): %s; printed factor τ²/(2(τ²+υ²)): %s (gap %.6g)" % (
        "holds" if corrected_holds else "fails",
        "holds" if printed_holds else "fails",
        abs(skew.value - printed),
    )
    return Outcome(
        skew.value,
        rhs,
        [skew.witness, isosceles.witness],
        notes=notes,
        certs=(skew.cert, isosceles.cert),
        details={
            "l_yj_i": isosceles.value,
            "printed_rhs": printed,
            "printed_gap": abs(skew.value - printed),
            "printed_status": "pass" if printed_holds else "fail",
        },
    )


def _eq_mod(session, space, params):
    lhs = session.estimate(space, "A2")
    rhs = session.estimate(space, "A2_via_modulus")
    return Outcome(
        lhs.value,
        rhs.value,
        [lhs.witness, rhs.witness],
        tol=max(session.tol.verify_tol, MODULUS_TOL),
        certs=(lhs.cert, rhs.cert),
    )


def _bd_h(session, space, params):
    estimate = session.estimate(space, "H_tilde")
    return Outcome(
        estimate.value,
        [math.sqrt(2.0), 2.0],
        [estimate.witness],
        certs=(estimate.cert, [EXACT_CERT, EXACT_CERT]),
    )


def _bd_li(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_I", tau=tau, upsilon=upsilon)
    lower = 2.0 * (tau**2 + upsilon**2) / upsilon**2
    upper = 2.0 * (tau + upsilon) ** 2 / upsilon**2
    return Outcome(
        estimate.value, [lower, upper], [estimate.witness], certs=(estimate.cert, [EXACT_CERT, EXACT_CERT])
    )


def _bd_sand(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_I", tau=tau, upsilon=upsilon)
    modified = session.estimate(space, "C_NJ_prime")
    classic = session.estimate(space, "C_NJ")
    lower = 4.0 * min(tau, upsilon) ** 2 / upsilon**2 * modified.value
    upper = 4.0 * (tau - upsilon) ** 2 / upsilon**2 + 8.0 * tau**2 / upsilon**2 * classic.value
    return Outcome(
        estimate.value,
        [lower, upper],
        [estimate.witness, modified.witness, classic.witness],
        details={"c_nj_prime": modified.value, "c_nj": classic.value},
        certs=(estimate.cert, [modified.cert, classic.cert]),
    )


def _bd_j(session, space, params):
    squared = session.estimate(space, "H_tilde_sq")
    james = session.estimate(space, "J")
    return Outcome(
        squared.value,
        [james.value**2 / 2.0, james.value],
        [squared.witness, james.witness],
        details={"j": james.value},
        certs=(squared.cert, [james.cert, james.cert]),
    )


def _bd_cnj(session, space, params):
    squared = session.estimate(space, "H_tilde_sq")
    classic = session.estimate(space, "C_NJ")
    return Outcome(
        squared.value,
        [None, classic.value],
        [squared.witness, classic.witness],
        certs=(squared.cert, [None, classic.cert]),
    )


def _bd_lyj(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_prime", tau=tau, upsilon=upsilon)
    return Outcome(
        estimate.value,
        [1.0, 1.0 + 2.0 * tau * upsilon / (tau**2 + upsilon**2)],
        [estimate.witness],
        certs=(estimate.cert, [EXACT_CERT, EXACT_CERT]),
    )


def _hilbert_pattern(space, estimate, reference):
    """
    Inner-product spaces must attain the reference value; every other space
    must exceed it by the strictness margin.
    """
    if is_inner_product(space):
        return Outcome(estimate.value, reference, [estimate.witness], certs=(estimate.cert, EXACT_CERT))
    return Outcome(
        estimate.value,
        [reference + HILBERT_MARGIN, None],
        [estimate.witness],
        notes="non-Hilbert space: strict excess of at least %g required" % HILBERT_MARGIN,
        certs=(estimate.cert, [EXACT_CERT, None]),
    )


def _hil_1(session, space, params):
    estimate = session.estimate(space, "H_tilde_sq")
    return _hilbert_pattern(space, estimate, hilbert_reference(ConstantQuery(id="H_tilde_sq")))


def _hil_2(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_I", tau=tau, upsilon=upsilon)
    reference = hilbert_reference(ConstantQuery(id="L_YJ_I", tau=tau, upsilon=upsilon))
    return _hilbert_pattern(space, estimate, reference)


def _ex_l1(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_I", tau=tau, upsilon=upsilon)
    x = np.zeros(space.dim)
    y = np.zeros(space.dim)
    x[:2] = (1.0, 1.0)
    y[:2] = (1.0, -1.0)
    query = ConstantQuery(id="L_YJ_I", tau=tau, upsilon=upsilon, mode="direct")
    at_witness = evaluate_objective(space, query, x, y, session.tol)
    return Outcome(
        estimate.value,
        2.0 * (tau + upsilon) ** 2 / upsilon**2,
        [estimate.witness, PairWitness(x=x, y=y)],
        details={"value_at_witness": at_witness},
        certs=(estimate.cert, EXACT_CERT),
    )


def _ex_c(session, space, params):
    tau, upsilon = _skew(params)
    alpha, beta = space.alpha, space.beta
    first = sample_function(space, lambda r: (r - beta) / (alpha - beta))
    second = sample_function(space, lambda r: 1.0 - (r - beta) / (alpha - beta))
    query = ConstantQuery(id="L_YJ_I", tau=tau, upsilon=upsilon, mode="direct")
    lhs = evaluate_objective(space, query, first, second, session.tol)
    rhs = 2.0 * (tau + upsilon) ** 2 / upsilon**2
    return Outcome(
        lhs,
        rhs,
        [PairWitness(x=first, y=second)],
        tol=EXACT_RELATIVE_TOL * max(1.0, abs(rhs)),
        certs=(EXACT_CERT, EXACT_CERT),
    )


def _obs_cnji(session, space, params):
    squared = session.estimate(space, "H_tilde_sq")
    isosceles = session.estimate(space, "C_NJ_I")
    tol = session.tol.verify_tol
    gap = squared.value - isosceles.value
    ordering = "=" if abs(gap) <= tol else ("<" if gap < 0 else ">")
    return Outcome(
        squared.value,
        isosceles.value,
        [squared.witness, isosceles.witness],
        notes="H̃² %s C^I_NJ" % ordering,
        certs=(squared.cert, isosceles.cert),
        details={
            "ordering": ordering,
            "infimum_form": 1.0 / isosceles.value,
            "inverse_h_tilde_sq": 1.0 / squared.value,
            "infimum_gap": 1.0 / isosceles.value - 1.0 / squared.value,
        },
        status="observed",
    )


def _obs_h(session, space, params):
    james = session.estimate(space, "H")
    tilde = session.estimate(space, "H_tilde")
    status = None if is_inner_product(space) else "observed"
    return Outcome(
        james.value,
        tilde.value,
        [james.witness, tilde.witness],
        notes="" if status is None else "H − H̃ = %.6g" % (james.value - tilde.value),
        details={"difference": james.value - tilde.value},
        certs=(james.cert, tilde.cert),
        status=status,
    )


def _bd_nsq(session, space, params):
    tau, upsilon = _skew(params)
    estimate = session.estimate(space, "L_YJ_prime", tau=tau, upsilon=upsilon)
    ceiling = 1.0 + 2.0 * tau * upsilon / (tau**2 + upsilon**2)
    distance = ceiling - estimate.value
    attained = abs(distance) <= session.tol.verify_tol
    return Outcome(
        estimate.value,
        ceiling,
        [estimate.witness],
        notes="upper bound %s" % ("attained (square space)" if attained else "not attained"),
        details={"distance": distance, "attained": attained},
        certs=(estimate.cert, EXACT_CERT),
        status="observed",
    )


CATALOG = dict(
    (identity.identity_id, identity)
    for identity in (
        Identity("EQ-A2", "equality", _eq_a2, summary="H̃ (direct) = A₂"),
        Identity("EQ-CNJ", "equality", _eq_cnj, summary="H̃² (direct) = C′_NJ"),
        Identity("EQ-EI", "equality", _eq_ei, T_SWEEP, summary="E_I(t) (direct) = E(t)"),
        Identity(
            "EQ-SCALE",
            "equality",
            _eq_scale,
            SKEW_SWEEP,
            summary="L′_YJ = υ²/(2(τ²+υ²)) L^I_YJ, printed τ² factor reported",
        ),
        Identity("EQ-MOD", "equality", _eq_mod, applies=_planar, summary="A₂ = 1 + sup(ε/2 − δ_X(ε))"),
        Identity("BD-H", "bound", _bd_h, summary="√2 ≤ H̃ ≤ 2"),
        Identity("BD-LI", "bound", _bd_li, SKEW_DEFAULT, summary="2(τ²+υ²)/υ² ≤ L^I_YJ ≤ 2(τ+υ)²/υ²"),
        Identity(
            "BD-SAND",
            "bound",
            _bd_sand,
            SKEW_SWEEP,
            summary="4min{τ,υ}²/υ² C′_NJ ≤ L^I_YJ ≤ 4(τ−υ)²/υ² + 8τ²/υ² C_NJ",
        ),
        Identity("BD-J", "bound", _bd_j, summary="J²/2 ≤ H̃² ≤ J"),
        Identity("BD-CNJ", "bound", _bd_cnj, summary="H̃² ≤ C_NJ"),
        Identity("BD-LYJ", "bound", _bd_lyj, SKEW_DEFAULT, summary="1 ≤ L′_YJ ≤ 1 + 2τυ/(τ²+υ²)"),
        Identity("HIL-1", "bound", _hil_1, applies=_every_space, summary="H̃² = 1 iff Hilbert"),
        Identity(
            "HIL-2",
            "bound",
            _hil_2,
            SKEW_DEFAULT,
            applies=_every_space,
            summary="L^I_YJ = 2(τ²+υ²)/υ² iff Hilbert",
        ),
        Identity("EX-L1", "equality", _ex_l1, L1_SWEEP, applies=_is_l1, summary="L^I_YJ(ℓ₁) = 2(τ+υ)²/υ²"),
        Identity(
            "EX-C",
            "equality",
            _ex_c,
            SKEW_DEFAULT,
            applies=_is_sampled,
            summary="C([α,β]) witness ratio = 2(τ+υ)²/υ²",
        ),
        Identity("OBS-CNJI", "observation", _obs_cnji, summary="H̃² versus C^I_NJ"),
        Identity("OBS-H", "observation", _obs_h, applies=_planar, summary="H versus H̃"),
        Identity("BD-NSQ", "observation", _bd_nsq, SKEW_DEFAULT, summary="L′_YJ versus its upper bound"),
    )
)


def catalog_ids():
    return sorted(CATALOG)


def _identity(identity_id):
    try:
        return CATALOG[identity_id]
    except KeyError:
        raise CatalogError("unknown identity %r" % identity_id) from None


def _status(outcome, tol):
    if outcome.status is not None:
        return outcome.status
    if isinstance(outcome.rhs, (list, tuple)):
        lower, upper = outcome.rhs
        holds = (lower is None or outcome.lhs >= lower - tol) and (
            upper is None or outcome.lhs <= upper + tol
        )
    else:
        holds = abs(outcome.lhs - outcome.rhs) <= tol
    return "pass" if holds else "fail"


def check_identity(space, identity_id, cfg=None, tol=None, params=None, session=None):
    """
    Computes both sides of one catalog identity on one space.

    Args:
        space : SpaceSpec
        identity_id : catalog key
        cfg (optional): OptConfig
        tol (optional): ToleranceConfig
        params (optional): τ, υ or t; defaults to the identity's first sweep entry
        session (optional): VerifierSession sharing estimates across calls

    Returns:
        IdentityReport
    """
    identity = _identity(identity_id)
    if not identity.applies(space):
        raise ContractViolation("%s does not apply to %s" % (identity_id, space.label()))
    session = session or VerifierSession(cfg, tol)
    params = dict(identity.sweep[0] if params is None else params)
    try:
        outcome = identity.recipe(session, space, params)
    except NumericDegeneracy as e:
        logger.warning("%s on %s is inconclusive: %s", identity_id, space.label(), e)
        return IdentityReport(
            identity_id=identity_id,
            space=space,
            tol=session.tol.verify_tol,
            status="inconclusive",
            notes="degenerate objective: %s"
            % (e.message() if isinstance(e, EstimationException) else e),
            params=params,
        )
    tol_used = session.tol.verify_tol if outcome.tol is None else outcome.tol
    status = _status(outcome, tol_used)
    report = IdentityReport(
        identity_id=identity_id,
        space=space,
        lhs=outcome.lhs,
        rhs=outcome.rhs,
        tol=tol_used,
        status=status,
        witnesses=outcome.witnesses,
        notes=outcome.notes,
        lhs_cert=outcome.lhs_cert,
        rhs_cert=outcome.rhs_cert,
        params=params,
        details=outcome.details,
    )
    if status == "fail":
        logger.warning("%s failed on %s: lhs=%r rhs=%r", identity_id, space.label(), outcome.lhs, outcome.rhs)
    else:
        logger.info("%s on %s: %s", identity_id, space.label(), status)
    return report


class SuiteCursor(object):
    """
    Iterates over the reports of a suite, checking one identity (with all of
    its parameter sweeps, across the corpus) per batch.
    """

    def __init__(self, spaces, identity_ids, session):
        """
        Args:
            spaces : list of SpaceSpec
            identity_ids : catalog keys in checking order
            session : VerifierSession shared by every check
        """
        self._spaces = list(spaces)
        self._pending = list(identity_ids)
        self._session = session
        self._queue = []

    def __repr__(self):
        return str(self._queue)

    def __len__(self):
        return len(self._queue)

    def __iter__(self):
        return self

    def __next__(self):
        while not self._queue:
            if not self.load_next_batch():
                raise StopIteration()
        return self._queue.pop(0)

    def load_next_batch(self):
        """
        Checks the next identity on every applicable space.

        Returns:
            bool: False once the catalog is exhausted
        """
        if not self._pending:
            return False
        identity = _identity(self._pending.pop(0))
        for space in self._spaces:
            if not identity.applies(space):
                continue
            for params in identity.sweep:
                self._queue.append(
                    check_identity(
                        space,
                        identity.identity_id,
                        params=params,
                        session=self._session,
                    )
                )
        return True


def suite_ids(suite):
    if suite == "core":
        return list(CORE_SUITE)
    if suite == "full":
        return catalog_ids()
    raise ContractViolation("suite must be one of %s" % ", ".join(SUITES))


def run_suite(spaces, suite="core", cfg=None, tol=None):
    """
    Checks every identity of the suite on every applicable space.

    Returns:
        list of IdentityReport sorted by (identity_id, space, params)
    """
    spaces = list(spaces)
    if not spaces:
        raise ContractViolation("run_suite needs at least one space")
    cursor = SuiteCursor(spaces, suite_ids(suite), VerifierSession(cfg, tol))
    return sorted(cursor, key=lambda report: report.sort_key())
