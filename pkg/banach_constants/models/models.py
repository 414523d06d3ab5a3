import math

import numpy as np

from banach_constants.exceptions import ContractViolation, SpecValidationError
from banach_constants.models.abstract_record import AbstractRecord


FAMILIES = ("lp", "weighted-lp", "polyhedral", "discretized-sup")

CERTS = ("grid-certified", "heuristic-lower-bound", "heuristic-upper-bound")

STATUSES = ("pass", "fail", "inconclusive", "observed")

CONSTANT_IDS = (
    "C_NJ",
    "C_NJ_prime",
    "A2",
    "J",
    "H",
    "H_tilde",
    "H_tilde_sq",
    "E",
    "E_I",
    "L_YJ_prime",
    "L_YJ_I",
    "C_NJ_I",
    "delta_X",
    "A2_via_modulus",
)

# isosceles-constrained constants; the only ids accepting mode="direct"
DIRECT_IDS = ("H", "H_tilde", "H_tilde_sq", "E_I", "L_YJ_I", "C_NJ_I", "J")

SKEW_IDS = ("L_YJ_prime", "L_YJ_I")
T_IDS = ("E", "E_I")
EPS_IDS = ("delta_X",)
MODES = ("substituted", "direct")


def _is_int(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def _as_real(value, field):
    if isinstance(value, bool) or value is None:
        raise SpecValidationError("%s must be a number" % field, field)
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity", "+inf"):
            return math.inf
        raise SpecValidationError("%s must be a number" % field, field)
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise SpecValidationError("%s must be a number" % field, field) from None
    if math.isnan(value):
        raise SpecValidationError("%s must not be NaN" % field, field)
    return value


def _as_matrix(rows, field):
    try:
        matrix = np.array(rows, dtype=float)
    except (TypeError, ValueError):
        raise SpecValidationError("%s must be a list of numeric rows" % field, field) from None
    if matrix.ndim != 2 or matrix.shape[0] == 0:
        raise SpecValidationError("%s must be a non-empty list of rows" % field, field)
    if not np.all(np.isfinite(matrix)):
        raise SpecValidationError("%s entries must be finite" % field, field)
    return matrix


def _negation_closure(matrix):
    rows = []
    seen = set()
    for row in matrix:
        for candidate in (row, -row):
            key = tuple(float(v) + 0.0 for v in candidate)
            if key not in seen:
                seen.add(key)
                rows.append(candidate)
    return np.array(rows, dtype=float)


class SpaceSpec(AbstractRecord):
    """
    Descriptor of a finite-dimensional real normed space: a norm family plus
    its parameters. Construction validates every family invariant; polyhedral
    functionals are closed under negation automatically.
    """

    class Fields:
        family = "family"
        dim = "dim"
        p = "p"
        weights = "weights"
        functionals = "functionals"
        grid = "grid"
        alpha = "alpha"
        beta = "beta"
        name = "name"

    def __init__(
        self,
        family=None,
        dim=None,
        p=None,
        weights=None,
        functionals=None,
        grid=None,
        alpha=None,
        beta=None,
        name=None,
    ):
        if family not in FAMILIES:
            raise SpecValidationError(
                "family must be one of %s" % ", ".join(FAMILIES), "family"
            )
        data = {"family": family, "name": name}

        if family == "discretized-sup":
            if not _is_int(grid) or grid < 2:
                raise SpecValidationError("grid must be an integer ≥ 2", "grid")
            if dim is not None and dim != grid:
                raise SpecValidationError("dim must equal grid for discretized-sup", "dim")
            dim = int(grid)
            alpha = 0.0 if alpha is None else _as_real(alpha, "alpha")
            beta = 1.0 if beta is None else _as_real(beta, "beta")
            if not (math.isfinite(alpha) and math.isfinite(beta) and alpha < beta):
                raise SpecValidationError("alpha < beta must be finite reals", "alpha")
            data.update(grid=dim, alpha=alpha, beta=beta)
        else:
            for key, value in (("grid", grid), ("alpha", alpha), ("beta", beta)):
                if value is not None:
                    raise SpecValidationError(
                        "%s is not allowed for family %s" % (key, family), key
                    )

        if not _is_int(dim) or dim < 1:
            raise SpecValidationError("dim must be a positive integer", "dim")
        data["dim"] = int(dim)

        if family in ("lp", "weighted-lp"):
            p = _as_real(p, "p")
            if p < 1:
                raise SpecValidationError("p must be ≥ 1", "p")
            data["p"] = p
        elif p is not None:
            raise SpecValidationError("p is not allowed for family %s" % family, "p")

        if family == "weighted-lp":
            if weights is None:
                raise SpecValidationError("weights are required for weighted-lp", "weights")
            w = np.array(weights, dtype=float).reshape(-1)
            if w.shape[0] != dim:
                raise SpecValidationError("weights count must equal dim", "weights")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise SpecValidationError("weights must be finite and > 0", "weights")
            data["weights"] = w
        elif weights is not None:
            raise SpecValidationError(
                "weights are not allowed for family %s" % family, "weights"
            )

        if family == "polyhedral":
            if functionals is None:
                raise SpecValidationError(
                    "functionals are required for polyhedral", "functionals"
                )
            matrix = _as_matrix(functionals, "functionals")
            if matrix.shape[1] != dim:
                raise SpecValidationError("every functional must have dim entries", "functionals")
            matrix = _negation_closure(matrix)
            if np.linalg.matrix_rank(matrix) < dim:
                raise SpecValidationError(
                    "functionals must be closed under negation and span the space (rank < dim)",
                    "functionals",
                )
            data["functionals"] = matrix
        elif functionals is not None:
            raise SpecValidationError(
                "functionals are not allowed for family %s" % family, "functionals"
            )

        super().__init__(**data)

    def label(self):
        if self.name:
            return self.name
        if self.family == "lp":
            p = "inf" if math.isinf(self.p) else ("%g" % self.p)
            return "lp:%s:%d" % (p, self.dim)
        if self.family == "weighted-lp":
            p = "inf" if math.isinf(self.p) else ("%g" % self.p)
            return "weighted-lp:%s:%d" % (p, self.dim)
        if self.family == "polyhedral":
            return "polyhedral:%d:%d" % (len(self.functionals), self.dim)
        return "discretized-sup:%d" % self.grid

    @classmethod
    def lp(cls, p, dim, name=None):
        return cls(family="lp", p=p, dim=dim, name=name)

    @classmethod
    def weighted_lp(cls, p, weights, name=None):
        return cls(family="weighted-lp", p=p, dim=len(weights), weights=weights, name=name)

    @classmethod
    def polyhedral(cls, functionals, name=None):
        matrix = _as_matrix(functionals, "functionals")
        return cls(family="polyhedral", dim=matrix.shape[1], functionals=matrix, name=name)

    @classmethod
    def regular_polygon(cls, sides, name=None):
        """
        Polyhedral norm whose unit ball is the regular polygon with the given
        (even) number of sides and inradius 1; functionals at angles 2πk/sides.
        """
        if not _is_int(sides) or sides < 4 or sides % 2:
            raise SpecValidationError("sides must be an even integer ≥ 4", "sides")
        angles = np.arange(sides // 2) * (2.0 * np.pi / sides)
        functionals = np.column_stack([np.cos(angles), np.sin(angles)])
        return cls.polyhedral(functionals, name=name)

    @classmethod
    def random_polyhedral(cls, seed, dim=2, count=5, name=None):
        rng = np.random.Generator(np.random.PCG64(seed))
        while True:
            directions = rng.standard_normal((count, dim))
            lengths = rng.uniform(0.5, 1.5, size=count)
            directions /= np.linalg.norm(directions, axis=1)[:, None]
            functionals = directions * lengths[:, None]
            if np.linalg.matrix_rank(functionals) == dim:
                return cls.polyhedral(functionals, name=name)

    @classmethod
    def discretized_sup(cls, grid, alpha=0.0, beta=1.0, name=None):
        return cls(family="discretized-sup", grid=grid, alpha=alpha, beta=beta, name=name)


class ToleranceConfig(AbstractRecord):
    """
    The numeric tolerance ladder shared by predicates, optimizers and the
    verifier: 0 < eq_tol ≤ opt_tol ≤ verify_tol < 1 and lambda_max > 1.
    """

    class Fields:
        eq_tol = "eq_tol"
        opt_tol = "opt_tol"
        verify_tol = "verify_tol"
        lambda_max = "lambda_max"

    def _validate(self):
        for key in ("eq_tol", "opt_tol", "verify_tol", "lambda_max"):
            _as_real(self._data.get(key), key)
        if not 0 < self.eq_tol <= self.opt_tol <= self.verify_tol < 1:
            raise SpecValidationError(
                "tolerances must satisfy 0 < eq_tol ≤ opt_tol ≤ verify_tol < 1", "eq_tol"
            )
        if not (self.lambda_max > 1 and math.isfinite(self.lambda_max)):
            raise SpecValidationError("lambda_max must be a finite real > 1", "lambda_max")


class OptConfig(AbstractRecord):
    class Fields:
        restarts = "restarts"
        max_iters = "max_iters"
        seed = "seed"
        simplex_init = "simplex_init"
        opt_tol = "opt_tol"
        grid_resolution = "grid_resolution"
        direct_resolution = "direct_resolution"
        modulus_resolution = "modulus_resolution"

    def _validate(self):
        if not _is_int(self._data.get("restarts")) or self.restarts < 1:
            raise SpecValidationError("restarts must be an integer ≥ 1", "restarts")
        if not _is_int(self._data.get("max_iters")) or self.max_iters < 1:
            raise SpecValidationError("max_iters must be an integer ≥ 1", "max_iters")
        if not _is_int(self._data.get("seed")) or not 0 <= self.seed < 2**64:
            raise SpecValidationError("seed must be a 64-bit unsigned integer", "seed")
        if not _as_real(self._data.get("simplex_init"), "simplex_init") > 0:
            raise SpecValidationError("simplex_init must be > 0", "simplex_init")
        if not _as_real(self._data.get("opt_tol"), "opt_tol") > 0:
            raise SpecValidationError("opt_tol must be > 0", "opt_tol")
        for key in ("grid_resolution", "direct_resolution", "modulus_resolution"):
            value = self._data.get(key)
            if not _is_int(value) or value < 0 or value % 8:
                raise SpecValidationError("%s must be 0 or a multiple of 8" % key, key)
        if self.direct_resolution == 0 or self.modulus_resolution == 0:
            raise SpecValidationError(
                "direct_resolution and modulus_resolution must be positive",
                "direct_resolution",
            )


class PairWitness(AbstractRecord):
    """
    A concrete pair (x, y) attaining or approaching a supremum; scale holds
    the λ of x ⊥_I λy when the definition carries one.
    """

    class Fields:
        x = "x"
        y = "y"
        scale = "scale"

    def __init__(self, x=None, y=None, scale=None):
        x = np.array(x, dtype=float).reshape(-1)
        y = np.array(y, dtype=float).reshape(-1)
        if x.shape != y.shape:
            raise ContractViolation("witness vectors must have equal dimension")
        if not np.any(x) and not np.any(y):
            raise ContractViolation("witness pair must satisfy (x, y) ≠ (0, 0)")
        super().__init__(x=x, y=y, scale=None if scale is None else float(scale))


class Estimate(AbstractRecord):
    class Fields:
        value = "value"
        witness = "witness"
        cert = "cert"
        evals = "evals"
        bound_window = "bound_window"

    def __init__(self, value=None, witness=None, cert=None, evals=0, bound_window=None):
        if cert not in CERTS:
            raise ContractViolation("cert must be one of %s" % ", ".join(CERTS))
        if isinstance(witness, dict):
            witness = PairWitness(**witness)
        super().__init__(
            value=float(value),
            witness=witness,
            cert=cert,
            evals=int(evals),
            bound_window=None if bound_window is None else float(bound_window),
        )


class ConstantQuery(AbstractRecord):
    """
    Which constant to estimate, with its parameters and evaluation mode.
    Parameters irrelevant to the chosen id are dropped.
    """

    class Fields:
        id = "id"
        tau = "tau"
        upsilon = "upsilon"
        t = "t"
        eps = "eps"
        lam = "lam"
        mode = "mode"

    def __init__(self, id=None, tau=None, upsilon=None, t=None, eps=None, lam=None, mode=None):
        if id not in CONSTANT_IDS:
            raise SpecValidationError(
                "constant id must be one of %s" % ", ".join(CONSTANT_IDS), "id"
            )
        mode = mode or "substituted"
        if mode not in MODES:
            raise SpecValidationError("mode must be substituted or direct", "mode")
        if mode == "direct" and id not in DIRECT_IDS:
            raise SpecValidationError(
                "direct mode is only valid for isosceles-constrained constants", "mode"
            )
        data = {"id": id, "mode": mode}
        if id in SKEW_IDS:
            for key, value in (("tau", tau), ("upsilon", upsilon)):
                if value is None:
                    raise SpecValidationError("%s is required for %s" % (key, id), key)
                value = _as_real(value, key)
                if not (value > 0 and math.isfinite(value)):
                    raise SpecValidationError("%s must be a finite real > 0" % key, key)
                data[key] = value
        if id in T_IDS:
            if t is None:
                raise SpecValidationError("t is required for %s" % id, "t")
            t = _as_real(t, "t")
            if not (t >= 0 and math.isfinite(t)):
                raise SpecValidationError("t must be a finite real ≥ 0", "t")
            data["t"] = t
        if id in EPS_IDS:
            if eps is None:
                raise SpecValidationError("eps is required for %s" % id, "eps")
            eps = _as_real(eps, "eps")
            if not 0 <= eps <= 2:
                raise SpecValidationError("eps must lie in [0, 2]", "eps")
            data["eps"] = eps
        if id == "H" and lam is not None:
            lam = _as_real(lam, "lam")
            if not (lam >= 0 and math.isfinite(lam)):
                raise SpecValidationError("lam must be a finite real ≥ 0", "lam")
            data["lam"] = lam
        super().__init__(**data)

    def param(self, key, default=None):
        return self._data.get(key, default)


class IdentityReport(AbstractRecord):
    """
    Outcome of one catalog identity on one space. rhs is a number for
    equalities and a [lo, hi] pair for bounds (None marks an open side).
    lhs_cert and rhs_cert mirror that shape: the cert of the Estimate behind
    each side, or "exact" for closed forms.
    """

    class Fields:
        identity_id = "identity_id"
        space = "space"
        lhs = "lhs"
        rhs = "rhs"
        tol = "tol"
        status = "status"
        witnesses = "witnesses"
        notes = "notes"
        params = "params"
        details = "details"
        lhs_cert = "lhs_cert"
        rhs_cert = "rhs_cert"

    def __init__(
        self,
        identity_id=None,
        space=None,
        lhs=None,
        rhs=None,
        tol=None,
        status=None,
        witnesses=(),
        notes="",
        params=None,
        details=None,
        lhs_cert=None,
        rhs_cert=None,
    ):
        if status not in STATUSES:
            raise ContractViolation("status must be one of %s" % ", ".join(STATUSES))
        super().__init__(
            identity_id=identity_id,
            space=space,
            lhs=None if lhs is None else float(lhs),
            rhs=rhs,
            tol=float(tol),
            status=status,
            witnesses=tuple(witnesses),
            notes=notes,
            params=dict(params or {}),
            details=dict(details or {}),
            lhs_cert=lhs_cert,
            rhs_cert=list(rhs_cert) if isinstance(rhs_cert, (list, tuple)) else rhs_cert,
        )

    def sort_key(self):
        return (
            self.identity_id,
            self.space.label() if self.space is not None else "",
            sorted(self.params.items()),
        )
