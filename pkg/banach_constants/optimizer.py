"""
Multistart derivative-free search over S_X × S_X and over real intervals.

Every point handed to an objective is feasible, so the best evaluated value
of a maximization is a lower bound for the supremum (and dually for infima).
"""
import logging
import math

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from banach_constants.config import BanachConfig, default_opt_config
from banach_constants.exceptions import (
    ContractViolation,
    DegenerateInputError,
    DegenerateObjectiveError,
    NumericDegeneracy,
)
from banach_constants.models.models import Estimate, PairWitness
from banach_constants.spaces import as_vector, boundary_point_2d, norm, sample_unit_vectors, unit
from banach_constants.utils import derive_seed, is_batched, lexicographic_key

logger = logging.getLogger(__name__)

MAXIMIZE = 1.0
MINIMIZE = -1.0


class SphereChart(object):
    """
    Unconstrained coordinates for S_X × S_X: the two boundary angles in
    dimension 2, normalized ambient coordinates otherwise.
    """

    def __init__(self, space):
        self.space = space
        self.dim = space.dim

    def encode(self, a, b):
        if self.dim == 2:
            return np.array([math.atan2(a[1], a[0]), math.atan2(b[1], b[0])])
        return np.concatenate([a, b])

    def decode(self, params):
        if self.dim == 2:
            return (
                boundary_point_2d(self.space, params[0]),
                boundary_point_2d(self.space, params[1]),
            )
        return unit(self.space, params[: self.dim]), unit(self.space, params[self.dim :])


class _Tracker(object):
    """
    Wraps an objective, counting evaluations and keeping the best finite
    value with the exact pair that produced it.
    """

    def __init__(self, objective, sense):
        self.objective = objective
        self.sense = sense
        self.evals = 0
        self.best = None

    def record(self, value, a, b):
        if not math.isfinite(value):
            return
        if self.best is None or self.sense * value > self.sense * self.best[0]:
            self.best = (value, np.array(a, dtype=float), np.array(b, dtype=float))

    def __call__(self, a, b):
        self.evals += 1
        try:
            with np.errstate(all="ignore"):
                value = float(self.objective(a, b))
        except (NumericDegeneracy, ZeroDivisionError):
            value = math.nan
        self.record(value, a, b)
        return value

    def screen(self, pairs_a, pairs_b):
        """
        Evaluates candidate rows and returns the index of the best finite one
        (None when every candidate is non-finite).
        """
        if is_batched(self.objective):
            self.evals += len(pairs_a)
            with np.errstate(all="ignore"):
                values = np.asarray(self.objective(pairs_a, pairs_b), dtype=float).reshape(-1)
            for value, a, b in zip(values, pairs_a, pairs_b):
                self.record(float(value), a, b)
        else:
            values = np.array([self(a, b) for a, b in zip(pairs_a, pairs_b)], dtype=float)
        ranked = np.where(np.isfinite(values), self.sense * values, -np.inf)
        if not np.any(np.isfinite(values)):
            return None
        return int(np.argmax(ranked))


def _nelder_mead(fun, x0, step, cfg):
    n = len(x0)
    simplex = np.vstack([x0] + [x0 + step * row for row in np.eye(n)])
    return minimize(
        fun,
        x0,
        method="Nelder-Mead",
        options={
            "maxiter": cfg.max_iters,
            "xatol": cfg.opt_tol,
            "fatol": cfg.opt_tol,
            "initial_simplex": simplex,
        },
    )


def _local_search(chart, tracker, a, b, cfg):
    sense = tracker.sense

    def fun(params):
        try:
            x, y = chart.decode(params)
        except DegenerateInputError:
            return math.inf
        value = tracker(x, y)
        return -sense * value if math.isfinite(value) else math.inf

    first = _nelder_mead(fun, chart.encode(a, b), cfg.simplex_init, cfg)
    # restarting from the converged point escapes premature simplex collapse
    _nelder_mead(fun, np.asarray(first.x, dtype=float), cfg.simplex_init / 10.0, cfg)


def _run_restart(space, chart, objective, cfg, sense, index):
    tracker = _Tracker(objective, sense)
    count = BanachConfig.CANDIDATES_PER_RESTART
    points = sample_unit_vectors(space, derive_seed(cfg.seed, index), 2 * count)
    pairs_a, pairs_b = points[0::2], points[1::2]
    k = tracker.screen(pairs_a, pairs_b)
    if k is not None:
        _local_search(chart, tracker, pairs_a[k], pairs_b[k], cfg)
    return tracker


def _run_start(space, chart, objective, cfg, sense, start):
    a, b = _start_pair(space, start)
    tracker = _Tracker(objective, sense)
    tracker(a, b)
    _local_search(chart, tracker, a, b, cfg)
    return tracker


def _start_pair(space, start):
    if isinstance(start, PairWitness):
        a, b = start.x, start.y
    else:
        a, b = start
    a = as_vector(a, space.dim)
    b = as_vector(b, space.dim)
    for vector in (a, b):
        if abs(norm(space, vector) - 1.0) > 1e-6:
            raise ContractViolation("start pair must lie on the unit sphere")
    return a, b


def _estimate(trackers, sense, evals):
    outcomes = [t.best for t in trackers if t.best is not None]
    if not outcomes:
        raise DegenerateObjectiveError("objective was non-finite at every start")
    value, a, b = min(outcomes, key=lambda o: lexicographic_key(sense * o[0], o[1], o[2]))
    cert = "heuristic-lower-bound" if sense == MAXIMIZE else "heuristic-upper-bound"
    return Estimate(value=value, witness=PairWitness(x=a, y=b), cert=cert, evals=evals)


def _optimize(space, objective, cfg, sense, starts, random_starts):
    cfg = cfg or default_opt_config()
    chart = SphereChart(space)
    trackers = []
    if random_starts:
        for index in range(cfg.restarts):
            tracker = _run_restart(space, chart, objective, cfg, sense, index)
            if tracker.best is None:
                logger.debug("restart %d discarded: no finite objective value", index)
            trackers.append(tracker)
    for start in starts or ():
        trackers.append(_run_start(space, chart, objective, cfg, sense, start))
    if not trackers:
        raise ContractViolation("need random restarts or at least one explicit start")
    evals = sum(t.evals for t in trackers)
    estimate = _estimate(trackers, sense, evals)
    logger.debug(
        "%s over %s: %.12g after %d evaluations",
        "sup" if sense == MAXIMIZE else "inf",
        space.label(),
        estimate.value,
        evals,
    )
    return estimate


def maximize_pair_objective(space, objective, cfg=None, starts=None, random_starts=True):
    """
    Multistart Nelder–Mead maximization of objective over S_X × S_X.

    Args:
        space : SpaceSpec
        objective : callable (a, b) -> real; may carry the `batched` flag
        cfg : OptConfig; defaults from BanachConfig
        starts (optional): extra start pairs on S_X × S_X, searched after the
            random restarts
        random_starts : False searches the explicit starts only

    Returns:
        Estimate with cert heuristic-lower-bound
    """
    return _optimize(space, objective, cfg, MAXIMIZE, starts, random_starts)


def minimize_pair_objective(space, objective, cfg=None, starts=None, random_starts=True):
    return _optimize(space, objective, cfg, MINIMIZE, starts, random_starts)


def local_refine(space, objective, start, cfg=None, maximize=True):
    """
    Single local search from start (a PairWitness or an (a, b) pair on
    S_X × S_X). The start itself is evaluated first, so the result never
    falls below it.
    """
    cfg = cfg or default_opt_config()
    sense = MAXIMIZE if maximize else MINIMIZE
    tracker = _run_start(space, SphereChart(space), objective, cfg, sense, start)
    return _estimate([tracker], sense, tracker.evals)


def _interval_search(fn, lo, hi, sense, n_grid, xatol, vectorized):
    if not lo <= hi:
        raise ContractViolation("interval needs lo ≤ hi")
    grid = np.linspace(lo, hi, n_grid)
    with np.errstate(all="ignore"):
        if vectorized:
            values = np.asarray(fn(grid), dtype=float)
        else:
            values = np.array([fn(s) for s in grid], dtype=float)
    finite = np.isfinite(values)
    if not np.any(finite):
        raise DegenerateObjectiveError("objective was non-finite on the whole interval")
    k = int(np.argmax(np.where(finite, sense * values, -np.inf)))
    best_value, best_arg = float(values[k]), float(grid[k])
    evals = n_grid
    if n_grid > 1 and hi > lo:

        def scalar(s):
            with np.errstate(all="ignore"):
                value = float(np.asarray(fn(np.array([s]) if vectorized else s)).reshape(-1)[0])
            return -sense * value if math.isfinite(value) else math.inf

        refined = minimize_scalar(
            scalar,
            bounds=(grid[max(k - 1, 0)], grid[min(k + 1, n_grid - 1)]),
            method="bounded",
            options={"xatol": xatol},
        )
        evals += int(refined.nfev)
        if math.isfinite(refined.fun) and -refined.fun > sense * best_value:
            best_value, best_arg = float(-sense * refined.fun), float(refined.x)
    return best_value, best_arg, evals


def maximize_interval(fn, lo, hi, n_grid=65, xatol=1e-10, vectorized=False):
    """
    Grid scan plus bounded scalar refinement of fn on [lo, hi].

    Returns:
        (value, argument, evaluation count)
    """
    return _interval_search(fn, lo, hi, MAXIMIZE, n_grid, xatol, vectorized)


def minimize_interval(fn, lo, hi, n_grid=65, xatol=1e-10, vectorized=False):
    return _interval_search(fn, lo, hi, MINIMIZE, n_grid, xatol, vectorized)
