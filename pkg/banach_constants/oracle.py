"""
Brute-force evaluation on dense angle grids for 2-dimensional spaces.

Shares no search code with the optimizer: every grid node is evaluated and
the extreme node is reported, with the largest jump between neighbouring
nodes as a heuristic bound window.
"""
import functools
import logging

import numpy as np

from banach_constants.config import default_tolerances
from banach_constants.exceptions import ContractViolation, DegenerateObjectiveError, NumericDegeneracy
from banach_constants.models.models import Estimate, PairWitness
from banach_constants.orthogonality import isosceles_scales
from banach_constants.spaces import boundary_point_2d
from banach_constants.utils import angle_grid, is_batched

logger = logging.getLogger(__name__)


def _require_2d(space):
    if space.dim != 2:
        raise ContractViolation("grid oracles need a 2-dimensional space")


def _safe_value(objective, a, b):
    try:
        with np.errstate(all="ignore"):
            return float(objective(a, b))
    except (NumericDegeneracy, ZeroDivisionError):
        return np.nan


def _evaluate_grid(space, objective, resolution):
    points = boundary_point_2d(space, angle_grid(resolution))
    values = np.empty((resolution, resolution))
    if is_batched(objective):
        with np.errstate(all="ignore"):
            for i in range(resolution):
                row = np.broadcast_to(points[i], points.shape)
                values[i] = np.asarray(objective(row, points), dtype=float)
    else:
        for i in range(resolution):
            for j in range(resolution):
                values[i, j] = _safe_value(objective, points[i], points[j])
    return points, values


def _bound_window(values):
    jumps = []
    for axis in (0, 1):
        diff = np.abs(values - np.roll(values, 1, axis=axis))
        diff = diff[np.isfinite(diff)]
        if diff.size:
            jumps.append(float(diff.max()))
    return max(jumps) if jumps else 0.0


def _grid_extreme(space, objective, resolution, sense):
    _require_2d(space)
    points, values = _evaluate_grid(space, objective, resolution)
    finite = np.isfinite(values)
    skipped = int(values.size - finite.sum())
    if skipped:
        logger.debug("grid oracle skipped %d non-finite nodes on %s", skipped, space.label())
    if not finite.any():
        raise DegenerateObjectiveError("objective was non-finite at every grid node")
    ranked = np.where(finite, sense * values, -np.inf)
    # argmax returns the first maximal node in row-major order
    i, j = np.unravel_index(int(np.argmax(ranked)), values.shape)
    return Estimate(
        value=values[i, j],
        witness=PairWitness(x=points[i], y=points[j]),
        cert="grid-certified",
        evals=values.size,
        bound_window=_bound_window(values),
    )


def grid_sup_2d(space, objective, resolution):
    """
    Maximum of objective over the resolution × resolution grid of boundary
    angles. The grid nodes 2πk/resolution include every multiple of π/4, and
    grids of power-of-two resolutions are nested.

    Args:
        space : SpaceSpec with dim 2
        objective : callable (a, b) -> real, optionally `batched`
        resolution : positive multiple of 8

    Returns:
        Estimate with cert grid-certified and bound_window
    """
    return _grid_extreme(space, objective, resolution, 1.0)


def grid_inf_2d(space, objective, resolution):
    return _grid_extreme(space, objective, resolution, -1.0)


@functools.lru_cache(maxsize=32)
def isosceles_grid_pairs(space, resolution, tol=None):
    """
    All raw isosceles pairs (x, λy) of the constrained grid: x and y range
    over boundary points of the angle grid and λ over isosceles_scales(x, y).

    Returns:
        (xs, ys, scales) arrays; ys already carry the factor λ
    """
    _require_2d(space)
    tol = tol or default_tolerances()
    points = boundary_point_2d(space, angle_grid(resolution))
    xs, ys, scales = [], [], []
    for x in points:
        for y in points:
            for lam in isosceles_scales(space, x, y, tol):
                xs.append(x)
                ys.append(lam * y)
                scales.append(lam)
    logger.debug(
        "constrained grid on %s: %d isosceles pairs at resolution %d",
        space.label(),
        len(scales),
        resolution,
    )
    if not scales:
        empty = np.empty((0, 2))
        return empty, empty, np.empty(0)
    return np.array(xs), np.array(ys), np.array(scales)


def constrained_grid_sup_2d(space, objective, resolution, tol=None):
    """
    Maximum of a raw-pair objective over the isosceles pairs of the
    constrained grid; grid pairs admitting no isosceles scaling contribute
    nothing.
    """
    xs, ys, scales = isosceles_grid_pairs(space, resolution, tol)
    if not len(scales):
        raise DegenerateObjectiveError("no isosceles pair on the constrained grid")
    if is_batched(objective):
        with np.errstate(all="ignore"):
            values = np.asarray(objective(xs, ys), dtype=float)
    else:
        values = np.array([_safe_value(objective, x, y) for x, y in zip(xs, ys)])
    finite = np.isfinite(values)
    if not finite.any():
        raise DegenerateObjectiveError("objective was non-finite at every constrained pair")
    k = int(np.argmax(np.where(finite, values, -np.inf)))
    return Estimate(
        value=values[k],
        witness=PairWitness(x=xs[k], y=ys[k], scale=scales[k]),
        cert="grid-certified",
        evals=len(values),
    )
