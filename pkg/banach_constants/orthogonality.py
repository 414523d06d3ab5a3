"""
Orthogonality relations in normed spaces (isosceles, Pythagorean,
Birkhoff–James, Roberts), the isosceles defect, the (u, v) substitution that
parametrizes isosceles pairs, and solvers producing isosceles-orthogonal
pairs: scalings x ⊥_I λy, sphere partners and completions x ⊥_I (αx + z).

Tolerances are relative, scaled by max(norms, 1).
"""
import enum
import logging

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from banach_constants.config import BanachConfig, default_tolerances
from banach_constants.exceptions import ContractViolation, InfeasibleError
from banach_constants.models.models import PairWitness
from banach_constants.spaces import as_vector, norm, unit
from banach_constants.utils import run_representatives, sign_changes, zero_runs

logger = logging.getLogger(__name__)


class OrthoKind(enum.Enum):
    ISOSCELES = "isosceles"
    PYTHAGOREAN = "pythagorean"
    BIRKHOFF = "birkhoff"
    ROBERTS = "roberts"


def iso_defect(space, x, y):
    """
    ‖x + y‖ − ‖x − y‖; zero exactly when x ⊥_I y. Works on batches.
    """
    x = as_vector(x, space.dim)
    y = as_vector(y, space.dim)
    return norm(space, x + y) - norm(space, x - y)


def _within(defect, scale, tol):
    return np.abs(defect) <= tol.eq_tol * scale


def orthogonality_test(space, kind, x, y, tol=None):
    tol = tol or default_tolerances()
    kind = OrthoKind(kind)
    x = as_vector(x, space.dim)
    y = as_vector(y, space.dim)

    if kind is OrthoKind.ISOSCELES:
        plus = norm(space, x + y)
        minus = norm(space, x - y)
        return bool(_within(plus - minus, max(plus, minus, 1.0), tol))

    if kind is OrthoKind.PYTHAGOREAN:
        nx = norm(space, x)
        ny = norm(space, y)
        nd = norm(space, x - y)
        return bool(_within(nd**2 - nx**2 - ny**2, nx**2 + ny**2 + 1.0, tol))

    if kind is OrthoKind.BIRKHOFF:
        nx = norm(space, x)
        ts = np.linspace(-tol.lambda_max, tol.lambda_max, BanachConfig.BIRKHOFF_GRID)
        values = norm(space, x + np.multiply.outer(ts, y))
        k = int(np.argmin(values))
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, len(ts) - 1)]
        refined = minimize_scalar(
            lambda t: norm(space, x + t * y),
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": tol.eq_tol},
        )
        lowest = min(float(values[k]), float(refined.fun))
        return bool(lowest >= nx - tol.eq_tol * (nx + 1.0))

    lams = np.linspace(0.0, tol.lambda_max, BanachConfig.ROBERTS_GRID)
    steps = np.multiply.outer(lams, y)
    plus = norm(space, x + steps)
    minus = norm(space, x - steps)
    scale = np.maximum(np.maximum(plus, minus), 1.0)
    return bool(np.all(_within(plus - minus, scale, tol)))


def pair_from_uv(space, u, v, scale, tol=None):
    """
    Maps an equal-norm pair (u, v) to the isosceles pair x = scale·(u + v),
    y = scale·(u − v); ‖x + y‖ − ‖x − y‖ = 2·scale·(‖u‖ − ‖v‖) = 0.

    Args:
        u, v : vectors with ‖u‖ = ‖v‖ (within eq_tol)
        scale : positive real

    Returns:
        PairWitness
    """
    tol = tol or default_tolerances()
    u = as_vector(u, space.dim)
    v = as_vector(v, space.dim)
    if not scale > 0:
        raise ContractViolation("scale must be positive")
    nu = norm(space, u)
    nv = norm(space, v)
    if abs(nu - nv) > tol.eq_tol * max(nu, nv, 1.0):
        raise ContractViolation("pair_from_uv needs ‖u‖ = ‖v‖ (got %r and %r)" % (nu, nv))
    return PairWitness(x=scale * (u + v), y=scale * (u - v))


def refine_root(fn, lo, hi, tolerance):
    """
    Root of fn in the bracket [lo, hi], or None when the bracket holds no
    verified root. If the end points disagree on sign only at sampling
    time, the midpoint is accepted when |fn(mid)| ≤ tolerance.
    """
    try:
        return brentq(fn, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    except ValueError:
        mid = 0.5 * (lo + hi)
        residual = abs(float(fn(mid)))
        if residual <= tolerance:
            return mid
        logger.debug("dropping bracket [%r, %r]: residual %.3g at its midpoint", lo, hi, residual)
        return None


def isosceles_scales(space, x, y, tol=None):
    """
    Best-effort list of λ > 0 with x ⊥_I λy, scanning (0, λ_max].

    g(λ) = ‖x + λy‖ − ‖x − λy‖ is sampled at λ_k = k·λ_max/512. Each sign
    change yields one bracketed root; each plateau where |g| stays within
    eq_tol yields its end points plus every eighth grid node. λ = 0 is never
    reported.

    Returns:
        sorted list of floats, possibly empty
    """
    tol = tol or default_tolerances()
    x = as_vector(x, space.dim)
    y = as_vector(y, space.dim)
    count = BanachConfig.SCALE_GRID
    step = tol.lambda_max / count
    ks = np.arange(1, count + 1)
    lams = ks * step
    steps = np.multiply.outer(lams, y)
    plus = norm(space, x + steps)
    minus = norm(space, x - steps)
    g = plus - minus
    zero = _within(g, np.maximum(np.maximum(plus, minus), 1.0), tol)

    found = set()
    for start, stop in zero_runs(zero):
        for k in run_representatives(
            int(ks[start]), int(ks[stop]), BanachConfig.SCALE_REPRESENTATIVE_STRIDE
        ):
            found.add(float(k * step))
    for i in sign_changes(g, zero):
        root = refine_root(
            lambda s: iso_defect(space, x, s * y),
            lams[i],
            lams[i + 1],
            tol.eq_tol * max(plus[i], minus[i], 1.0),
        )
        if root is not None:
            found.add(float(root))
    return sorted(found)


def plane_basis(x, direction):
    x = np.asarray(x, dtype=float)
    d = np.asarray(direction, dtype=float)
    e1 = x / np.linalg.norm(x)
    w = d - np.dot(d, e1) * e1
    length = np.linalg.norm(w)
    if not np.linalg.norm(d) > 0 or length <= 1e-12 * np.linalg.norm(d):
        raise ContractViolation("direction must be linearly independent of x")
    return e1, w / length


def independent_direction(x):
    """
    A coordinate axis that is not parallel to x (dim ≥ 2).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[0] < 2:
        raise ContractViolation("a second direction needs dim ≥ 2")
    axis = np.zeros_like(x)
    axis[int(np.argmin(np.abs(x)))] = 1.0
    return axis


def plane_curve(space, e1, e2, phi):
    """
    Unit-sphere points of the plane span{e1, e2}: unit(cos φ·e1 + sin φ·e2).
    """
    phi = np.asarray(phi, dtype=float)
    return unit(space, np.multiply.outer(np.cos(phi), e1) + np.multiply.outer(np.sin(phi), e2))


def isosceles_partners(space, x, direction, tol=None, samples=64):
    """
    Unit vectors y in span{x, direction} with x ⊥_I y, taken from the half
    turn φ ∈ (0, π) of the planar sphere curve (−y is a partner whenever y
    is). The defect is 2‖x‖ at φ = 0 and −2‖x‖ at φ = π, so at least one
    partner exists.

    Returns:
        list of unit vectors
    """
    tol = tol or default_tolerances()
    x = as_vector(x, space.dim)
    e1, e2 = plane_basis(x, direction)
    phis = np.linspace(0.0, np.pi, samples + 1)
    points = plane_curve(space, e1, e2, phis)
    plus = norm(space, x + points)
    minus = norm(space, x - points)
    g = plus - minus
    zero = _within(g, np.maximum(np.maximum(plus, minus), 1.0), tol)

    angles = []
    for start, stop in zero_runs(zero):
        angles.extend({float(phis[start]), float(phis[stop])})
    for i in sign_changes(g, zero):
        root = refine_root(
            lambda phi: iso_defect(space, x, plane_curve(space, e1, e2, phi)),
            phis[i],
            phis[i + 1],
            tol.eq_tol * max(plus[i], minus[i], 1.0),
        )
        if root is not None:
            angles.append(root)
    return [plane_curve(space, e1, e2, phi) for phi in sorted(angles)]


def isosceles_completion(space, x, z, tol=None):
    """
    Solves x ⊥_I (αx + z) for α. The defect h(α) = ‖(1+α)x + z‖ − ‖(1−α)x − z‖
    tends to ±2‖x‖ as α → ±∞, so a root always exists.

    Returns:
        the scalar α
    """
    tol = tol or default_tolerances()
    x = as_vector(x, space.dim)
    z = as_vector(z, space.dim)

    def h(alpha):
        return iso_defect(space, x, alpha * x + z)

    def is_zero(alpha):
        y = alpha * x + z
        plus = norm(space, x + y)
        minus = norm(space, x - y)
        return abs(plus - minus) <= tol.eq_tol * max(plus, minus, 1.0)

    if is_zero(0.0):
        return 0.0
    bound = 1.0
    for _ in range(64):
        if h(bound) > 0 and h(-bound) < 0:
            break
        bound *= 2.0
    else:
        raise ContractViolation("isosceles completion needs x ≠ 0")
    for candidate in (bound, -bound):
        if is_zero(candidate):
            return candidate
    alpha = refine_root(h, -bound, bound, tol.eq_tol * max(norm(space, x), 1.0))
    if alpha is None:
        raise InfeasibleError("isosceles completion did not converge")
    return float(alpha)
