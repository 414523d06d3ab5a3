import numpy as np

from banach_constants.exceptions import ContractViolation


def angle_grid(resolution):
    """
    Equispaced angles on [0, 2π). The fraction k/resolution is exact for
    power-of-two resolutions, so nested grids share their nodes bit for bit.

    Args:
        resolution : number of nodes; must be a positive multiple of 8 so that
            every multiple of π/4 is a node

    Returns:
        numpy array of angles
    """
    if resolution < 8 or resolution % 8:
        raise ContractViolation("resolution must be a multiple of 8 and ≥ 8")
    return (np.arange(resolution) / resolution) * (2.0 * np.pi)


def batched(fn):
    """
    Marks an objective that accepts stacked pairs (rows of the last axis)
    and returns one value per row.
    """
    fn.batched = True
    return fn


def is_batched(fn):
    return bool(getattr(fn, "batched", False))


def derive_seed(seed, index):
    return int(seed) ^ int(index)


def zero_runs(mask):
    """
    Maximal runs of consecutive True entries.

    Args:
        mask : boolean array

    Returns:
        list of (start, stop) index pairs, stop inclusive
    """
    padded = np.concatenate([[False], np.asarray(mask, dtype=bool), [False]]).astype(np.int8)
    steps = np.diff(padded)
    starts = np.nonzero(steps == 1)[0]
    stops = np.nonzero(steps == -1)[0] - 1
    return list(zip(starts.tolist(), stops.tolist()))


def sign_changes(values, zero_mask):
    """
    Indices i where values[i] and values[i + 1] are both outside the zero band
    and have opposite signs.

    Args:
        values : real array sampled on a grid
        zero_mask : boolean array marking nodes treated as exact zeros

    Returns:
        list of left bracket indices
    """
    values = np.asarray(values)
    live = ~np.asarray(zero_mask)
    flips = (np.sign(values[:-1]) * np.sign(values[1:]) < 0) & live[:-1] & live[1:]
    return [int(i) for i in np.nonzero(flips)[0]]


def run_representatives(start, stop, stride):
    """
    Representative indices of a zero run: both end points plus every
    stride-th index inside it.
    """
    picked = {start, stop}
    first = start + (-start) % stride
    picked.update(range(first, stop + 1, stride))
    return sorted(picked)


def lexicographic_key(value, x, y):
    """
    Ordering key for deterministic reduction of restart results: larger
    value first, then the lexicographically smaller witness.
    """
    return (-float(value), tuple(np.asarray(x).tolist()), tuple(np.asarray(y).tolist()))
