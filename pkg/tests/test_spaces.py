import json
import math

import numpy as np
import pytest

from banach_constants.exceptions import (
    ContractViolation,
    DegenerateInputError,
    DomainError,
    SpecParseError,
)
from banach_constants.models.models import SpaceSpec
from banach_constants.spaces import (
    BUILTIN_CORPUS,
    boundary_point_2d,
    builtin_space,
    is_inner_product,
    list_builtin_spaces,
    norm,
    resolve_corpus,
    resolve_space,
    sample_function,
    sample_points,
    sample_unit_vectors,
    unit,
)


@pytest.mark.parametrize("p, expected", [(1, 7.0), (2, 5.0), ("inf", 4.0)])
def test_lp_norms(p, expected):
    assert norm(SpaceSpec.lp(p, 2), [3.0, -4.0]) == pytest.approx(expected, rel=1e-15)


def test_lp_norm_for_general_p():
    assert norm(SpaceSpec.lp(3, 2), [1.0, 1.0]) == pytest.approx(2.0 ** (1.0 / 3.0), rel=1e-14)


def test_unit_normalizes():
    x = unit(SpaceSpec.lp(2, 2), [3.0, 4.0])
    assert x == pytest.approx([0.6, 0.8], abs=1e-15)


def test_weighted_lp_norm():
    space = SpaceSpec.weighted_lp(2, [2.0, 1.0])
    assert norm(space, [1.0, 0.0]) == pytest.approx(2.0)
    assert norm(space, [0.0, 3.0]) == pytest.approx(3.0)


def test_octagon_norm():
    octagon = SpaceSpec.regular_polygon(8)
    assert norm(octagon, [1.0, 0.0]) == pytest.approx(1.0)
    direction = [math.cos(math.pi / 8), math.sin(math.pi / 8)]
    assert norm(octagon, direction) == pytest.approx(math.cos(math.pi / 8))


def test_discretized_sup_norm_is_the_maximum():
    space = SpaceSpec.discretized_sup(4)
    assert norm(space, [0.5, -2.0, 1.0, 0.0]) == 2.0


def test_batch_norms_match_single_norms():
    rng = np.random.default_rng(3)
    batch = rng.standard_normal((20, 3))
    for space in (SpaceSpec.lp(1.5, 3), SpaceSpec.lp("inf", 3), SpaceSpec.random_polyhedral(1, dim=3)):
        singles = [norm(space, row) for row in batch]
        assert norm(space, batch) == pytest.approx(singles, rel=1e-12)


def test_vector_contract():
    space = SpaceSpec.lp(2, 2)
    with pytest.raises(ContractViolation):
        norm(space, [1.0, 2.0, 3.0])
    with pytest.raises(DomainError):
        norm(space, [1.0, math.nan])
    with pytest.raises(DegenerateInputError):
        unit(space, [0.0, 0.0])


def test_boundary_points_lie_on_the_sphere():
    space = builtin_space("random-polyhedral")
    points = boundary_point_2d(space, np.linspace(0.0, 2.0 * np.pi, 33))
    assert norm(space, points) == pytest.approx(np.ones(33), abs=1e-14)
    with pytest.raises(ContractViolation):
        boundary_point_2d(SpaceSpec.lp(2, 3), 0.0)


def test_sampling_is_deterministic():
    space = SpaceSpec.lp(3, 4)
    first = sample_unit_vectors(space, 42, 10)
    assert np.array_equal(first, sample_unit_vectors(space, 42, 10))
    assert not np.array_equal(first, sample_unit_vectors(space, 43, 10))
    assert norm(space, first) == pytest.approx(np.ones(10), abs=1e-14)


def test_inner_product_detection():
    assert is_inner_product(SpaceSpec.lp(2, 3))
    assert is_inner_product(SpaceSpec.lp(1, 1))
    assert not is_inner_product(SpaceSpec.lp(1, 2))
    assert not is_inner_product(builtin_space("octagon"))


def test_sampled_functions():
    space = SpaceSpec.discretized_sup(5, 0.0, 1.0)
    assert sample_points(space) == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    assert sample_function(space, lambda r: 1.0 - r) == pytest.approx([1.0, 0.75, 0.5, 0.25, 0.0])
    with pytest.raises(ContractViolation):
        sample_points(SpaceSpec.lp(2, 2))


def test_builtin_corpus():
    names = [space.name for space in list_builtin_spaces()]
    for name in BUILTIN_CORPUS:
        assert name in names
    assert all(builtin_space(name).dim == 2 for name in BUILTIN_CORPUS)
    assert builtin_space("random-polyhedral") == builtin_space("random-polyhedral")


def test_resolve_space_tokens(tmp_path):
    assert resolve_space("l1").p == 1.0
    assert resolve_space("lp:3:2").p == 3.0
    assert resolve_space('{"family": "discretized-sup", "grid": 8}').dim == 8
    path = tmp_path / "space.json"
    path.write_text(json.dumps({"family": "lp", "p": 2, "dim": 3}), encoding="utf-8")
    assert resolve_space(str(path)).dim == 3
    with pytest.raises(SpecParseError):
        resolve_space("no-such-space")


def test_resolve_corpus(tmp_path):
    assert [space.name for space in resolve_corpus("l2,linf")] == ["l2", "linf"]
    path = tmp_path / "corpus.json"
    path.write_text(
        json.dumps({"spaces": [{"family": "lp", "p": 2, "dim": 2}, {"family": "lp", "p": 1, "dim": 3}]}),
        encoding="utf-8",
    )
    assert [space.dim for space in resolve_corpus(str(path))] == [2, 3]


@pytest.fixture(params=BUILTIN_CORPUS)
def planar(request):
    return builtin_space(request.param)


def test_absolute_homogeneity(planar, tol):
    rng = np.random.default_rng(11)
    xs = rng.standard_normal((1000, 2)) * rng.uniform(0.01, 100.0, size=(1000, 1))
    cs = rng.uniform(-10.0, 10.0, size=1000)
    lengths = norm(planar, xs)
    scaled = norm(planar, cs[:, None] * xs)
    assert np.all(np.abs(scaled - np.abs(cs) * lengths) <= tol.eq_tol * lengths * np.abs(cs))


def test_triangle_inequality(planar, tol):
    rng = np.random.default_rng(12)
    xs = rng.standard_normal((1000, 2))
    ys = rng.standard_normal((1000, 2)) * 3.0
    nx, ny = norm(planar, xs), norm(planar, ys)
    assert np.all(norm(planar, xs + ys) <= nx + ny + tol.eq_tol * (nx + ny))


def test_definiteness(planar):
    assert norm(planar, [0.0, 0.0]) == 0.0
    xs = np.random.default_rng(13).standard_normal((1000, 2))
    assert np.all(norm(planar, xs) > 0.0)


def test_boundary_points_cover_the_sphere(planar):
    thetas = np.linspace(0.0, 2.0 * np.pi, 10**4, endpoint=False)
    points = boundary_point_2d(planar, thetas)
    angles = np.mod(np.arctan2(points[:, 1], points[:, 0]), 2.0 * np.pi)
    targets = np.random.default_rng(14).uniform(0.0, 2.0 * np.pi, size=1000)
    gaps = np.abs(targets[:, None] - angles[None, :])
    gaps = np.minimum(gaps, 2.0 * np.pi - gaps).min(axis=1)
    assert gaps.max() <= 2.0 * (2.0 * np.pi / 10**4)


def test_sampled_directions_reach_every_quadrant():
    draws = sample_unit_vectors(SpaceSpec.lp(1, 2), 2, 10**4)
    quadrants = set(zip(np.sign(draws[:, 0]).astype(int), np.sign(draws[:, 1]).astype(int)))
    assert {(1, 1), (-1, 1), (-1, -1), (1, -1)} <= quadrants
