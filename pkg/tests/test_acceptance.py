"""
End-to-end checks of the published values: sharpness examples, Hilbert
values, the equivalence theorems, the bound suites, the modulus identity,
the scaling relation, oracle agreement and reproducible verify output.
"""
import math

import numpy as np
import pytest
from click.testing import CliRunner

from banach_constants.cli import main
from banach_constants.config import BanachConfig, default_opt_config
from banach_constants.constants import a2_via_modulus, estimate_constant, evaluate_objective, substituted_objective
from banach_constants.models.models import ConstantQuery, SpaceSpec
from banach_constants.optimizer import maximize_pair_objective
from banach_constants.oracle import grid_sup_2d
from banach_constants.spaces import BUILTIN_CORPUS, builtin_space, norm, sample_unit_vectors
from banach_constants.verifier import check_identity

SKEWS = [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0)]


@pytest.fixture(scope="module")
def corpus_cfg():
    """
    Enough budget for 1e-3 agreement on every 2D corpus space.
    """
    return default_opt_config(
        restarts=16,
        seed=0,
        grid_resolution=64,
        direct_resolution=128,
        modulus_resolution=128,
    )


def estimate(space, cfg, tol, constant, **params):
    return estimate_constant(space, ConstantQuery(id=constant, **params), cfg, tol).value


@pytest.mark.parametrize("tau, upsilon", SKEWS)
def test_l1_sharpness_in_the_plane(cfg, tol, tau, upsilon):
    value = estimate(SpaceSpec.lp(1, 2), cfg, tol, "L_YJ_I", tau=tau, upsilon=upsilon)
    assert value == pytest.approx(2.0 * (tau + upsilon) ** 2 / upsilon**2, abs=1e-6)


@pytest.mark.parametrize("tau, upsilon", SKEWS)
def test_l1_sharpness_in_three_dimensions(tol, tau, upsilon):
    cfg = default_opt_config(seed=0)
    value = estimate(SpaceSpec.lp(1, 3), cfg, tol, "L_YJ_I", tau=tau, upsilon=upsilon)
    assert value == pytest.approx(2.0 * (tau + upsilon) ** 2 / upsilon**2, abs=1e-3)


def test_continuous_functions_sharpness(tol):
    space = SpaceSpec.discretized_sup(64, 0.0, 1.0)
    r = np.linspace(0.0, 1.0, 64)
    query = ConstantQuery(id="L_YJ_I", tau=1.0, upsilon=2.0, mode="direct")
    value = evaluate_objective(space, query, 1.0 - r, r, tol)
    assert value == pytest.approx(4.5, rel=1e-12)
    report = check_identity(space, "EX-C", params={"tau": 1.0, "upsilon": 2.0}, tol=tol)
    assert report.status == "pass"


@pytest.mark.parametrize("name", BUILTIN_CORPUS)
def test_equivalence_theorems(corpus_cfg, tol, name):
    space = builtin_space(name)
    assert estimate(space, corpus_cfg, tol, "H_tilde", mode="direct") == pytest.approx(
        estimate(space, corpus_cfg, tol, "A2"), abs=1e-3
    )
    assert estimate(space, corpus_cfg, tol, "H_tilde_sq", mode="direct") == pytest.approx(
        estimate(space, corpus_cfg, tol, "C_NJ_prime"), abs=1e-3
    )
    for t in (0.0, 0.5, 1.0, 2.0):
        assert estimate(space, corpus_cfg, tol, "E_I", t=t, mode="direct") == pytest.approx(
            estimate(space, corpus_cfg, tol, "E", t=t), abs=1e-3
        )


@pytest.mark.parametrize("dim", [2, 3])
def test_hilbert_values(cfg, tol, dim):
    space = SpaceSpec.lp(2, dim)
    assert estimate(space, cfg, tol, "H_tilde_sq") == pytest.approx(1.0, abs=1e-6)
    assert estimate(space, cfg, tol, "L_YJ_prime", tau=1.0, upsilon=2.0) == pytest.approx(1.0, abs=1e-6)
    assert estimate(space, cfg, tol, "L_YJ_I", tau=1.0, upsilon=2.0) == pytest.approx(2.5, abs=1e-6)
    for t in (0.0, 0.5, 1.0, 2.0):
        assert estimate(space, cfg, tol, "E", t=t) == pytest.approx(2.0 * (1.0 + t * t), abs=1e-5)


def random_planar_space(rng):
    """
    A seeded 2D space: ℓ_p with p kept away from 2 (or exactly 2), or a
    random polyhedral norm.
    """
    kind = int(rng.integers(0, 4))
    if kind == 0:
        return SpaceSpec.lp(2, 2)
    if kind == 1:
        return SpaceSpec.lp(float(rng.uniform(1.0, 1.7)), 2)
    if kind == 2:
        return SpaceSpec.lp(float(rng.uniform(2.4, 4.0)), 2)
    return SpaceSpec.random_polyhedral(int(rng.integers(0, 10**6)), dim=2, count=5)


def bounds_for(query):
    """
    [lower, upper] every space satisfies; the lower end is the Hilbert value.
    """
    kind = query.id
    if kind in ("A2", "J"):
        return math.sqrt(2.0), 2.0
    if kind in ("C_NJ", "C_NJ_prime"):
        return 1.0, 2.0
    if kind == "E":
        return 2.0 * (1.0 + query.t**2), 2.0 * (1.0 + query.t) ** 2
    tau, upsilon = query.tau, query.upsilon
    if kind == "L_YJ_prime":
        return 1.0, 1.0 + 2.0 * tau * upsilon / (tau**2 + upsilon**2)
    return 2.0 * (tau**2 + upsilon**2) / upsilon**2, 2.0 * (tau + upsilon) ** 2 / upsilon**2


def random_query(rng):
    kind = ("A2", "J", "C_NJ", "C_NJ_prime", "E", "L_YJ_prime", "L_YJ_I")[int(rng.integers(0, 7))]
    if kind == "E":
        return ConstantQuery(id=kind, t=float(rng.uniform(0.0, 3.0)))
    if kind in ("L_YJ_prime", "L_YJ_I"):
        tau, upsilon = rng.uniform(0.2, 3.0, size=2)
        return ConstantQuery(id=kind, tau=float(tau), upsilon=float(upsilon))
    return ConstantQuery(id=kind)


def test_estimates_respect_their_bounds(tol):
    rng = np.random.default_rng(2024)
    for draw in range(200):
        space = random_planar_space(rng)
        query = random_query(rng)
        cfg = default_opt_config(restarts=4, seed=draw, grid_resolution=32, max_iters=200)
        value = estimate_constant(space, query, cfg, tol).value
        lower, upper = bounds_for(query)
        assert value >= lower - 1e-9, (space.label(), query.to_json(), value)
        assert value <= upper + 1e-9, (space.label(), query.to_json(), value)


def test_pointwise_bounds_on_random_draws(tol):
    rng = np.random.default_rng(2025)
    for draw in range(200):
        dim = int(rng.integers(2, 4))
        if draw % 2:
            space = SpaceSpec.lp(float(rng.uniform(1.0, 4.0)), dim)
        else:
            space = SpaceSpec.random_polyhedral(int(rng.integers(0, 1000)), dim=dim, count=dim + 3)
        tau, upsilon = rng.uniform(0.2, 3.0, size=2)
        t = float(rng.uniform(0.0, 3.0))
        a, b = sample_unit_vectors(space, draw, 2)
        skew = substituted_objective(space, ConstantQuery(id="L_YJ_prime", tau=tau, upsilon=upsilon))(a, b)
        assert skew <= 1.0 + 2.0 * tau * upsilon / (tau**2 + upsilon**2) + 1e-9
        assert substituted_objective(space, ConstantQuery(id="A2"))(a, b) <= 2.0 + 1e-9
        assert substituted_objective(space, ConstantQuery(id="E", t=t))(a, b) <= 2.0 * (1.0 + t) ** 2 + 1e-9
        assert substituted_objective(space, ConstantQuery(id="C_NJ_prime"))(a, b) <= 2.0 + 1e-9


@pytest.mark.parametrize("seed", range(5))
def test_orderings_on_random_spaces(corpus_cfg, tol, seed):
    space = random_planar_space(np.random.default_rng(100 + seed))
    squared = estimate(space, corpus_cfg, tol, "H_tilde_sq")
    james = estimate(space, corpus_cfg, tol, "J")
    classic = estimate(space, corpus_cfg, tol, "C_NJ")
    modified = estimate(space, corpus_cfg, tol, "C_NJ_prime")
    slack = tol.verify_tol
    assert james**2 / 2.0 - slack <= squared <= james + slack
    assert squared <= classic + slack
    for tau, upsilon in ((1.0, 2.0), (2.0, 1.0)):
        skew = estimate(space, corpus_cfg, tol, "L_YJ_I", tau=tau, upsilon=upsilon)
        lower = 4.0 * min(tau, upsilon) ** 2 / upsilon**2 * modified
        upper = 4.0 * (tau - upsilon) ** 2 / upsilon**2 + 8.0 * tau**2 / upsilon**2 * classic
        assert lower - slack <= skew <= upper + slack


@pytest.mark.parametrize("name", BUILTIN_CORPUS)
def test_modulus_identity(corpus_cfg, tol, name):
    space = builtin_space(name)
    assert a2_via_modulus(space, corpus_cfg, tol).value == pytest.approx(
        estimate(space, corpus_cfg, tol, "A2"), abs=5e-3
    )


def test_modulus_of_the_euclidean_plane(cfg, tol):
    value = estimate(SpaceSpec.lp(2, 2), cfg, tol, "delta_X", eps=math.sqrt(2.0))
    assert value == pytest.approx(1.0 - math.sqrt(2.0) / 2.0, abs=1e-4)


@pytest.mark.parametrize("name", ["l2", "l1", "l3"])
@pytest.mark.parametrize("tau, upsilon", [(1.0, 2.0), (2.0, 1.0)])
def test_scaling_relation(cfg, tol, name, tau, upsilon):
    space = builtin_space(name)
    report = check_identity(space, "EQ-SCALE", cfg, tol, params={"tau": tau, "upsilon": upsilon})
    assert report.status == "pass"
    assert abs(report.lhs - report.rhs) <= 1e-3
    assert report.details["printed_gap"] > 0.1
    assert report.details["printed_status"] == "fail"


AGREEMENT_QUERIES = [
    ConstantQuery(id="A2"),
    ConstantQuery(id="C_NJ_prime"),
    ConstantQuery(id="E", t=1.0),
    ConstantQuery(id="L_YJ_prime", tau=1.0, upsilon=2.0),
    ConstantQuery(id="L_YJ_I", tau=1.0, upsilon=2.0),
    ConstantQuery(id="J"),
]


@pytest.mark.parametrize("name", BUILTIN_CORPUS)
@pytest.mark.parametrize("query", AGREEMENT_QUERIES, ids=lambda q: q.id)
def test_oracle_agrees_with_the_optimizer(tol, name, query):
    space = builtin_space(name)
    objective = substituted_objective(space, query, tol)
    grid = grid_sup_2d(space, objective, 1024)
    search = maximize_pair_objective(space, objective, default_opt_config(restarts=64, seed=0))
    assert norm(space, grid.witness.x) == pytest.approx(1.0)
    # the extreme directions of a random polygon fall between grid nodes
    window = grid.bound_window if name == "random-polyhedral" else 0.0
    assert abs(grid.value - search.value) <= max(1e-4, window)


def test_full_verify_is_reproducible(tmp_path, monkeypatch):
    monkeypatch.setattr(BanachConfig, "MODULUS_RESOLUTION", 32)
    runner = CliRunner()
    args = [
        "verify",
        "--spaces",
        "l1,octagon,l1-3,c01",
        "--suite",
        "full",
        "--seed",
        "42",
        "--restarts",
        "2",
        "--max-iters",
        "50",
        "--resolution",
        "16",
        "--direct-resolution",
        "16",
        "--format",
        "json",
    ]
    outputs = []
    for name in ("first.json", "second.json"):
        out = tmp_path / name
        result = runner.invoke(main, args + ["--out", str(out)])
        assert result.exit_code in (0, 1), result.output
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1]
