import math

import pytest

from banach_constants.exceptions import CatalogError, ContractViolation, DegenerateObjectiveError
from banach_constants.models.models import CERTS, SpaceSpec
from banach_constants.verifier import (
    CORE_SUITE,
    EXACT_CERT,
    SuiteCursor,
    VerifierSession,
    catalog_ids,
    check_identity,
    run_suite,
    suite_ids,
)


def test_catalog():
    ids = catalog_ids()
    assert ids == sorted(ids)
    assert len(ids) == 18
    for identity_id in ("EQ-A2", "EQ-SCALE", "EQ-MOD", "BD-SAND", "HIL-2", "EX-C", "OBS-CNJI", "BD-NSQ"):
        assert identity_id in ids
    assert suite_ids("core") == list(CORE_SUITE)
    assert suite_ids("full") == ids
    with pytest.raises(ContractViolation):
        suite_ids("partial")


def test_unknown_and_inapplicable_identities(l2, cfg, tol):
    with pytest.raises(CatalogError):
        check_identity(l2, "EQ-NOPE", cfg, tol)
    with pytest.raises(ContractViolation):
        check_identity(l2, "EX-L1", cfg, tol)
    with pytest.raises(ContractViolation):
        check_identity(SpaceSpec.lp(2, 3), "EQ-MOD", cfg, tol)


def test_continuous_function_witness(cfg, tol):
    report = check_identity(SpaceSpec.discretized_sup(16), "EX-C", cfg, tol, params={"tau": 1.0, "upsilon": 2.0})
    assert report.status == "pass"
    assert report.lhs == pytest.approx(4.5, rel=1e-12)
    assert report.tol <= 1e-11


def test_l1_sharpness_example(l1, cfg, tol):
    report = check_identity(l1, "EX-L1", cfg, tol, params={"tau": 1.0, "upsilon": 2.0})
    assert report.status == "pass"
    assert report.rhs == pytest.approx(4.5)
    assert report.details["value_at_witness"] == pytest.approx(4.5)


def test_hilbert_characterization(l1, l2, cfg, tol):
    report = check_identity(l2, "HIL-1", cfg, tol)
    assert report.status == "pass"
    assert report.rhs == 1.0
    report = check_identity(l1, "HIL-1", cfg, tol)
    assert report.status == "pass"
    assert report.rhs[0] == pytest.approx(1.01)
    assert report.rhs[1] is None


def test_scaling_relation_reports_both_factors(l2, cfg, tol):
    report = check_identity(l2, "EQ-SCALE", cfg, tol, params={"tau": 1.0, "upsilon": 2.0})
    assert report.status == "pass"
    assert report.lhs == pytest.approx(1.0, abs=1e-6)
    assert report.details["printed_rhs"] == pytest.approx(0.25, abs=1e-6)
    assert report.details["printed_status"] == "fail"
    assert "printed factor" in report.notes


def test_james_bounds_on_l1(l1, cfg, tol):
    report = check_identity(l1, "BD-J", cfg, tol)
    assert report.status == "pass"
    assert report.details["j"] == pytest.approx(2.0, abs=1e-9)


def test_observations_are_never_asserted(l1, cfg, tol):
    report = check_identity(l1, "OBS-CNJI", cfg, tol)
    assert report.status == "observed"
    assert report.details["ordering"] in ("<", "=", ">")
    report = check_identity(l1, "BD-NSQ", cfg, tol)
    assert report.status == "observed"
    assert report.details["attained"]


def test_degenerate_objective_makes_a_report_inconclusive(l2, cfg, tol, monkeypatch):
    def degenerate(space, query, cfg=None, tol=None):
        raise DegenerateObjectiveError("objective was non-finite at every start")

    monkeypatch.setattr("banach_constants.verifier.estimate_constant", degenerate)
    report = check_identity(l2, "BD-H", cfg, tol)
    assert report.status == "inconclusive"
    assert report.lhs is None
    assert "non-finite" in report.notes


def test_session_memoizes_estimates(l2, cfg, tol):
    session = VerifierSession(cfg, tol)
    first = session.estimate(l2, "A2")
    assert session.estimate(l2, "A2") is first
    session.estimate(l2, "L_YJ_I", tau=1.0, upsilon=2.0)
    assert len(session) == 2


def test_suite_cursor_is_lazy(l2, cfg, tol):
    cursor = SuiteCursor([l2], ["BD-H", "HIL-1"], VerifierSession(cfg, tol))
    assert len(cursor) == 0
    first = next(cursor)
    assert first.identity_id == "BD-H"
    assert [report.identity_id for report in cursor] == ["HIL-1"]


def test_core_suite_on_the_euclidean_plane(l2, cfg, tol):
    reports = run_suite([l2], "core", cfg, tol)
    assert len(reports) == 9
    assert [r.sort_key() for r in reports] == sorted(r.sort_key() for r in reports)
    assert all(report.status == "pass" for report in reports), [
        (r.identity_id, r.lhs, r.rhs) for r in reports if r.status != "pass"
    ]
    ts = [report.params["t"] for report in reports if report.identity_id == "EQ-EI"]
    assert ts == [0.0, 0.5, 1.0, 2.0]


def test_reports_are_deterministic(cfg, tol):
    space = SpaceSpec.lp(1.5, 2)
    first = check_identity(space, "BD-LYJ", cfg, tol)
    second = check_identity(space, "BD-LYJ", cfg, tol)
    assert first.to_json() == second.to_json()
    assert 1.0 - 1e-9 <= first.lhs <= 1.8 + 1e-9


def test_empty_corpus(cfg, tol):
    with pytest.raises(ContractViolation):
        run_suite([], "core", cfg, tol)


def test_hilbert_value_of_h_tilde(l2, cfg, tol):
    report = check_identity(l2, "BD-H", cfg, tol)
    assert report.lhs == pytest.approx(math.sqrt(2.0), abs=1e-6)
    assert report.rhs == [math.sqrt(2.0), 2.0]


def test_reports_carry_the_cert_of_each_side(l2, l1, cfg, tol):
    equality = check_identity(l2, "EQ-A2", cfg, tol)
    assert equality.lhs_cert in CERTS
    assert equality.rhs_cert in CERTS
    bound = check_identity(l2, "BD-H", cfg, tol)
    assert bound.rhs_cert == [EXACT_CERT, EXACT_CERT]
    james = check_identity(l1, "BD-CNJ", cfg, tol)
    assert james.rhs_cert[0] is None
    assert james.rhs_cert[1] in CERTS
    exported = check_identity(SpaceSpec.discretized_sup(16), "EX-C", cfg, tol).export_all_data()
    assert exported["lhs_cert"] == exported["rhs_cert"] == EXACT_CERT
