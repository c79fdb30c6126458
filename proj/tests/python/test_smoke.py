import numpy as np
import pytest
import scipy.linalg

import oplog


def rel(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(b), 1e-300)


def test_log_of_diagonal_matches_numpy():
    a = np.diag([2.0, 4.0]).astype(complex)
    np.testing.assert_allclose(oplog.op_log(a).diagonal(), np.log([2.0, 4.0]), rtol=1e-12)


def test_log_matches_scipy_on_random_sectorial_matrix():
    rng = np.random.default_rng(3)
    a = 3.0 * np.eye(6) + 0.4 * (rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))) / np.sqrt(6)
    assert rel(oplog.op_log(a), scipy.linalg.logm(a)) <= 1e-9
    assert rel(oplog.mat_exp(oplog.op_log(a)), a) <= 1e-10


def test_split_contour_handles_rotation():
    theta = 1.0
    u = np.array([[np.cos(theta), np.sin(theta)], [-np.sin(theta), np.cos(theta)]], dtype=complex)
    with pytest.raises(oplog.OplogError) as info:
        oplog.op_log(u)
    assert info.value.kind == "OriginEnclosed"
    expected = np.array([[0.0, theta], [-theta, 0.0]])
    assert rel(oplog.op_log_split(u), expected) <= 1e-10


def test_branch_cut_raises_typed_error():
    with pytest.raises(oplog.OplogError) as info:
        oplog.op_log(-np.eye(2, dtype=complex))
    assert info.value.kind == "SpectrumHitsBranchCut"


def test_family_generators_agree_with_oracle():
    fam = oplog.Family("constant:B=rot")
    assert fam.dim == 2 and fam.commuting
    oracle = fam.generator_oracle(1.0)
    for rep in ("lemma1", "corollary1", "theorem1", "corollary2"):
        assert rel(oplog.generator(rep, fam, 1.0, 0.5), oracle) <= 1e-6, rep
    report = oplog.generator_report(fam, 1.0, 0.5)
    assert report["shift"]["certified"]
    assert max(report["oracle_errors"].values()) <= 1e-6


def test_unknown_family_is_invalid_input():
    with pytest.raises(oplog.OplogError) as info:
        oplog.Family("nope")
    assert info.value.kind == "InvalidInput"


def test_cole_hopf_front_solves_burgers():
    phi0 = oplog.heat_front(128)
    r = oplog.cole_hopf_report(phi0, 1.0, 0.1, 0.05)
    assert r["identity_residual"] <= 1e-12
    assert r["burgers_residual"] <= 1e-6


def test_strip_double_log_round_trip():
    r = oplog.strip_double_log(np.diag([np.e**2, np.e**3]).astype(complex))
    np.testing.assert_allclose(r["outer"].diagonal(), np.log([2.0, 3.0]), rtol=1e-10)
    assert r["round_trip"] <= 1e-10


def test_run_returns_report_schema():
    report = oplog.run("verify-gen", family="constant:B=rot", t=1.0, s=0.5)
    assert report["command"] == "verify-gen"
    assert report["pass"]
    for check in report["checks"]:
        assert set(check) == {"name", "value", "tolerance", "pass"}
