import csv
import math

import numpy as np
import pytest

from vnslab.identities import (ANALYTIC_TOL, FD_TOL, EXACT_SUITES, SUITES, HypothesisError, IdentityReport,
                               appendix_grid, compare, compare_inequality, integral_estimate_lhs, run_suites,
                               verify_integral_estimate, verify_ks_wave, write_csv)
from vnslab.jets import random_gaussian


@pytest.mark.parametrize("suite", EXACT_SUITES)
def test_exact_suites_pass_with_few_samples(suite):
    reports = run_suites([suite], seed=3, n_samples=500)
    assert reports
    for r in reports:
        if r.gating:
            assert r.passed, (r.name, r.max_rel)
            assert r.tol <= ANALYTIC_TOL


def test_fd_rerun_of_one_suite():
    reports = run_suites(["weights"], seed=1, n_samples=200, mode="fd")
    assert all(r.passed for r in reports if r.gating)
    assert any(r.tol == FD_TOL for r in reports)


def test_displayed_candidates_are_reported_and_non_gating():
    reports = run_suites(["commutators", "fields"], n_samples=300)
    candidates = [r for r in reports if "displayed" in r.name]
    assert candidates and all(not r.gating and not r.passed for r in candidates)


def test_unknown_suite():
    with pytest.raises(KeyError):
        run_suites(["nope"])
    assert set(EXACT_SUITES) <= set(SUITES)


def test_compare_flags_a_false_identity():
    pts = np.zeros((4, 7))
    bad = compare("bad", np.array([1.0, 2.0, 3.0, 4.0]), np.array([1.0, 2.0, 3.0, 4.1]), pts, 1e-9)
    assert not bad.passed and bad.max_abs == pytest.approx(0.1)
    ok = compare_inequality("ineq", np.zeros(4), np.ones(4), pts)
    assert ok.passed and ok.max_rel == 0.0


def test_csv_round_trip(tmp_path):
    rep = IdentityReport("x", 3, 1e-16, 2e-16, 1e-9, True, (1.0,) * 7, note="hello, world")
    path = tmp_path / "r.csv"
    write_csv([rep], path)
    write_csv([rep], path, append=True)
    rows = list(csv.reader(open(path)))
    assert rows[0][0] == "name" and len(rows) == 3
    assert rows[1][0] == "x" and rows[1][-1] == "hello, world"


def test_integral_estimate_grid_respects_hypotheses():
    cases = list(appendix_grid())
    assert len(cases) == 32
    for p, m, n, r, rho in cases:
        assert p - n + r < -1 and m > r
    with pytest.raises(HypothesisError):
        verify_integral_estimate(2, 1, 4, 1, 1.0)
    with pytest.raises(HypothesisError):
        verify_integral_estimate(2, 0, 6, 0, 1.0)
    assert integral_estimate_lhs(2, 0, 4, 0, 3.0) == pytest.approx(math.pi / 12, rel=1e-10)


def test_ks_wave_hypotheses_unmet_is_non_gating():
    rep = verify_ks_wave(random_gaussian(4, seed=0))
    assert not rep.gating and not rep.passed
    assert "hypotheses unmet" in rep.note
