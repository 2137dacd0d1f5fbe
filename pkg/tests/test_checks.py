import json
from fractions import Fraction

import pytest

from fibtheta.checks import (
    REGISTRY, Check, CheckKind, CheckReport, RunSummary, Status, compare_balls, run_all,
    run_check, select_checks, tolerance,
)
from fibtheta.errors import PrecisionError, UsageError
from fibtheta.exactnum import Ball, QuadElem
from fibtheta.fibonacci import IndexConvention, convention_probe
from fibtheta.products import thm1_rhs


def report(status: Status) -> CheckReport:
    return CheckReport("x", status, "1", "1", "0", 40)


# -- comparison -------------------------------------------------------------------

def test_tolerance():
    assert tolerance(40) == Fraction(1, 10 ** 35)


def test_compare_pass_fail_inconclusive():
    a = Ball(QuadElem(1), Fraction(1, 10 ** 40))
    b = Ball(QuadElem(1 + Fraction(1, 10 ** 41)), Fraction(1, 10 ** 40))
    assert compare_balls(a, b, 40)[0] == Status.PASS

    far = Ball(QuadElem(2), Fraction(1, 10 ** 40))
    status, gap = compare_balls(a, far, 40)
    assert status == Status.FAIL
    assert gap.startswith("9.9e-01") or gap.startswith("1.0e+00")

    wide = Ball(QuadElem(1), Fraction(1, 10 ** 20))
    assert compare_balls(a, wide, 40)[0] == Status.INCONCLUSIVE


# -- registry ---------------------------------------------------------------------

def test_registry_names():
    for name in ["thm1_xi1", "thm1_xi2", "eq09101", "eq09102", "eq09081", "eq113",
                 "eq492a", "eq492b", "eq453a", "eq453b", "eq3484", "convention",
                 "eq2_quartic_beta", "eq2_landen_prod_q1_4", "series_tp3", "series_eq47"]:
        assert name in REGISTRY
        assert REGISTRY[name].description


def test_thm1_xi1_passes():
    rep = run_check("thm1_xi1", 40)
    assert rep.status == Status.PASS
    assert rep.lhs_decimal.startswith("13.1509666577")
    assert Fraction(rep.gap_bound) < Fraction(1, 10 ** 35)


@pytest.mark.parametrize("name", [
    "thm1_xi2", "eq09101", "eq09102", "eq09081", "eq113", "eq492a", "eq492b",
    "eq453a", "eq453b", "eq3484", "eq2_quartic_q1_2", "eq2_landen_sum_beta",
    "eq2_landen_prod_q1_4",
])
def test_numeric_identities_pass(name):
    assert run_check(name, 30).status == Status.PASS


@pytest.mark.parametrize("name", [
    "eq453a_telescoping", "eq453b_telescoping", "eq09101_factors", "eq09102_factors",
])
def test_exact_identities_pass(name):
    rep = run_check(name, 20)
    assert rep.status == Status.PASS
    assert rep.gap_bound == "0"


def test_convention_probe_check():
    rep = run_check("convention", 10)
    assert rep.status == Status.PASS
    assert rep.lhs_decimal == "13.1509666577"
    assert 0 < Fraction(rep.gap_bound) < Fraction(1, 10 ** 10)


def test_convention_mismatch_reports_distance():
    def swapped(p):
        report = convention_probe(p)
        for entry in report.entries:
            entry.reproduces_printed = entry.convention == IndexConvention.SHIFTED
        return report

    registry = {"swapped": Check("swapped", CheckKind.PROBE, swapped)}
    rep = run_check("swapped", 10, registry=registry)
    assert rep.status == Status.FAIL
    # certified lower bound on |xi1 - 13.1509666577|
    assert 0 < Fraction(rep.gap_bound) < Fraction(1, 10 ** 10)


@pytest.mark.parametrize("name", sorted(REGISTRY))
def test_every_check_passes_at_default_precision(name):
    assert run_check(name, 40).status == Status.PASS


@pytest.mark.parametrize("name", sorted(n for n in REGISTRY if n.startswith("series_")))
def test_series_checks_pass(name):
    assert run_check(name, 20, order=120).status == Status.PASS


# -- failures and errors ------------------------------------------------------------

def test_mutated_identity_fails():
    def mutated(p):
        rhs = thm1_rhs("xi1", p + 10)
        return REGISTRY["thm1_xi1"].run(p)[0], rhs * Fraction(3, 2)

    registry = {"mutated": Check("mutated", CheckKind.NUMERIC, mutated)}
    rep = run_check("mutated", 30, registry=registry)
    assert rep.status == Status.FAIL
    # gap bound is a certified lower bound, about xi1 / 2
    assert rep.gap_bound.startswith("6.")


def test_uncertifiable_check_is_inconclusive():
    def broken(p):
        raise PrecisionError("cannot reach the target radius")

    registry = {"broken": Check("broken", CheckKind.NUMERIC, broken)}
    rep = run_check("broken", 20, registry=registry)
    assert rep.status == Status.INCONCLUSIVE
    assert "target radius" in rep.gap_bound


def test_unknown_check():
    with pytest.raises(UsageError):
        run_check("eq999")


def test_precision_too_low():
    with pytest.raises(UsageError):
        run_check("thm1_xi1", 5)


def test_select_checks():
    assert select_checks("thm1_xi1") == ["thm1_xi1"]
    assert select_checks("thm1_*") == ["thm1_xi1", "thm1_xi2"]
    assert len(select_checks("eq2_*")) == 9
    assert select_checks() == sorted(REGISTRY)
    with pytest.raises(UsageError):
        select_checks("nothing_*")


# -- summaries --------------------------------------------------------------------

def test_exit_codes():
    assert RunSummary([report(Status.PASS)]).exit_code == 0
    assert RunSummary([report(Status.PASS), report(Status.INCONCLUSIVE)]).exit_code == 2
    assert RunSummary([report(Status.INCONCLUSIVE), report(Status.FAIL)]).exit_code == 1
    assert RunSummary([]).exit_code == 0


def test_report_json_keys():
    rep = run_check("eq453a", 20)
    data = json.loads(rep.to_json())
    assert set(data) == {"name", "status", "lhs", "rhs", "gap_bound",
                         "precision_digits", "elapsed_ms"}
    assert data["status"] == "pass"
    assert data["precision_digits"] == 20


def test_run_all_selected():
    summary = run_all(20, order=60, pattern="eq453*")
    assert [r.name for r in summary.reports] == ["eq453a", "eq453a_telescoping",
                                                "eq453b", "eq453b_telescoping"]
    assert summary.exit_code == 0
    assert summary.to_dict()["pass"] == 4


@pytest.mark.slow
def test_run_all_low_precision_has_no_failures():
    summary = run_all(10, order=60)
    assert summary.counts["fail"] == 0
    assert len(summary.reports) == len(REGISTRY)


def test_run_all_at_default_precision():
    summary = run_all(40)
    assert summary.exit_code == 0
    assert summary.counts["pass"] == len(REGISTRY)


def test_reports_repeat_exactly():
    first = json.loads(run_check("thm1_xi2", 30).to_json())
    second = json.loads(run_check("thm1_xi2", 30).to_json())
    first.pop("elapsed_ms")
    second.pop("elapsed_ms")
    assert first == second
