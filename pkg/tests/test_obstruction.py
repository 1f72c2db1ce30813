import math

import pytest

from conftest import knot
from diagram import KBError, MoveError
from kirby import make_standard_rbg
from obstruction import (CONJECTURE, CONJECTURE_TEXT, AssumptionSet, ConsistencyError, PFBounds, classify,
                         pf_bounds_from_tau, pf_minus_from_biprojective, pf_upper_from_twists, run_pipeline,
                         satellite_window, small_r_negative_rule, unknot_bounds)


def _satisfies(k: int, x: int) -> bool:
    return k >= 0 and k - math.sqrt(k) >= x


@pytest.mark.parametrize("tau", range(-10, 11))
def test_tau_bounds_are_minimal(tau):
    bounds = pf_bounds_from_tau(tau)
    k = bounds.plus_lower
    assert _satisfies(k, 2 * tau)
    assert k == 0 or not _satisfies(k - 1, 2 * tau)
    m = -bounds.minus_upper
    assert _satisfies(m, -2 * tau)
    assert m == 0 or not _satisfies(m - 1, -2 * tau)


def test_tau_one_forces_pf_plus_at_least_four():
    assert pf_bounds_from_tau(1).plus_lower == 4
    assert pf_bounds_from_tau(1).minus_upper == 0
    assert pf_bounds_from_tau(-1).minus_upper == -4


def test_pf_bounds_validation_and_combination():
    with pytest.raises(KBError):
        PFBounds(plus_lower=-1)
    with pytest.raises(KBError):
        PFBounds(plus_lower=4, plus_upper=2)
    combined = PFBounds(plus_upper=6, provenance={"plus_upper": "user"}).combine(pf_bounds_from_tau(1))
    assert (combined.plus_lower, combined.plus_upper) == (4, 6)
    assert combined.provenance["plus_lower"] == "tau-inequality"
    assert combined.to_json()["pf_minus"] == ["-inf", 0]
    assert unknot_bounds().is_biprojective
    with pytest.raises(KBError):
        pf_minus_from_biprojective(pf_bounds_from_tau(1))


STATEMENTS = {
    1: "If K is H-slice in some #nCP², then s(K') ≥ 0",
    2: "If K is H-slice in some #n(-CP²), then s(K') ≤ 0",
    3: "If K is slice (or biprojectively H-slice), then s(K') = 0",
}


@pytest.mark.parametrize("r", range(-5, 6))
def test_small_biprojective_truth_table(r):
    verdict = classify(r, unknot_bounds(), AssumptionSet(small_unknot_R=True))
    assert verdict.applicable_cases == (1, 2, 3)
    statements = {imp.statement for imp in verdict.implications if imp.subject == "K"}
    assert statements == set(STATEMENTS.values())
    assert len(verdict.implications) == 6
    assert not any(imp.conditional for imp in verdict.implications)
    assert verdict.blocking is None


@pytest.mark.parametrize("r", range(-5, 6))
def test_biprojective_without_smallness(r):
    verdict = classify(r, unknot_bounds())
    cases = set(verdict.applicable_cases)
    assert (1 in cases) == (r >= 0)
    assert (2 in cases) == (r <= 0)
    assert (3 in cases) == (r == 0)


@pytest.mark.parametrize("r", [-3, 3])
def test_conjecture_opens_the_remaining_case(r):
    verdict = classify(r, unknot_bounds(), AssumptionSet(assume_conjecture=True))
    assert verdict.applicable_cases == (1, 2, 3)
    conditional = [imp for imp in verdict.implications if imp.conditional]
    assert conditional
    assert all(CONJECTURE in imp.flags for imp in conditional)
    assert all(imp.to_json()["watermark"] == CONJECTURE_TEXT for imp in conditional)


def test_undetermined_window_blocks_everything():
    verdict = classify(2, PFBounds(plus_lower=4))
    assert verdict.applicable_cases == ()
    assert verdict.blocking == "r in the undetermined window [PF_-(R), PF_+(R))"
    assert verdict.to_json()["implications"] == []


def test_unknown_comparison_is_reported():
    verdict = classify(2, PFBounds())
    assert verdict.applicable_cases == ()
    assert verdict.blocking == "comparison of r with PF_±(R) is unknown from the given bounds"


def test_contradiction_for_negative_s_of_the_partner():
    verdict = classify(2, unknot_bounds(), AssumptionSet(s_Kprime=-2))
    assert 1 in verdict.applicable_cases
    assert verdict.contradiction_found
    assert "K is not slice nor H-slice in any #nCP²" in verdict.conclusions
    assert verdict.contradictions[0]["s(K')"] == -2


def test_odd_s_is_rejected():
    with pytest.raises(KBError):
        AssumptionSet(s_K=1)


def test_small_negative_framing_rule():
    expectation = small_r_negative_rule(-2, True, s_K=-2)
    assert expectation.violations == ("s(K) = -2 < 0",)
    assert small_r_negative_rule(2, True) is None
    assert small_r_negative_rule(-2, False) is None
    verdict = classify(-2, unknot_bounds(), AssumptionSet(small_unknot_R=True, s_K=0, s_Kprime=2))
    assert verdict.expectation is not None
    assert verdict.expectation.violations == ()


def test_twist_script_bounds_pf_plus(trefoil):
    bounds = pf_upper_from_twists(trefoil, [{"op": "twist", "edges": [1, 4], "sign": -1}, {"op": "simplify"}])
    assert bounds.plus_upper == 4
    assert bounds.provenance["plus_upper"] == "twist-construction"
    exact = bounds.combine(pf_bounds_from_tau(1))
    assert exact.plus_lower == exact.plus_upper == 4


def test_crossing_change_bounds_pf_minus(trefoil):
    bounds = pf_upper_from_twists(trefoil, [{"op": "crossing_change", "crossing": 0}, {"op": "simplify"}])
    assert bounds.minus_lower == 0
    assert bounds.plus_upper is None


def test_twist_script_must_unknot(trefoil):
    with pytest.raises(MoveError):
        pf_upper_from_twists(trefoil, [{"op": "twist", "edges": [2], "sign": -1}])
    assert pf_upper_from_twists(knot("unknot"), []).is_biprojective


def test_satellite_window():
    blocked = satellite_window(2, 1)
    assert blocked.methods_apply is False
    assert blocked.reason.startswith("methods do not apply")
    assert blocked.alexander_preserved
    assert satellite_window(5, 1).methods_apply is None
    assert satellite_window(-1, 1).methods_apply is None


def test_pipeline_on_trivial_rbg():
    doc = run_pipeline(make_standard_rbg(0, 0))
    assert doc["rbg"]["is_special"]
    assert doc["r_is_unknot"]
    assert doc["errors"] == []
    assert doc["knots"]["K"]["s"] == doc["knots"]["K'"]["s"] == 0
    assert doc["knots"]["K"]["alexander_is_one"]
    assert doc["verdict"]["applicable_cases"] == [1, 2, 3]
    assert not doc["verdict"]["contradiction_found"]


def test_pipeline_reports_non_special_links():
    doc = run_pipeline(make_standard_rbg(1, 1))
    assert not doc["rbg"]["is_special"]
    assert doc["errors"][0]["stage"] == "validate_rbg"
    assert doc["knots"] == {}


def test_pipeline_raises_on_broken_expectations():
    with pytest.raises(ConsistencyError):
        run_pipeline(make_standard_rbg(-1, 0), AssumptionSet(s_K=-2))
