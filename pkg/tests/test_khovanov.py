import random

import pytest

import khovanov
from classical import alexander_polynomial
from conftest import KNOTS, NONTRIVIAL, expected, knot, random_moves
from diagram import BudgetExceeded, DiagramValidationError, KBError, mirror
from khovanov import (KHOVANOV, LEE, FilteredComplex, chain_complex, jones_polynomial, khovanov_homology,
                      lee_rank, s_invariant)


@pytest.mark.parametrize("name", KNOTS)
def test_khovanov_matches_library(name):
    assert khovanov_homology(knot(name)).to_json() == expected(name, "kh")


@pytest.mark.parametrize("name", KNOTS)
def test_scan_agrees_with_dense_cube(name):
    link = knot(name)
    assert khovanov_homology(link, "scan") == khovanov_homology(link, "dense")
    assert s_invariant(link, "scan").s == s_invariant(link, "dense").s


@pytest.mark.parametrize("name", KNOTS)
def test_s_matches_library(name):
    assert s_invariant(knot(name)).s == expected(name, "s")


@pytest.mark.parametrize("name", NONTRIVIAL)
def test_s_changes_sign_under_mirror(name):
    link = knot(name)
    assert s_invariant(mirror(link)).s == -s_invariant(link).s


def test_s_result_brackets_s(trefoil):
    result = s_invariant(trefoil)
    assert (result.s_min, result.s, result.s_max) == (1, 2, 3)
    assert result.to_json()["s"] == 2


@pytest.mark.parametrize("name", KNOTS)
def test_jones_is_the_graded_euler_characteristic(name):
    link = knot(name)
    assert jones_polynomial(link).to_json() == expected(name, "jones")
    assert jones_polynomial(link) == khovanov_homology(link).euler_characteristic()


@pytest.mark.parametrize("engine", ["scan", "dense"])
@pytest.mark.parametrize("name", KNOTS)
def test_complexes_are_complexes(name, engine):
    link = knot(name)
    for rule in (KHOVANOV, LEE):
        cx = chain_complex(link, rule, engine)
        assert cx.d_squared_is_zero()
        assert cx.check_filtration()


@pytest.mark.parametrize("name", KNOTS)
def test_lee_rank_of_a_knot_is_two(name):
    assert lee_rank(knot(name)) == 2


def _rigged(generators, differential):
    def build(link, rule):
        return FilteredComplex(generators, differential, rule, len(generators), 1)
    return build


def test_broken_differential_is_rejected(trefoil, monkeypatch):
    monkeypatch.setattr(khovanov, "_scan_complex", _rigged([(0, 0), (1, 0), (2, 0)], {0: {1: 1}, 1: {2: 1}}))
    with pytest.raises(KBError, match="square to zero"):
        chain_complex(trefoil)


def test_broken_grading_is_rejected(trefoil, monkeypatch):
    monkeypatch.setattr(khovanov, "_scan_complex", _rigged([(0, 0), (1, 2)], {0: {1: 1}}))
    with pytest.raises(KBError, match="grading"):
        chain_complex(trefoil, KHOVANOV)
    monkeypatch.setattr(khovanov, "_scan_complex", _rigged([(0, 2), (1, 0)], {0: {1: 1}}))
    with pytest.raises(KBError, match="grading"):
        chain_complex(trefoil, LEE)


def test_lee_rank_mismatch_raises(trefoil, monkeypatch):
    monkeypatch.setattr(khovanov, "_scan_complex", _rigged([(0, 1), (0, -1), (1, 3)], {}))
    with pytest.raises(KBError, match="rank 3, expected 2"):
        lee_rank(trefoil)


def test_hopf_link(hopf):
    assert khovanov_homology(hopf).to_json() == [[0, 0, 1], [0, 2, 1], [2, 4, 1], [2, 6, 1]]
    assert lee_rank(hopf) == 4
    assert jones_polynomial(hopf).to_json() == {"0": 1, "2": 1, "4": 1, "6": 1}
    with pytest.raises(DiagramValidationError):
        s_invariant(hopf)


def test_budget_is_enforced(trefoil):
    with pytest.raises(BudgetExceeded) as info:
        khovanov_homology(trefoil, budget=2)
    assert info.value.projected_cost == 8.0
    with pytest.raises(KBError):
        chain_complex(trefoil, KHOVANOV, "cube")


@pytest.mark.slow
@pytest.mark.parametrize("name", KNOTS)
def test_invariants_survive_random_reidemeister_moves(name):
    link = knot(name)
    kh, jones = khovanov_homology(link), jones_polynomial(link)
    s, alexander = s_invariant(link).s, alexander_polynomial(link)
    rng = random.Random(name)
    for _ in range(20):
        moved = random_moves(link, rng, rng.randint(1, 3))
        assert khovanov_homology(moved) == kh
        assert jones_polynomial(moved) == jones
        assert alexander_polynomial(moved) == alexander
        assert s_invariant(moved).s == s
