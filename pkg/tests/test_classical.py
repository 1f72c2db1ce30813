import pytest

from classical import (T, alexander_from_seifert, alexander_polynomial, determinant, fox_matrix,
                       normalize_alexander, wirtinger)
from conftest import CORPUS, KNOTS, expected, knot
from diagram import DiagramValidationError, mirror, reidemeister_move


@pytest.mark.parametrize("name", KNOTS)
def test_alexander_matches_library(name):
    assert alexander_polynomial(knot(name)).to_json() == expected(name, "alexander")


@pytest.mark.parametrize("name", KNOTS)
def test_determinant_matches_library(name):
    assert determinant(knot(name)) == expected(name, "determinant")


@pytest.mark.parametrize("name", [n for n in KNOTS if "seifert" in CORPUS[n]])
def test_fox_calculus_agrees_with_seifert_matrix(name):
    assert alexander_polynomial(knot(name)) == alexander_from_seifert(CORPUS[name]["seifert"])


@pytest.mark.parametrize("name", KNOTS)
def test_alexander_is_symmetric_and_normalized(name):
    delta = alexander_polynomial(knot(name))
    assert delta.evaluate(1) == 1
    assert delta == delta.invert_variable()


@pytest.mark.parametrize("name", ["3_1_right", "4_1"])
def test_alexander_survives_mirror_and_reidemeister(name):
    link = knot(name)
    delta = alexander_polynomial(link)
    assert alexander_polynomial(mirror(link)) == delta
    assert alexander_polynomial(reidemeister_move(link, "R1+", 1, -1)) == delta
    assert alexander_polynomial(reidemeister_move(link, "R2+", (1, 4))) == delta


def test_wirtinger_presentation_of_trefoil(trefoil):
    presentation = wirtinger(trefoil)
    assert presentation.generators == 3
    assert len(presentation.relators) == 3
    assert all(len(word) == 4 for word in presentation.relators)
    assert str(presentation.abelianization()) == "Z"
    assert fox_matrix(presentation).shape == (3, 3)
    assert presentation.to_json()["generators"] == 3


def test_link_group_abelianizes_to_free_abelian(hopf):
    assert wirtinger(hopf).abelianization().rank == 2


def test_alexander_needs_a_knot(hopf):
    with pytest.raises(DiagramValidationError) as info:
        alexander_polynomial(hopf)
    assert info.value.invariant == "single component"


def test_normalization_centres_and_fixes_sign():
    assert normalize_alexander(T**3 - T**4 + T**5).to_json() == {"-1": 1, "0": -1, "1": 1}
    assert normalize_alexander(-(T**2) + 3 * T - 1).to_json() == {"-1": -1, "0": 3, "1": -1}
    with pytest.raises(DiagramValidationError):
        normalize_alexander(T + 1)
