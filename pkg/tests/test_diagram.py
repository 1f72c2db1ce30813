import json
import random

import pytest

from conftest import KNOTS, NONTRIVIAL, expected, knot, random_moves
from diagram import (DiagramSyntaxError, DiagramValidationError, LaurentPolynomial, MoveError, OrientedDiagram,
                     canonical, diagram_to_dict, linking_number, mirror, parse_diagram, reidemeister_move,
                     serialize_diagram, simplify, writhe)
from kirby import make_standard_rbg


def test_parse_rejects_malformed_json():
    with pytest.raises(DiagramSyntaxError) as info:
        parse_diagram('{"crossings": [[1, 2, 3')
    assert "line 1" in str(info.value)


@pytest.mark.parametrize("doc", [
    [],
    {"crossings": [[1, 2, 3]]},
    {"crossings": "none"},
    {"unknotted_components": -1},
    {"crossings": [], "unknotted_components": 1, "framings": ["0"]},
    {"unknotted_components": 1, "name": 7},
])
def test_parse_rejects_bad_shapes(doc):
    with pytest.raises(DiagramSyntaxError):
        parse_diagram(json.dumps(doc))


def test_dangling_edge_is_a_validation_error():
    with pytest.raises(DiagramValidationError) as info:
        parse_diagram(json.dumps({"crossings": [[1, 5, 2, 4], [3, 1, 4, 6], [5, 3, 6, 7]]}))
    assert info.value.invariant == "dangling edge"


def test_framing_count_must_match_components():
    with pytest.raises(DiagramValidationError):
        parse_diagram(json.dumps({"unknotted_components": 2, "framings": [0]}))


def test_roles_must_name_three_components(hopf):
    doc = diagram_to_dict(hopf)
    doc["roles"] = {"R": 0, "B": 1}
    with pytest.raises(DiagramValidationError):
        parse_diagram(json.dumps(doc))


@pytest.mark.parametrize("name", KNOTS)
def test_writhe_matches_library(name):
    assert writhe(knot(name)) == expected(name, "writhe")


def test_right_trefoil_is_traced_in_label_order(trefoil):
    assert trefoil.diagram.traced_components == ((1, 2, 3, 4, 5, 6),)
    assert trefoil.diagram.signs == (1, 1, 1)


def test_hopf_link_components_and_linking(hopf):
    assert hopf.component_count == 2
    assert linking_number(hopf, 0, 1) == 1
    with pytest.raises(DiagramValidationError):
        linking_number(hopf, 0, 0)


def test_odd_signed_crossing_count_is_rejected(hopf, monkeypatch):
    honest = OrientedDiagram.strands
    monkeypatch.setattr(OrientedDiagram, "strands", lambda self, ci: (0, 0) if ci == 1 else honest(self, ci))
    with pytest.raises(DiagramValidationError) as info:
        linking_number(hopf, 0, 1)
    assert info.value.invariant == "linking parity"


@pytest.mark.parametrize("name", NONTRIVIAL)
def test_mirror_negates_writhe_and_is_an_involution(name):
    link = knot(name)
    assert writhe(mirror(link)) == -writhe(link)
    assert serialize_diagram(mirror(mirror(link))) == serialize_diagram(link)


@pytest.mark.parametrize("name", KNOTS)
def test_serialization_round_trip_is_canonical(name):
    link = knot(name)
    text = serialize_diagram(link)
    assert serialize_diagram(parse_diagram(text)) == text
    assert serialize_diagram(canonical(link)) == text


def _round_trip_corpus():
    rng = random.Random(5)
    for name in KNOTS:
        for i in range(8):
            yield f"{name}-{i}", random_moves(knot(name), rng, rng.randint(1, 4))
    for r, ell, b_tangle, g_tangle in [(0, 0, [], []), (2, 1, [1], []), (-2, -1, [-1], []), (1, 0, [1, -1], []),
                                       (-3, 0, [1], [-1]), (4, 0, [], [1, -1]), (0, 2, [1, 1], []),
                                       (1, -2, [-1], [-1]), (5, 0, [1, -1], [1, -1]), (-1, 1, [1, 1], [-1]),
                                       (3, -1, [], [-1]), (0, 0, [-1, 1], [])]:
        yield f"rbg({r},{ell})", make_standard_rbg(r, ell, b_tangle, g_tangle)


@pytest.mark.parametrize("label, link", list(_round_trip_corpus()))
def test_round_trip_on_moved_and_generated_diagrams(label, link):
    text = serialize_diagram(link)
    assert serialize_diagram(parse_diagram(text)) == text
    assert serialize_diagram(canonical(parse_diagram(text))) == text
    assert parse_diagram(text).framings == link.framings


def test_r1_then_simplify_returns_the_diagram(trefoil):
    for sign in (1, -1):
        kinked = reidemeister_move(trefoil, "R1+", 3, sign)
        assert len(kinked.diagram.crossings) == 4
        assert writhe(kinked) == 3 + sign
        assert serialize_diagram(simplify(kinked)) == serialize_diagram(trefoil)


def test_r2_adds_two_crossings_of_opposite_sign(trefoil):
    poked = reidemeister_move(trefoil, "R2+", (1, 4))
    assert len(poked.diagram.crossings) == 5
    assert writhe(poked) == writhe(trefoil)
    assert len(simplify(poked).diagram.crossings) == 3


def test_r1_on_crossingless_component():
    unknot = knot("unknot")
    kinked = reidemeister_move(unknot, "R1+", "U0", 1)
    assert kinked.component_count == 1
    assert len(kinked.diagram.crossings) == 1
    assert not simplify(kinked).diagram.crossings


def test_illegal_moves_raise(trefoil):
    with pytest.raises(MoveError):
        reidemeister_move(trefoil, "R1-", 0)
    with pytest.raises(MoveError):
        reidemeister_move(trefoil, "R2-", (0, 1))
    with pytest.raises(MoveError):
        reidemeister_move(trefoil, "R3", 0)
    with pytest.raises(MoveError):
        reidemeister_move(trefoil, "R1+", 99)


def test_random_reidemeister_moves_preserve_writhe_up_to_kinks():
    rng = random.Random(7)
    link = knot("4_1")
    kinks = 0
    for _ in range(6):
        edge = rng.choice(sorted(link.diagram.occurrences))
        sign = rng.choice((1, -1))
        link = reidemeister_move(link, "R1+", edge, sign)
        kinks += sign
    assert writhe(link) == kinks
    assert len(simplify(link).diagram.crossings) == 4


def test_laurent_polynomial_arithmetic():
    q = LaurentPolynomial.monomial(1)
    unknot = q + LaurentPolynomial.monomial(-1)
    assert unknot.to_json() == {"-1": 1, "1": 1}
    assert (unknot * unknot).coefficients == {-2: 1, 0: 2, 2: 1}
    assert (unknot - unknot).is_zero()
    assert unknot.invert_variable() == unknot
    assert unknot.evaluate(1) == 2
    assert str(LaurentPolynomial.from_dict({-1: 1, 0: -1, 1: 1}, "t")) == "t - 1 + t^-1"
