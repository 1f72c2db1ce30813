import json
import logging
import random
from pathlib import Path

import pytest

from classical import alexander_polynomial
from conftest import knot
from diagram import MoveError, RoleError, linking_number, simplify, writhe
from khovanov import jones_polynomial
from kirby import (BandSpec, TwistRegion, _standard_meridian, apply_move, blow_down, blow_up, blow_up_meridians,
                   crossing_change_twist, derive_pair, full_twist, handle_slide, make_standard_rbg, parse_moves,
                   run_moves, slam_dunk, twist_region)
from surgery import linking_matrix, surgery_h1

EXAMPLES = Path(__file__).resolve().parent.parent / "data" / "examples"


def group(link):
    h1 = surgery_h1(link)
    return h1.rank, h1.torsion


def test_twist_region_reads_parallel_strands(trefoil):
    region = twist_region(trefoil, [1, 4], 1)
    assert abs(region.ell) == 2
    assert region.edges == [1, 4]


@pytest.mark.parametrize("sign", [1, -1])
def test_full_twist_changes_framing_by_ell_squared(trefoil, sign):
    region = twist_region(trefoil, [1, 4], sign)
    twisted = full_twist(trefoil, region)
    assert twisted.framings == (4 * sign,)
    assert len(twisted.diagram.crossings) == 5
    assert writhe(twisted) == 3 + 2 * sign


def test_negative_twist_unknots_the_right_trefoil(trefoil):
    twisted = simplify(full_twist(trefoil, twist_region(trefoil, [1, 4], -1)))
    assert not twisted.diagram.crossings
    assert twisted.framings == (-4,)


def test_single_strand_twist_is_a_framing_change(trefoil):
    twisted = full_twist(trefoil, twist_region(trefoil, [2], -1))
    assert twisted.framings == (-1,)
    assert len(twisted.diagram.crossings) == 3


def test_fuzzed_twists_follow_the_framing_law():
    rng = random.Random(11)
    for name in ("3_1_right", "4_1", "5_1"):
        link = knot(name)
        for _ in range(5):
            edge = rng.choice(sorted(link.diagram.occurrences))
            sign = rng.choice((1, -1))
            before = link.framings[0]
            link = full_twist(link, twist_region(link, [edge], sign))
            assert link.framings[0] == before + sign


def test_twist_region_validation():
    with pytest.raises(MoveError):
        TwistRegion(((1, 1), (4, 1)), sign=2, ell=2)
    with pytest.raises(MoveError):
        TwistRegion(((1, 1),), sign=1, ell=0)
    region = TwistRegion.from_dict({"strands": [[1, 1], [4, 1]], "sign": -1})
    assert region.ell == 2
    assert region.to_json() == {"strands": [[1, 1], [4, 1]], "sign": -1, "ell": 2}


def test_blow_up_then_down_restores_framings_and_h1(trefoil):
    for sign in (1, -1):
        up = blow_up(trefoil, [2], sign)
        assert up.component_count == 2
        assert up.framings == (sign, sign)
        assert abs(linking_number(up, 0, 1)) == 1
        assert group(up) == group(trefoil)
        down = blow_down(up, 1)
        assert down.component_count == 1
        assert down.framings == trefoil.framings
        assert jones_polynomial(down) == jones_polynomial(trefoil)


def test_blow_down_rejects_other_framings(hopf):
    with pytest.raises(MoveError):
        blow_down(hopf.with_framings([0, 2]), 1)


def test_blow_up_meridians_zeroes_the_framing():
    link = make_standard_rbg(3, 0)
    out = blow_up_meridians(link, link.role("R"))
    assert out.component_count == 6
    assert out.framings[out.role("R")] == 0
    assert sorted(out.framings).count(-1) == 3
    assert group(out) == group(link)


def test_crossing_change_unknots_the_trefoil(trefoil):
    changed = crossing_change_twist(trefoil, 0)
    assert changed.diagram.signs.count(-1) == 1
    assert changed.framings == (0,)
    assert not simplify(changed).diagram.crossings
    with pytest.raises(MoveError):
        crossing_change_twist(trefoil, 5)


def test_random_blow_ups_preserve_h1():
    rng = random.Random(5)
    for trial in range(100):
        link = make_standard_rbg(rng.randint(-3, 3), 0)
        before = group(link)
        for _ in range(2):
            edge = rng.choice(sorted(link.diagram.occurrences))
            sign = rng.choice((1, -1))
            link = blow_up(link, [edge], sign)
        assert group(link) == before, trial
        newest = link.component_count - 1
        link = blow_down(link, newest)
        assert group(link) == before, trial


def test_handle_slide_framing_formula(hopf):
    hopf = hopf.with_framings([1, 2])
    d = hopf.diagram
    face = next(fi for fi, sides in enumerate(d.faces)
                if {d.component_of_edge[e] for e, _ in sides} == {0, 1})
    sides = d.faces[face]
    moving = next(e for e, _ in sides if d.component_of_edge[e] == 0)
    over = next(e for e, _ in sides if d.component_of_edge[e] == 1)
    slid = handle_slide(hopf, BandSpec(0, 1, moving, over, (face,)))
    lm = linking_matrix(slid)
    assert slid.component_count == 2
    assert lm.entries[0][0] in (1 + 2 + 2, 1 + 2 - 2)
    assert group(slid) == group(hopf)


def test_handle_slide_rejects_bad_bands(hopf):
    with pytest.raises(MoveError):
        handle_slide(hopf, BandSpec(0, 0, 1, 2, (0,)))
    with pytest.raises(MoveError):
        handle_slide(hopf, BandSpec(0, 1, 1, 3, (0, 1)))
    with pytest.raises(MoveError):
        handle_slide(hopf, BandSpec(0, 1, 1, 3, (0,), twists=2))
    with pytest.raises(MoveError):
        handle_slide(hopf, BandSpec(0, 1, 1, 3, (9,)))
    with pytest.raises(MoveError):
        handle_slide(hopf, BandSpec(0, 1, 2, 3, (0,)))


def _face(d, *edges):
    return next(fi for fi, sides in enumerate(d.faces) if set(edges) <= {e for e, _ in sides})


def test_handle_slide_through_two_faces():
    link = make_standard_rbg(1, 0)
    d = link.diagram
    b, g = link.role("B"), link.role("G")
    # B's outer arc 5 and G's inner arc 4 sit on opposite sides of R's edge 1
    path = (_face(d, 1, 3, 5), _face(d, 1, 4, 6))
    before = linking_matrix(link)
    slid = handle_slide(link, BandSpec(b, g, 5, 4, path))
    assert slid.component_count == 3
    assert len(slid.diagram.crossings) >= len(d.crossings) + 2
    assert linking_matrix(slid) in (before.after_slide(b, g, 1), before.after_slide(b, g, -1))
    assert group(slid) == group(link)
    auto = handle_slide(link, BandSpec(b, g, 5, 4))
    assert linking_matrix(auto) in (before.after_slide(b, g, 1), before.after_slide(b, g, -1))


def test_handle_slide_changes_the_matrix_by_a_congruence(hopf):
    hopf = hopf.with_framings([1, 2])
    before = linking_matrix(hopf)
    for moving, over in ((0, 1), (1, 0)):
        d = hopf.diagram
        edges = [comp[0] for comp in d.traced_components]
        slid = handle_slide(hopf, BandSpec(moving, over, edges[moving], edges[over]))
        after = linking_matrix(slid)
        assert after in (before.after_slide(moving, over, 1), before.after_slide(moving, over, -1))
        assert after.det() == before.det()


def test_random_sequences_with_slides_preserve_h1():
    rng = random.Random(17)
    for trial in range(25):
        link = make_standard_rbg(rng.randint(-2, 2), 0)
        before = group(link)
        for _ in range(rng.randint(1, 10)):
            d = link.diagram
            comps = d.traced_components
            if len(d.crossings) < 80 and rng.random() < 0.5:
                moving, over = rng.sample(range(len(comps)), 2)
                band = BandSpec(moving, over, rng.choice(comps[moving]), rng.choice(comps[over]))
                matrix = linking_matrix(link)
                link = handle_slide(link, band)
                assert linking_matrix(link) in (matrix.after_slide(moving, over, 1),
                                                matrix.after_slide(moving, over, -1)), trial
            else:
                link = blow_up(link, [rng.choice(sorted(d.occurrences))], rng.choice((1, -1)))
            assert group(link) == before, trial


def test_trivial_rbg_slam_dunks_to_the_unknot():
    k_b, k_g = derive_pair(make_standard_rbg(2, 0))
    for derived in (k_b, k_g):
        assert derived.component_count == 1
        assert derived.framings == (0,)
        assert not derived.diagram.crossings


@pytest.mark.parametrize("r, ell", [(2, 1), (-2, -1)])
def test_one_clasp_pair_has_matching_polynomials(r, ell):
    k_b, k_g = derive_pair(make_standard_rbg(r, ell))
    assert k_b.framings == k_g.framings == (0,)
    assert jones_polynomial(k_b) == jones_polynomial(k_g)
    assert alexander_polynomial(k_b) == alexander_polynomial(k_g)


CLASPED = [([1, -1], []), ([1], [-1])]


@pytest.mark.parametrize("b_tangle, g_tangle", CLASPED)
def test_opposite_clasps_keep_both_meridians_standard(b_tangle, g_tangle):
    link = make_standard_rbg(1, 0, b_tangle, g_tangle)
    for tag in ("B", "G"):
        strands, faces = _standard_meridian(link.diagram, link.role(tag))
        assert len(strands) == 3
        assert len(faces) == 2


@pytest.mark.parametrize("r", [-1, 0, 2])
@pytest.mark.parametrize("b_tangle, g_tangle", CLASPED)
def test_clasped_rbg_slam_dunks_both_ways(r, b_tangle, g_tangle, caplog):
    caplog.set_level(logging.INFO, logger="kirby")
    k_b, k_g = derive_pair(make_standard_rbg(r, 0, b_tangle, g_tangle))
    assert caplog.text.count("2 strand(s) to slide") == 2
    for derived in (k_b, k_g):
        assert derived.component_count == 1
        assert derived.framings == (0,)
        assert surgery_h1(derived).factors == (0,)
    assert alexander_polynomial(k_b) == alexander_polynomial(k_g)


@pytest.mark.parametrize("b_tangle, g_tangle", CLASPED)
def test_symmetric_clasped_pair_has_matching_polynomials(b_tangle, g_tangle):
    k_b, k_g = derive_pair(make_standard_rbg(1, 0, b_tangle, g_tangle))
    assert jones_polynomial(k_b) == jones_polynomial(k_g)
    assert alexander_polynomial(k_b) == alexander_polynomial(k_g)


def test_slam_dunk_needs_a_special_link():
    with pytest.raises(MoveError):
        slam_dunk(make_standard_rbg(1, 1))
    with pytest.raises(RoleError):
        slam_dunk(make_standard_rbg(0, 0), keep="R")


def test_standard_rbg_rejects_inconsistent_tangles():
    with pytest.raises(MoveError):
        make_standard_rbg(0, 2, [1], [])


def test_move_script_from_file(trefoil):
    moves = parse_moves((EXAMPLES / "twist.moves.json").read_text())
    assert run_moves(trefoil, moves).framings == (4,)


def test_move_script_errors(trefoil):
    with pytest.raises(MoveError):
        parse_moves("{")
    with pytest.raises(MoveError):
        parse_moves(json.dumps([{"edges": [1]}]))
    with pytest.raises(MoveError):
        apply_move(trefoil, {"op": "teleport"})
    with pytest.raises(MoveError):
        run_moves(trefoil, [{"op": "twist"}])


def test_mirror_and_simplify_ops(trefoil):
    out = run_moves(trefoil, [{"op": "R1+", "site": 2, "sign": 1}, {"op": "simplify"}, {"op": "mirror"}])
    assert writhe(out) == -3
