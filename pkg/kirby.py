"""
Framed-link calculus on PD diagrams.

Every move here is built from four diagram surgeries:

* a *cut line*: an arc through consecutive faces crossing a list of edges,
  the place where braids and meridians get inserted;
* a *full twist* braid spliced into the strands of a cut line;
* a *meridian*: a new unknot encircling the strands of a cut line;
* a *band*: two edges sharing a face, cut and reconnected across it.

Handle slides push a component over a framed parallel copy of another one
(a cable whose copies are twisted until their pairwise linking equals the
framing), then band the two together.  A band through several faces
starts as a finger of the moving component pushed over the edges between
them.

Usage:

```python
import kirby
rbg = kirby.make_standard_rbg(r=2, ell=1)
k_b, k_g = kirby.derive_pair(rbg)
```
"""
from __future__ import annotations

import json
import logging
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from diagram import (
    FramedLink,
    KBError,
    MoveError,
    OrientedDiagram,
    RoleError,
    Side,
    Slot,
    _assemble,
    _carry,
    _label_comp_map,
    _r2_remove,
    bigons,
    delete_components,
    linking_number,
    mirror,
    reidemeister_move,
    reverse,
    simplify,
    writhe,
)
from surgery import linking_matrix, piercing_edges, validate_rbg

LOGGER = logging.getLogger(__name__)

# (edge, bottom slot, top slot, edge runs bottom to top)
Cut = list[tuple[int, Slot, Slot, bool]]


# ------------------------------------------------------
# MOVE DATA
# ------------------------------------------------------
@dataclass(frozen=True)
class TwistRegion:
    """
    A disk crossed by ``strands``, given as (edge, direction) pairs in order
    along a cut line.  Direction is +1 when the edge runs from the bottom
    of the line to the top.  ``faces`` optionally pins the face between each
    consecutive pair of strands.
    """

    strands: tuple[tuple[int, int], ...]
    sign: int = 1
    ell: int = 0
    faces: tuple[int, ...] | None = None

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise MoveError(f"twist sign must be +1 or -1, got {self.sign}")
        if any(direction not in (1, -1) for _, direction in self.strands):
            raise MoveError("strand directions must be +1 or -1")
        if self.ell != sum(direction for _, direction in self.strands):
            raise MoveError(f"ell={self.ell} does not match the strand directions")

    @property
    def edges(self) -> list[int]:
        return [edge for edge, _ in self.strands]

    @classmethod
    def from_dict(cls, doc: Mapping) -> "TwistRegion":
        strands = tuple((int(e), int(s)) for e, s in doc["strands"])
        faces = tuple(int(f) for f in doc["faces"]) if doc.get("faces") is not None else None
        return cls(strands, int(doc.get("sign", 1)), sum(s for _, s in strands), faces)

    def to_json(self) -> dict:
        doc = {"strands": [list(s) for s in self.strands], "sign": self.sign, "ell": self.ell}
        if self.faces is not None:
            doc["faces"] = list(self.faces)
        return doc


@dataclass(frozen=True)
class BandSpec:
    moving: int
    over: int
    attach_edge_moving: int
    attach_edge_over: int
    path: tuple[int, ...] = ()
    twists: int = 0

    @classmethod
    def from_dict(cls, doc: Mapping) -> "BandSpec":
        try:
            return cls(int(doc["moving"]), int(doc["over"]), int(doc["attach_edge_moving"]),
                       int(doc["attach_edge_over"]), tuple(int(f) for f in doc.get("path", ())),
                       int(doc.get("twists", 0)))
        except KeyError as exc:
            raise MoveError(f"band is missing field {exc.args[0]!r}") from exc

    def to_json(self) -> dict:
        return {
            "moving": self.moving,
            "over": self.over,
            "attach_edge_moving": self.attach_edge_moving,
            "attach_edge_over": self.attach_edge_over,
            "path": list(self.path),
            "twists": self.twists,
        }


# ------------------------------------------------------
# DIAGRAM SURGERY PRIMITIVES
# ------------------------------------------------------
class _Builder:
    """Mutable crossing list with fresh labels and head bookkeeping."""

    def __init__(self, d: OrientedDiagram):
        self.unknotted = d.unknotted_components
        self.crossings = [list(c) for c in d.crossings]
        self.heads: dict[int, Slot] = dict(d.heads)
        self.top = d.max_label

    def fresh(self) -> int:
        self.top += 1
        return self.top

    def add(self, crossing: Sequence[int], entering: Iterable[int] = ()) -> int:
        """Append a crossing; ``entering`` lists the labels that end at it."""
        index = len(self.crossings)
        self.crossings.append(list(crossing))
        for label in entering:
            self.heads[label] = (index, list(crossing).index(label))
        return index

    def put(self, slot: Slot, label: int) -> None:
        self.crossings[slot[0]][slot[1]] = label

    def build(self) -> OrientedDiagram:
        return _assemble(self.crossings, self.unknotted, self.heads)


def _other_end(d: OrientedDiagram, edge: int, slot: Slot) -> Slot:
    first, second = d.occurrences[edge]
    return second if first == slot else first


def _faces_touching(d: OrientedDiagram, *edges: int) -> list[int]:
    return [fi for fi, sides in enumerate(d.faces) if all(any(s[0] == e for s in sides) for e in edges)]


def _face_of_side(d: OrientedDiagram, side: Side) -> int:
    for fi, sides in enumerate(d.faces):
        if side in sides:
            return fi
    raise MoveError(f"side {side} lies on no face")


def _cut_line(d: OrientedDiagram, edges: Sequence[int], faces: Sequence[int] | None = None) -> Cut:
    """
    Orient an arc crossing ``edges`` left to right.

    Consecutive edges must share a face, which the arc passes through.  An
    edge's bottom end is the one whose side faces the previous face; a lone
    edge is cut with its tail at the bottom.
    """
    edges = [int(e) for e in edges]
    if not edges:
        raise MoveError("a cut line needs at least one edge")
    if len(set(edges)) != len(edges):
        raise MoveError(f"cut line crosses edge {next(e for e in edges if edges.count(e) > 1)} twice")
    for e in edges:
        if e not in d.occurrences:
            raise MoveError(f"no edge {e}")
    if faces is not None and len(faces) != len(edges) - 1:
        raise MoveError("a cut line needs one face between each pair of consecutive edges")
    if len(edges) == 1:
        e = edges[0]
        return [(e, d.tail(e), d.head(e), True)]

    def search(i: int, bottom: Slot | None):
        if i == len(edges) - 1:
            return []
        allowed = [faces[i]] if faces is not None else range(len(d.faces))
        for fi in allowed:
            sides = d.faces[fi]
            tops = [s for e, s in sides if e == edges[i] and s != bottom]
            nexts = [s for e, s in sides if e == edges[i + 1]]
            for top in tops:
                for nxt in nexts:
                    rest = search(i + 1, nxt)
                    if rest is not None:
                        return [(top, nxt)] + rest
        return None

    found = search(0, None)
    if found is None:
        raise MoveError(f"edges {edges} are not joined by a chain of faces")
    bottoms = [_other_end(d, edges[0], found[0][0])] + [nxt for _, nxt in found]
    tops = [top for top, _ in found] + [_other_end(d, edges[-1], found[-1][1])]
    return [(e, b, t, d.head(e) == t) for e, b, t in zip(edges, bottoms, tops)]


def _full_twist_word(k: int, sign: int) -> list[tuple[int, int]]:
    if sign > 0:
        return [(j, 1) for _ in range(k) for j in range(k - 1)]
    return [(j, -1) for _ in range(k) for j in reversed(range(k - 1))]


def _braid(b: _Builder, strands: list[list], word: Iterable[tuple[int, int]]) -> None:
    """
    Stack braid generators on ``strands`` ([label, up] per position).

    A positive generator carries the left strand over the right one.
    """
    for j, sign in word:
        (a, up_left), (c, up_right) = strands[j], strands[j + 1]
        x, y = b.fresh(), b.fresh()
        if sign > 0:
            crossing = (c, x, y, a) if up_right else (y, a, c, x)
        else:
            crossing = (a, c, x, y) if up_left else (x, y, a, c)
        b.add(crossing, [a if up_left else x, c if up_right else y])
        strands[j], strands[j + 1] = [y, up_right], [x, up_left]


def _close_cut(b: _Builder, cut: Cut, strands: list[list]) -> None:
    for (_, _, top, up), (label, _) in zip(cut, strands):
        b.put(top, label)
        if up:
            b.heads[label] = top


def _ell(d: OrientedDiagram, cut: Cut) -> dict[int, int]:
    """Signed strand count of each component through a cut line."""
    counts: dict[int, int] = {}
    for edge, _, _, up in cut:
        comp = d.component_of_edge[edge]
        counts[comp] = counts.get(comp, 0) + (1 if up else -1)
    return counts


def _twist(link: FramedLink, cut: Cut, sign: int, times: int = 1, framing_law: bool = True) -> FramedLink:
    d = link.diagram
    b = _Builder(d)
    strands = [[edge, up] for edge, _, _, up in cut]
    for _ in range(times):
        _braid(b, strands, _full_twist_word(len(cut), sign))
    _close_cut(b, cut, strands)
    new = b.build()
    comp_map = _label_comp_map(d, new)
    out = _carry(link, new, comp_map)
    if not framing_law:
        return out
    framings = list(out.framings)
    for comp, ell in _ell(d, cut).items():
        framings[comp_map[comp]] += sign * times * ell * ell
    return out.with_framings(framings)


def _encircle(b: _Builder, cut: Cut) -> tuple[int, Cut]:
    """
    Wrap a new unknot around the strands of ``cut``.

    The unknot runs over the strands below the line and under them above
    it, so it links each upward strand +1.  Returns one of its labels and
    the cut line through the strand pieces above it.
    """
    k = len(cut)
    w = [b.fresh() for _ in range(k + 1)]
    v = [0] + [b.fresh() for _ in range(k - 1)]
    above: Cut = []
    for i, (e, _, top, up) in enumerate(cut, start=1):
        m, n = b.fresh(), b.fresh()
        u_in = w[i - 1]
        b.add((e, w[i], m, u_in) if up else (m, u_in, e, w[i]), [e if up else m, u_in])
        q_in = v[i] if i < k else w[k]
        q_out = w[0] if i == 1 else v[i - 1]
        q = b.add((q_in, n, q_out, m), [q_in, m if up else n])
        b.put(top, n)
        if up:
            b.heads[n] = top
        above.append((n, (q, 1), top, up))
    return w[0], above


def _check_sign(sign: int) -> int:
    if sign not in (1, -1):
        raise MoveError(f"sign must be +1 or -1, got {sign}")
    return sign


def _ensure_traced(link: FramedLink, component: int) -> tuple[FramedLink, int]:
    """Give a crossingless component an edge label by adding a kink."""
    link._check_component(component)
    traced = len(link.diagram.traced_components)
    if component < traced:
        return link, component
    return reidemeister_move(link, "R1+", f"U{component - traced}", 1), traced


# ------------------------------------------------------
# TWISTS, BLOW-UPS AND BLOW-DOWNS
# ------------------------------------------------------
def twist_region(link: FramedLink, edges: Sequence[int], sign: int = 1,
                 faces: Sequence[int] | None = None) -> TwistRegion:
    """Read the strand directions of a cut line through ``edges``."""
    cut = _cut_line(link.diagram, edges, faces)
    strands = tuple((edge, 1 if up else -1) for edge, _, _, up in cut)
    return TwistRegion(strands, _check_sign(sign), sum(s for _, s in strands),
                       tuple(faces) if faces is not None else None)


def _region_cut(link: FramedLink, region: TwistRegion) -> Cut:
    cut = _cut_line(link.diagram, region.edges, region.faces)
    for (edge, _, _, up), (_, direction) in zip(cut, region.strands):
        if (1 if up else -1) != direction:
            raise MoveError(f"edge {edge} crosses the twist disk with direction {-direction}, not {direction}")
    return cut


def full_twist(link: FramedLink, region: TwistRegion, component: int | None = None) -> FramedLink:
    """
    Insert one full twist of sign ``region.sign`` into the region's strands.

    Each component through the disk changes framing by sign * ell**2, where
    ell is its signed strand count; linking numbers change by
    sign * ell_i * ell_j through the new crossings.
    """
    cut = _region_cut(link, region)
    if component is not None:
        link._check_component(component)
        strangers = [e for e in region.edges if link.diagram.component_of_edge[e] != component]
        if strangers:
            raise MoveError(f"edges {strangers} do not belong to component {component}")
    out = _twist(link, cut, region.sign)
    LOGGER.debug("full twist sign %+d through %d strands (ell=%d)", region.sign, len(cut), region.ell)
    return out


def blow_up(link: FramedLink, region: TwistRegion | Sequence[int], sign: int,
            faces: Sequence[int] | None = None) -> FramedLink:
    """
    Add an unknot of framing ``sign`` around the strands of ``region``.

    The strands pick up a full twist of the same sign above the new unknot
    and each component through it changes framing by sign * ell**2, so
    blowing the unknot back down returns the original link.
    """
    sign = _check_sign(sign)
    d = link.diagram
    cut = _region_cut(link, region) if isinstance(region, TwistRegion) else _cut_line(d, region, faces)
    b = _Builder(d)
    u_label, above = _encircle(b, cut)
    strands = [[edge, up] for edge, _, _, up in above]
    _braid(b, strands, _full_twist_word(len(above), sign))
    _close_cut(b, above, strands)
    new = b.build()
    comp_map = _label_comp_map(d, new)
    u = new.component_of_edge[u_label]
    out = _carry(link, new, comp_map, {u: sign})
    framings = list(out.framings)
    for comp, ell in _ell(d, cut).items():
        framings[comp_map[comp]] += sign * ell * ell
    LOGGER.debug("blow up %+d around %d strands", sign, len(cut))
    return out.with_framings(framings)


def _standard_meridian(d: OrientedDiagram, u: int) -> tuple[list[int], list[int]]:
    """
    Strand edges and disk faces of an unknot that runs over every strand it
    meets and then back under each of them in reverse order.
    """
    comp = d.traced_components[u]
    seq = [d.head(e) for e in comp]
    crossings = [ci for ci, _ in seq]
    if len(set(crossings)) != len(crossings):
        raise MoveError(f"component {u} crosses itself")
    over = [pos % 2 == 1 for _, pos in seq]
    start = next((i for i in range(len(seq)) if over[i] and not over[i - 1]), None)
    k = len(seq) // 2
    if start is None or len(seq) % 2:
        raise MoveError(f"component {u} is not an unknot in standard position")
    seq, over = seq[start:] + seq[:start], over[start:] + over[:start]
    edges = list(comp[start:] + comp[:start])
    if over != [True] * k + [False] * k:
        raise MoveError(f"component {u} is not an unknot in standard position")
    ps = [ci for ci, _ in seq[:k]]
    qs = [ci for ci, _ in seq[k:]][::-1]
    strands = []
    for p, q in zip(ps, qs):
        hits = [d.crossings[p][s] for s in (0, 2)
                if _other_end(d, d.crossings[p][s], (p, s)) in ((q, 1), (q, 3))]
        if not hits:
            raise MoveError(f"component {u} is not an unknot in standard position")
        strands.append(hits[0])
    faces = []
    for i in range(k - 1):
        shared = _faces_touching(d, strands[i], strands[i + 1], edges[i + 1])
        if not shared:
            raise MoveError(f"component {u} does not bound a visible disk")
        faces.append(shared[0])
    return strands, faces


def blow_down(link: FramedLink, component: int) -> FramedLink:
    """
    Remove a +-1 framed unknot in standard position.

    The strands through its disk get a full twist of the opposite sign and
    their components change framing by -framing * ell**2.
    """
    link._check_component(component)
    sign = link.framings[component]
    if sign not in (1, -1):
        raise MoveError(f"component {component} has framing {sign}; only +-1 unknots blow down")
    d = link.diagram
    if component >= len(d.traced_components):
        return delete_components(link, [component])
    strands, faces = _standard_meridian(d, component)
    cut = _cut_line(d, strands, faces)
    marker = d.traced_components[component][0]
    twisted = _twist(link, cut, -sign)
    out = delete_components(twisted, [twisted.diagram.component_of_edge[marker]])
    LOGGER.debug("blow down %+d through %d strands", sign, len(cut))
    return out


def blow_up_meridians(link: FramedLink, component: int, count: int | None = None,
                      sign: int | None = None) -> FramedLink:
    """
    Blow up ``count`` parallel meridians of ``component``.

    By default the meridians have sign opposite to the framing and there are
    as many as needed to bring the framing to zero.
    """
    link._check_component(component)
    f = link.framings[component]
    if sign is None:
        sign = -1 if f > 0 else 1
    if count is None:
        count = abs(f)
    sign = _check_sign(sign)
    if count <= 0:
        return link
    link, component = _ensure_traced(link, component)
    edge = link.diagram.traced_components[component][0]
    for _ in range(count):
        link = blow_up(link, [edge], sign)
    return link


def crossing_change_twist(link: FramedLink, crossing: int) -> FramedLink:
    """
    Change a crossing by a full twist on the two strands leaving it on the
    over side, then cancel the resulting bigon.
    """
    d = link.diagram
    if not 0 <= crossing < len(d.crossings):
        raise MoveError(f"no crossing {crossing}")
    c = d.crossings[crossing]
    corner = _face_of_side(d, (c[2], (crossing, 2)))
    cut = _cut_line(d, [c[3], c[2]], [corner])
    n = len(d.crossings)
    for sign in (d.signs[crossing], -d.signs[crossing]):
        twisted = _twist(link, cut, sign)
        if (crossing, n) in bigons(twisted.diagram):
            LOGGER.debug("crossing %d changed with a %+d twist", crossing, sign)
            return _r2_remove(twisted, (crossing, n))
    raise MoveError(f"crossing {crossing} could not be changed by a twist")


# ------------------------------------------------------
# CABLES AND BANDS
# ------------------------------------------------------
def _cable_link(link: FramedLink, component: int, left: int, right: int,
                at: int | None = None) -> tuple[FramedLink, list[int]]:
    """
    Add ``left`` and ``right`` framed parallel copies of ``component``.

    Every crossing touching the component becomes a grid.  The copies are
    then twisted together next to edge ``at`` (the component's first edge by
    default) until each pair links ``framing`` times, so each copy is a
    framing pushoff.  Returns the new link and one marker label per bundle
    position, taken on the twisted edge and numbered right to left; the
    original sits at position ``right``.
    """
    link, component = _ensure_traced(link, component)
    d = link.diagram
    m = left + right + 1
    members = d.traced_components[component]
    if at is None:
        at = members[0]
    elif at not in members:
        raise MoveError(f"edge {at} does not belong to component {component}")
    top = d.max_label

    def fresh() -> int:
        nonlocal top
        top += 1
        return top

    bundle = {e: [e if j == right else fresh() for j in range(m)] for e in members}

    def ccw(ci: int, s: int) -> list[int]:
        e = d.crossings[ci][s]
        labels = bundle.get(e, [e])
        return labels[::-1] if d.head(e) == (ci, s) else list(labels)

    crossings: list[list[int]] = []
    heads: dict[int, Slot] = {}
    for ci, c in enumerate(d.crossings):
        if component not in d.strands(ci):
            index = len(crossings)
            crossings.append(list(c))
            for s, label in enumerate(c):
                if d.head(label) == (ci, s):
                    heads[label] = (index, s)
            continue
        south, east, north, west = (ccw(ci, s) for s in range(4))
        mu, mo = len(south), len(east)
        from_west = d.head(c[3]) == (ci, 3)
        vert = {(x, y): fresh() for x in range(1, mu + 1) for y in range(1, mo)}
        horiz = {(x, y): fresh() for x in range(1, mu) for y in range(1, mo + 1)}
        for x in range(1, mu + 1):
            for y in range(1, mo + 1):
                s_ = south[x - 1] if y == 1 else vert[x, y - 1]
                n_ = north[mu - x] if y == mo else vert[x, y]
                e_ = east[y - 1] if x == mu else horiz[x, y]
                w_ = west[mo - y] if x == 1 else horiz[x - 1, y]
                index = len(crossings)
                crossings.append([s_, e_, n_, w_])
                heads[s_] = (index, 0)
                if from_west:
                    heads[w_] = (index, 3)
                else:
                    heads[e_] = (index, 1)
    new = _assemble(crossings, d.unknotted_components, heads)
    markers = bundle[at]
    f = link.framings[component]
    extra = {new.component_of_edge[markers[j]]: f for j in range(m) if j != right}
    cabled = _carry(link, new, _label_comp_map(d, new), extra)

    turns = f - writhe(link, component)
    if turns and m > 1:
        nd = cabled.diagram
        cut = [(label, nd.tail(label), nd.head(label), True) for label in reversed(markers)]
        cabled = _twist(cabled, cut, 1 if turns > 0 else -1, abs(turns), framing_law=False)
    LOGGER.debug("cabled component %d into %d strands (%d twists)", component, m, turns)
    return cabled, markers


def _height(slot: Slot) -> int:
    return slot[1] % 2


def _band(link: FramedLink, edge: int, other: int, face: int, half_twist: int | None = 0) -> FramedLink:
    """
    Band-sum the components of ``edge`` and ``other`` across ``face``.

    The component of ``other`` is reversed when needed so the band respects
    orientations.  ``half_twist`` of +-1 crosses the band once, with the
    strand leaving ``edge``'s near end on top for +1; ``None`` picks the
    band whose new strands keep their over/under level at both ends.
    """
    d = link.diagram
    sides = d.faces[face]
    near_e = next((s for e, s in sides if e == edge), None)
    near_o = next((s for e, s in sides if e == other), None)
    if near_e is None or near_o is None:
        raise MoveError(f"edges {edge} and {other} do not both lie on face {face}")
    if d.component_of_edge[edge] == d.component_of_edge[other]:
        raise MoveError("a band must join two different components")
    far_e, far_o = _other_end(d, edge, near_e), _other_end(d, other, near_o)
    if half_twist is None:
        level = _height(near_e) == _height(near_o) and _height(far_e) == _height(far_o)
        if level and _height(near_e) != _height(far_e):
            half_twist = 1 if _height(near_e) else -1
        else:
            half_twist = 0
    fwd_e = near_e == d.tail(edge)
    if (fwd_e == (near_o == d.tail(other))) == bool(half_twist):
        link = reverse(link, d.component_of_edge[other])
        d = link.diagram
        near_e = d.tail(edge) if fwd_e else d.head(edge)
        face = _face_of_side(d, (edge, near_e))
        near_o = next(s for e, s in d.faces[face] if e == other)
        far_e, far_o = _other_end(d, edge, near_e), _other_end(d, other, near_o)

    mc, oc = d.component_of_edge[edge], d.component_of_edge[other]
    framing = link.framings[mc] + link.framings[oc] + 2 * linking_number(link, mc, oc)
    b = _Builder(d)
    if not half_twist:
        b.put(far_e, other)
        b.put(far_o, edge)
        if fwd_e:
            b.heads[edge], b.heads[other] = far_o, far_e
    else:
        p, q = b.fresh(), b.fresh()
        b.put(far_e, p)
        b.put(far_o, q)
        if half_twist > 0:
            crossing = (q, edge, p, other) if fwd_e else (p, other, q, edge)
        else:
            crossing = (edge, p, other, q) if fwd_e else (other, q, edge, p)
        entering = [edge, q] if fwd_e else [other, p]
        b.add(crossing, entering)
        if fwd_e:
            b.heads[p], b.heads[other] = far_e, near_o
        else:
            b.heads[edge], b.heads[q] = near_e, far_o
    new = b.build()
    comp_map = _label_comp_map(d, new)
    out = _carry(link, new, comp_map, {comp_map[mc]: framing})
    LOGGER.debug("band %d~%d on face %d (half twist %d): framing %d", edge, other, face, half_twist, framing)
    return out


# ------------------------------------------------------
# HANDLE SLIDES AND SLAM DUNKS
# ------------------------------------------------------
def _band_path(d: OrientedDiagram, edge: int, targets: Iterable[int], blocked: Iterable[int] = ()) -> list[int]:
    """Shortest chain of faces from one touching ``edge`` to one touching any of ``targets``."""
    targets, blocked = set(targets), set(blocked) | {edge}
    borders: dict[int, list[int]] = {}
    for fi, sides in enumerate(d.faces):
        for e, _ in sides:
            borders.setdefault(e, []).append(fi)
    previous: dict[int, int | None] = {fi: None for fi in borders.get(edge, [])}
    queue = deque(previous)
    while queue:
        fi = queue.popleft()
        if any(e in targets for e, _ in d.faces[fi]):
            path = [fi]
            while previous[path[-1]] is not None:
                path.append(previous[path[-1]])
            return path[::-1]
        for e, _ in d.faces[fi]:
            if e in blocked:
                continue
            for nxt in borders[e]:
                if nxt not in previous:
                    previous[nxt] = fi
                    queue.append(nxt)
    raise MoveError(f"no band path leads from edge {edge} to edges {sorted(targets)}")


def _finger(link: FramedLink, edge: int, faces: Sequence[int], blocked: Iterable[int] = ()) -> tuple[FramedLink, int]:
    """
    Push a finger of ``edge`` over one edge between each pair of consecutive
    ``faces``.  Returns the new link and the edge at the finger tip, which
    lies in the last face.
    """
    d = link.diagram
    blocked = set(blocked) | {edge}
    crossed: list[int] = []
    for here, there in zip(faces, faces[1:]):
        shared = [e for e, _ in d.faces[here] if e not in blocked and e not in crossed
                  and any(e2 == e for e2, _ in d.faces[there])]
        if not shared:
            raise MoveError(f"faces {here} and {there} share no edge a band can cross")
        crossed.append(shared[0])
    tip = edge
    for step, separator in enumerate(crossed):
        site = (tip, separator, faces[0]) if step == 0 else (tip, separator)
        top = link.diagram.max_label
        link = reidemeister_move(link, "R2+", site)
        tip = top + 1
    return link, tip


def handle_slide(link: FramedLink, band: BandSpec) -> FramedLink:
    """
    Slide ``band.moving`` over ``band.over`` along a band through the faces
    of ``band.path``.

    The band passes over every edge between consecutive faces; an empty
    path takes the shortest one.  The moving component is band-summed with
    a framing pushoff of the other one and its framing becomes
    f_m + f_o + 2 lk, the linking number taken after any reversal the band
    forces.
    """
    link._check_component(band.moving)
    link._check_component(band.over)
    if band.moving == band.over:
        raise MoveError("a component cannot slide over itself")
    if band.twists not in (-1, 0, 1):
        raise MoveError(f"band twists must be -1, 0 or 1, got {band.twists}")
    d = link.diagram
    for edge, comp in ((band.attach_edge_moving, band.moving), (band.attach_edge_over, band.over)):
        if d.component_of_edge.get(edge) != comp:
            raise MoveError(f"edge {edge} does not belong to component {comp}")
    path = list(band.path) or _band_path(d, band.attach_edge_moving, [band.attach_edge_over])
    for face in path:
        if not 0 <= face < len(d.faces):
            raise MoveError(f"no face {face}")
    for face, edge in ((path[0], band.attach_edge_moving), (path[-1], band.attach_edge_over)):
        if not any(e == edge for e, _ in d.faces[face]):
            raise MoveError(f"face {face} does not touch edge {edge}")
    before = linking_matrix(link)

    moved, tip = _finger(link, band.attach_edge_moving, path, [band.attach_edge_over])
    d = moved.diagram
    ends = [path[0]] if len(path) == 1 else _faces_touching(d, tip, band.attach_edge_over)
    if not ends:
        raise MoveError(f"band path {path} does not end next to edge {band.attach_edge_over}")
    face = ends[0]
    sides = d.faces[face]
    side_m = next(s for e, s in sides if e == tip)
    side_o = next(s for e, s in sides if e == band.attach_edge_over)
    fwd_m = side_m == d.tail(tip)
    on_left = side_o == d.tail(band.attach_edge_over)

    over = d.component_of_edge[band.attach_edge_over]
    cabled, markers = _cable_link(moved, over, 1 if on_left else 0, 0 if on_left else 1)
    cd = cabled.diagram
    copy_comp = cd.component_of_edge[markers[1 if on_left else 0]]
    near = cd.tail(tip) if fwd_m else cd.head(tip)
    face = _face_of_side(cd, (tip, near))
    hits = [e for e, _ in cd.faces[face] if cd.component_of_edge[e] == copy_comp]
    if not hits:
        raise MoveError("band collides with a crossing")
    out = _band(cabled, tip, hits[0], face, band.twists)

    after = linking_matrix(out)
    if after not in (before.after_slide(band.moving, band.over, 1), before.after_slide(band.moving, band.over, -1)):
        raise KBError(f"sliding component {band.moving} over {band.over} broke the linking matrix")
    LOGGER.info("slid component %d over %d through %d face(s)", band.moving, band.over, len(path))
    return out


def _band_site(d: OrientedDiagram, pending: Sequence[int], keep_marker: int,
               markers: Sequence[int]) -> tuple[int, int, int] | None:
    keep = d.component_of_edge[keep_marker]
    unused = {d.component_of_edge[mk] for mk in markers} - {keep}
    for tip in pending:
        best = None
        for fi, sides in enumerate(d.faces):
            if not any(e == tip for e, _ in sides):
                continue
            copies = [e for e, _ in sides if d.component_of_edge[e] in unused]
            if copies and (best is None or len(sides) < best[0]):
                best = (len(sides), copies[0], fi)
        if best is not None:
            return tip, best[1], best[2]
    return None


def _finger_site(link: FramedLink, tip: int, markers: Sequence[int],
                 walls: Iterable[int]) -> tuple[FramedLink, tuple[int, int, int]]:
    """Push ``tip`` over any edge but ``walls`` until it shares a face with an unused copy."""
    d = link.diagram
    walls = list(walls)
    copies = {d.component_of_edge[mk] for mk in markers} - {d.component_of_edge[tip]}
    path = _band_path(d, tip, [e for e in d.occurrences if d.component_of_edge[e] in copies], walls)
    link, tip = _finger(link, tip, path, walls)
    d = link.diagram
    for fi in _faces_touching(d, tip):
        hits = [e for e, _ in d.faces[fi] if d.component_of_edge[e] in copies]
        if hits:
            LOGGER.debug("finger to edge %d crosses %d face(s) to reach a copy", tip, len(path) - 1)
            return link, (tip, hits[0], fi)
    raise MoveError("no band reaches a parallel copy of R")


def slam_dunk(link: FramedLink, keep: str = "B", assume_special: bool = False) -> FramedLink:
    """
    Derive the knot K_keep from a special RBG link.

    Each strand of ``keep`` through the disk of the other meridian is slid
    over a framing pushoff of R.  R and the other meridian then cancel and
    are deleted, leaving a single zero-framed knot.  The other meridian must
    be an unknot in standard position whose disk ``keep`` crosses only as
    straight strands.
    """
    if keep not in ("B", "G"):
        raise RoleError(f"slam dunk keeps B or G, not {keep!r}")
    report = validate_rbg(link, assume_special)
    if not report.is_special:
        raise MoveError(f"slam dunk needs a special RBG link ({', '.join(report.failures)})")
    drop = "G" if keep == "B" else "B"
    d = link.diagram
    r_marker = d.traced_components[link.role("R")][0]
    keep_marker = d.traced_components[link.role(keep)][0]
    drop_marker = d.traced_components[link.role(drop)][0]
    tips = piercing_edges(link, link.role(drop), link.role(keep))
    LOGGER.info("slam dunk keeping %s: %d strand(s) to slide", keep, len(tips))

    markers: list[int] = []
    if tips:
        strands, _ = _standard_meridian(d, link.role(drop))
        stray = sorted(set(tips) - set(strands))
        if stray:
            raise MoveError(f"edges {stray} of {keep} cross the {drop} disk away from its strands")
        # twist the cable away from the strip the bands cross
        twist_at = next(e for e in d.traced_components[link.role("R")] if e not in strands)
        link, bundle = _cable_link(link, link.role("R"), len(tips), len(tips), twist_at)
        markers = [mk for j, mk in enumerate(bundle) if j != len(tips)]
        pending = list(tips)
        while pending:
            site = _band_site(link.diagram, pending, keep_marker, markers)
            origin = site[0] if site is not None else pending[0]
            if site is None:
                d = link.diagram
                fixed = {d.component_of_edge[r_marker], d.component_of_edge[drop_marker]}
                walls = [e for e in d.occurrences if d.component_of_edge[e] in fixed or e in pending]
                link, site = _finger_site(link, origin, markers, walls)
            tip, copy_edge, face = site
            link = _band(link, tip, copy_edge, face, None)
            pending.remove(origin)

    d = link.diagram
    kc, dc = d.component_of_edge[keep_marker], d.component_of_edge[drop_marker]
    if linking_number(link, kc, dc) or piercing_edges(link, dc, kc):
        raise MoveError("nonzero residual intersections after the permitted slides")
    doomed = {d.component_of_edge[r_marker], dc}
    doomed |= {d.component_of_edge[mk] for mk in markers if d.component_of_edge[mk] != kc}
    out = delete_components(link, doomed)
    if out.component_count != 1:
        raise MoveError(f"slam dunk left {out.component_count} components")
    if out.framings[0] != 0:
        raise MoveError(f"slam dunk produced framing {out.framings[0]}, expected 0")
    out = simplify(out)
    name = f"K_{keep}({link.name})" if link.name else f"K_{keep}"
    return FramedLink(out.diagram, out.framings, {}, name)


def derive_pair(link: FramedLink, assume_special: bool = False) -> tuple[FramedLink, FramedLink]:
    return slam_dunk(link, "B", assume_special), slam_dunk(link, "G", assume_special)


# ------------------------------------------------------
# STANDARD RBG LINKS
# ------------------------------------------------------
def clasp(link: FramedLink, finger: int, edge: int, sign: int = 1, face: int | None = None) -> FramedLink:
    """
    Hook edge ``finger`` once around ``edge`` inside a shared face.

    Two crossings of sign ``sign`` are added, so the linking number of the
    two components moves by ``sign``.
    """
    sign = _check_sign(sign)
    d = link.diagram
    for e in (finger, edge):
        if e not in d.occurrences:
            raise MoveError(f"no edge {e}")
    if d.component_of_edge[finger] == d.component_of_edge[edge]:
        raise MoveError("a clasp joins two different components")
    shared = [fi for fi in _faces_touching(d, finger, edge) if face is None or fi == face]
    if not shared:
        raise MoveError(f"edges {finger} and {edge} share no face")
    sides = d.faces[shared[0]]
    s1 = next(s for e, s in sides if e == finger)
    s2 = next(s for e, s in sides if e == edge)
    t1, t2 = _other_end(d, finger, s1), _other_end(d, edge, s2)
    fwd1, fwd2 = d.head(finger) == t1, d.head(edge) == t2
    for finger_over_first in (True, False):
        b = _Builder(d)
        a, bb, cc = finger, b.fresh(), b.fresh()
        dd, e, f = edge, b.fresh(), b.fresh()
        b.put(t1, cc)
        b.put(t2, f)
        first = (e, bb, f, a) if fwd2 else (f, a, e, bb)
        second = (dd, bb, e, cc) if fwd2 else (e, cc, dd, bb)
        if finger_over_first:
            second = (bb, e, cc, dd) if fwd1 else (cc, dd, bb, e)
        else:
            first = (a, e, bb, f) if fwd1 else (bb, f, a, e)
        n = b.add(first, ([a] if fwd1 else [bb]) + ([e] if fwd2 else [f]))
        b.add(second, ([bb] if fwd1 else [cc]) + ([dd] if fwd2 else [e]))
        if fwd1:
            b.heads[cc] = t1
        if fwd2:
            b.heads[f] = t2
        new = b.build()
        if new.signs[n] == new.signs[n + 1] == sign:
            LOGGER.debug("clasp %d around %d, sign %+d", finger, edge, sign)
            return _carry(link, new, _label_comp_map(d, new))
    raise MoveError(f"no clasp of sign {sign} fits edges {finger} and {edge}")


def _clasp_components(link: FramedLink, finger_label: int, other_label: int, anchor_label: int,
                      sign: int) -> FramedLink:
    """Clasp two meridians inside the smallest face they share with their anchor."""
    d = link.diagram
    fc, oc = d.component_of_edge[finger_label], d.component_of_edge[other_label]
    ac = d.component_of_edge[anchor_label]
    best = None
    for fi, sides in enumerate(d.faces):
        mine = [e for e, _ in sides if d.component_of_edge[e] == fc]
        theirs = [e for e, _ in sides if d.component_of_edge[e] == oc]
        anchored = any(d.component_of_edge[e] == ac for e, _ in sides)
        if mine and theirs and anchored and (best is None or len(sides) < best[0]):
            best = (len(sides), fi, mine[0], theirs[0])
    if best is None:
        raise MoveError("the meridians share no face")
    return clasp(link, best[2], best[3], sign, best[1])


def _meridian_strands(d: OrientedDiagram, component: int) -> int | None:
    try:
        return len(_standard_meridian(d, component)[0])
    except MoveError:
        return None


def _clasp_meridians(link: FramedLink, finger_label: int, other_label: int, anchor_label: int,
                     sign: int) -> FramedLink:
    """
    Clasp two meridians so that both stay in standard position, each disk
    gaining the other's strand.  Where no placement does, clasp inside the
    smallest face they share with their anchor.
    """
    d = link.diagram
    fc, oc = d.component_of_edge[finger_label], d.component_of_edge[other_label]
    before = _meridian_strands(d, fc), _meridian_strands(d, oc)
    if None not in before:
        wanted = (before[0] + 1, before[1] + 1)
        for fi, sides in enumerate(d.faces):
            mine = [e for e, _ in sides if d.component_of_edge[e] == fc]
            theirs = [e for e, _ in sides if d.component_of_edge[e] == oc]
            for finger in mine:
                for edge in theirs:
                    try:
                        out = clasp(link, finger, edge, sign, fi)
                    except MoveError:
                        continue
                    nd = out.diagram
                    after = (_meridian_strands(nd, nd.component_of_edge[finger_label]),
                             _meridian_strands(nd, nd.component_of_edge[other_label]))
                    if after == wanted:
                        return out
    LOGGER.debug("no standard placement for a %+d clasp of edge %d around edge %d", sign, finger_label, other_label)
    return _clasp_components(link, finger_label, other_label, anchor_label, sign)


def make_standard_rbg(r: int = 0, ell: int = 0, b_tangle: Sequence[int] | None = None,
                      g_tangle: Sequence[int] | None = None, name: str | None = None) -> FramedLink:
    """
    R = unknot with framing r, and zero-framed meridians B and G each
    linking R once.  B and G are hooked together by one clasp per tangle
    entry: ``b_tangle`` clasps push a finger of B around G, ``g_tangle``
    clasps the other way, each entry giving the clasp's sign.  Without
    tangles, |ell| clasps of sign ell are pushed from B.

    Each clasp goes where B and G both stay unknots in standard position.
    A +1 clasp fits beside R's outer arc and a -1 clasp inside the lune
    next to it.  A second clasp of an already used sign may find no such
    place; it then goes in the smallest face shared with R, and the link
    still validates but may not slam dunk.
    """
    if b_tangle is None and g_tangle is None:
        b_tangle = [1 if ell > 0 else -1] * abs(ell)
    b_tangle, g_tangle = list(b_tangle or ()), list(g_tangle or ())
    if any(s not in (1, -1) for s in b_tangle + g_tangle) or sum(b_tangle) + sum(g_tangle) != ell:
        raise MoveError(f"inconsistent tangle data: clasps {b_tangle} + {g_tangle} do not add up to ell={ell}")
    # R is edges 1-2, G is edges 3-4
    hopf = FramedLink(OrientedDiagram(((1, 4, 2, 3), (4, 1, 3, 2))), (r, 0))
    d = hopf.diagram
    b = _Builder(d)
    b_label, _ = _encircle(b, _cut_line(d, [1]))
    new = b.build()
    link = _carry(hopf, new, _label_comp_map(d, new))
    for sign in b_tangle:
        link = _clasp_meridians(link, b_label, 3, 1, sign)
    for sign in g_tangle:
        link = _clasp_meridians(link, 3, b_label, 1, sign)
    d = link.diagram
    roles = {"R": d.component_of_edge[1], "B": d.component_of_edge[b_label], "G": d.component_of_edge[3]}
    return FramedLink(d, link.framings, roles, name or f"rbg(r={r},ell={ell})")


# ------------------------------------------------------
# MOVE SCRIPTS
# ------------------------------------------------------
def _site(move: Mapping):
    site = move.get("site")
    if site is None:
        raise MoveError(f"move {move.get('op')!r} needs a site")
    return site


def apply_move(link: FramedLink, move: Mapping) -> FramedLink:
    """Apply one move-script entry, an object with an ``"op"`` discriminator."""
    op = str(move.get("op", "")).replace("−", "-")
    sign = int(move.get("sign", 1))
    if op in ("R1+", "R1-", "R2+", "R2-"):
        return reidemeister_move(link, op, _site(move), sign)
    if op == "twist":
        region = (TwistRegion.from_dict(move["region"]) if "region" in move
                  else twist_region(link, move["edges"], sign, move.get("faces")))
        return full_twist(link, region, move.get("component"))
    if op == "crossing_change":
        return crossing_change_twist(link, int(move["crossing"]))
    if op == "blow_up":
        return blow_up(link, move["edges"], sign, move.get("faces"))
    if op == "blow_down":
        return blow_down(link, int(move["component"]))
    if op == "blow_up_meridians":
        return blow_up_meridians(link, int(move["component"]), move.get("count"), move.get("sign"))
    if op == "slide":
        return handle_slide(link, BandSpec.from_dict(move.get("band", move)))
    if op == "clasp":
        return clasp(link, int(move["finger"]), int(move["edge"]), sign, move.get("face"))
    if op == "slam_dunk":
        return slam_dunk(link, move.get("keep", "B"), bool(move.get("assume_special", False)))
    if op == "mirror":
        return mirror(link)
    if op == "reverse":
        return reverse(link, int(move["component"]))
    if op == "simplify":
        return simplify(link)
    raise MoveError(f"unknown move {op!r}")


def run_moves(link: FramedLink, moves: Iterable[Mapping]) -> FramedLink:
    for step, move in enumerate(moves):
        try:
            link = apply_move(link, move)
        except (KeyError, TypeError, ValueError) as exc:
            raise MoveError(f"step {step}: malformed move {dict(move)!r}") from exc
        LOGGER.debug("step %d %s: %d crossings, framings %s", step, move.get("op"),
                     len(link.diagram.crossings), link.framings)
    return link


def parse_moves(text: str) -> list[dict]:
    try:
        moves = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MoveError(f"move script is not valid JSON: {exc.msg} (line {exc.lineno})") from exc
    if not isinstance(moves, list) or not all(isinstance(m, dict) and "op" in m for m in moves):
        raise MoveError('a move script is an array of objects with an "op" field')
    return moves
