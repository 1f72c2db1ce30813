"""
Planar diagrams of oriented framed links.

This module owns the universal input object of the toolkit.  A diagram is
a tuple of PD crossings, each listed counterclockwise starting from the
incoming under-strand, plus a count of crossingless unknotted components
that PD codes cannot express.  Orientations, crossing signs, components
and faces are all derived from the crossing tuples and cached on the
immutable value.

Usage:

```python
import diagram
link = diagram.parse_diagram(open("trefoil.pdj").read())
diagram.writhe(link)
```

All other modules import the exception hierarchy defined here.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

LOGGER = logging.getLogger(__name__)

Crossing = tuple[int, int, int, int]
Slot = tuple[int, int]
Side = tuple[int, Slot]

ROLES = ("R", "B", "G")


# ------------------------------------------------------
# ERRORS
# ------------------------------------------------------
class KBError(Exception):
    """Base class for every error raised by the toolkit."""


class DiagramSyntaxError(KBError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class DiagramValidationError(KBError):
    def __init__(self, invariant: str, message: str):
        super().__init__(f"{invariant}: {message}")
        self.invariant = invariant


class MoveError(KBError):
    """An illegal site or malformed move request."""


class RoleError(KBError):
    """Missing or inconsistent R/B/G role tags."""


class BudgetExceeded(KBError):
    def __init__(self, message: str, projected_cost: float):
        super().__init__(f"{message} (projected cost {projected_cost:.3g})")
        self.projected_cost = projected_cost


# ------------------------------------------------------
# LAURENT POLYNOMIALS
# ------------------------------------------------------
@dataclass(frozen=True)
class LaurentPolynomial:
    """Integer Laurent polynomial stored as sorted (exponent, coefficient) pairs."""

    terms: tuple[tuple[int, int], ...] = ()
    variable: str = "q"

    @classmethod
    def from_dict(cls, coefficients: Mapping[int, int], variable: str = "q") -> "LaurentPolynomial":
        return cls(tuple(sorted((int(e), int(c)) for e, c in coefficients.items() if c)), variable)

    @classmethod
    def monomial(cls, exponent: int, coefficient: int = 1, variable: str = "q") -> "LaurentPolynomial":
        return cls.from_dict({exponent: coefficient}, variable)

    @property
    def coefficients(self) -> dict[int, int]:
        return dict(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def min_degree(self) -> int:
        return self.terms[0][0]

    def max_degree(self) -> int:
        return self.terms[-1][0]

    def _combine(self, other: "LaurentPolynomial", sign: int) -> "LaurentPolynomial":
        out = self.coefficients
        for e, c in other.terms:
            out[e] = out.get(e, 0) + sign * c
        return LaurentPolynomial.from_dict(out, self.variable)

    def __add__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self._combine(other, 1)

    def __sub__(self, other: "LaurentPolynomial") -> "LaurentPolynomial":
        return self._combine(other, -1)

    def __neg__(self) -> "LaurentPolynomial":
        return LaurentPolynomial(tuple((e, -c) for e, c in self.terms), self.variable)

    def __mul__(self, other: "LaurentPolynomial | int") -> "LaurentPolynomial":
        if isinstance(other, int):
            return LaurentPolynomial.from_dict({e: c * other for e, c in self.terms}, self.variable)
        out: dict[int, int] = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                out[e1 + e2] = out.get(e1 + e2, 0) + c1 * c2
        return LaurentPolynomial.from_dict(out, self.variable)

    __rmul__ = __mul__

    def invert_variable(self) -> "LaurentPolynomial":
        """Substitute x -> 1/x."""
        return LaurentPolynomial.from_dict({-e: c for e, c in self.terms}, self.variable)

    def evaluate(self, value: int | Fraction) -> Fraction:
        value = Fraction(value)
        return sum((c * value**e for e, c in self.terms), Fraction(0))

    def to_json(self) -> dict[str, int]:
        return {str(e): c for e, c in self.terms}

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in reversed(self.terms):
            mono = "" if e == 0 else (self.variable if e == 1 else f"{self.variable}^{e}")
            coeff = str(abs(c)) if (abs(c) != 1 or not mono) else ""
            body = f"{coeff}*{mono}" if coeff and mono else coeff or mono
            parts.append(("- " if c < 0 else "+ ") + body)
        text = " ".join(parts)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]


# ------------------------------------------------------
# ORIENTED DIAGRAMS
# ------------------------------------------------------
@dataclass(frozen=True)
class OrientedDiagram:
    """
    PD crossings plus crossingless unknots.

    ``orientations`` holds ``(edge, under_label)`` pairs for components that
    pass over every crossing they meet: their direction is invisible in the
    crossing tuples, so the pair names the crossing (by its incoming
    under-label) at which ``edge`` ends.  Components without such a pair
    take the direction that makes their second edge label the smaller one.
    """

    crossings: tuple[Crossing, ...] = ()
    unknotted_components: int = 0
    orientations: tuple[tuple[int, int], ...] = ()

    # -- validation and tracing -------------------------------------------
    @cached_property
    def occurrences(self) -> dict[int, list[Slot]]:
        occ: dict[int, list[Slot]] = {}
        for ci, crossing in enumerate(self.crossings):
            if len(crossing) != 4:
                raise DiagramValidationError("crossing arity", f"crossing {ci} has {len(crossing)} entries")
            for pos, label in enumerate(crossing):
                if not isinstance(label, int) or label <= 0:
                    raise DiagramValidationError("edge label", f"crossing {ci} holds non-positive label {label!r}")
                occ.setdefault(label, []).append((ci, pos))
        for label, slots in occ.items():
            if len(slots) != 2:
                raise DiagramValidationError(
                    "dangling edge", f"edge {label} appears {len(slots)} times, expected exactly 2"
                )
        if self.unknotted_components < 0:
            raise DiagramValidationError("unknotted components", "count must be non-negative")
        return occ

    def _walk(self, start: int, head: Slot) -> tuple[list[int], dict[int, Slot]]:
        edges, heads = [start], {start: head}
        ci, pos = head
        while True:
            out = (ci, (pos + 2) % 4)
            label = self.crossings[ci][out[1]]
            first, second = self.occurrences[label]
            nxt = second if first == out else first
            if label == start:
                break
            edges.append(label)
            heads[label] = nxt
            ci, pos = nxt
        return edges, heads

    @cached_property
    def _trace(self) -> tuple[tuple[tuple[int, ...], ...], dict[int, Slot]]:
        hints = dict(self.orientations)
        components: list[tuple[int, ...]] = []
        heads: dict[int, Slot] = {}
        for start in sorted(self.occurrences):
            if start in heads:
                continue
            walks = [self._walk(start, slot) for slot in self.occurrences[start]]
            valid = [w for w in walks if all(p != 2 for _, p in w[1].values())]
            if not valid:
                raise DiagramValidationError(
                    "orientation inconsistency",
                    f"component through edge {start} enters an under-strand at slot 2",
                )
            has_under = any(p == 0 for _, p in valid[0][1].values())
            if has_under or len(valid) == 1:
                chosen = valid[0]
            else:
                chosen = self._choose_over_direction(valid, hints)
            components.append(tuple(chosen[0]))
            heads.update(chosen[1])
        return tuple(components), heads

    def _choose_over_direction(self, walks, hints: Mapping[int, int]):
        for edges, heads in walks:
            for edge in edges:
                if edge in hints and self.crossings[heads[edge][0]][0] == hints[edge]:
                    return edges, heads

        def key(walk):
            edges, heads = walk
            return (edges[1] if len(edges) > 1 else edges[0], 0 if heads[edges[0]][1] == 3 else 1)

        return min(walks, key=key)

    def validate(self) -> "OrientedDiagram":
        _ = self.signs
        return self

    # -- derived data ------------------------------------------------------
    @property
    def traced_components(self) -> tuple[tuple[int, ...], ...]:
        """Edge cycles in orientation order, ordered by ascending minimal edge."""
        return self._trace[0]

    @property
    def heads(self) -> dict[int, Slot]:
        return self._trace[1]

    def head(self, edge: int) -> Slot:
        return self._trace[1][edge]

    def tail(self, edge: int) -> Slot:
        first, second = self.occurrences[edge]
        return second if first == self.head(edge) else first

    @property
    def component_count(self) -> int:
        return len(self.traced_components) + self.unknotted_components

    @property
    def edge_count(self) -> int:
        return len(self.occurrences)

    @property
    def max_label(self) -> int:
        return max(self.occurrences, default=0)

    @cached_property
    def component_of_edge(self) -> dict[int, int]:
        return {e: k for k, comp in enumerate(self.traced_components) for e in comp}

    @cached_property
    def signs(self) -> tuple[int, ...]:
        heads = self.heads
        return tuple(1 if heads[c[3]] == (ci, 3) else -1 for ci, c in enumerate(self.crossings))

    def strands(self, ci: int) -> tuple[int, int]:
        """(under component, over component) at crossing ``ci``."""
        c = self.crossings[ci]
        return self.component_of_edge[c[0]], self.component_of_edge[c[1]]

    def is_all_over(self, component: int) -> bool:
        if component >= len(self.traced_components):
            return False
        return all(self.head(e)[1] in (1, 3) for e in self.traced_components[component])

    @cached_property
    def faces(self) -> tuple[tuple[Side, ...], ...]:
        """
        Faces as cycles of sides ``(edge, from_slot)`` with the face on the left.

        A side arriving at slot ``q`` continues from slot ``(q - 1) % 4``.
        Each face is rotated to start at its least side and the tuple of
        faces is sorted.
        """
        seen: set[Side] = set()
        faces = []
        for label in sorted(self.occurrences):
            for slot in self.occurrences[label]:
                side = (label, slot)
                if side in seen:
                    continue
                cycle = []
                while side not in seen:
                    seen.add(side)
                    cycle.append(side)
                    edge, start = side
                    first, second = self.occurrences[edge]
                    ci, q = second if first == start else first
                    leave = (ci, (q - 1) % 4)
                    side = (self.crossings[ci][leave[1]], leave)
                low = cycle.index(min(cycle))
                faces.append(tuple(cycle[low:] + cycle[:low]))
        return tuple(sorted(faces))


def _assemble(crossings: Sequence[Crossing], unknotted: int, heads: Mapping[int, Slot]) -> OrientedDiagram:
    """Build a diagram, pinning the direction of over-only components from ``heads``."""
    crossings = tuple(tuple(c) for c in crossings)
    bare = OrientedDiagram(crossings, unknotted)
    hints = []
    for k, comp in enumerate(bare.traced_components):
        if not bare.is_all_over(k):
            continue
        for edge in comp:
            want = heads.get(edge)
            if want is None or crossings[want[0]][want[1]] != edge:
                continue
            if bare.head(edge) != want:
                hints.append((edge, crossings[want[0]][0]))
            break
    if not hints:
        return bare
    return OrientedDiagram(crossings, unknotted, tuple(sorted(hints))).validate()


# ------------------------------------------------------
# FRAMED LINKS
# ------------------------------------------------------
@dataclass(frozen=True)
class FramedLink:
    diagram: OrientedDiagram
    framings: tuple[int, ...]
    roles: Mapping[str, int] = field(default_factory=dict)
    name: str | None = None

    def __post_init__(self):
        self.diagram.validate()
        if len(self.framings) != self.diagram.component_count:
            raise DiagramValidationError(
                "bad framing key",
                f"{len(self.framings)} framings for {self.diagram.component_count} components",
            )
        if self.roles:
            if set(self.roles) != set(ROLES):
                raise DiagramValidationError("roles", f"roles must be exactly R, B, G, got {sorted(self.roles)}")
            indices = list(self.roles.values())
            if len(set(indices)) != 3 or not all(0 <= i < len(self.framings) for i in indices):
                raise DiagramValidationError("roles", f"role indices {indices} are not distinct components")

    @property
    def component_count(self) -> int:
        return self.diagram.component_count

    def role(self, tag: str) -> int:
        if tag not in self.roles:
            raise RoleError(f"link has no component tagged {tag}")
        return self.roles[tag]

    def framing(self, component: int) -> int:
        self._check_component(component)
        return self.framings[component]

    def with_framings(self, framings: Sequence[int]) -> "FramedLink":
        return FramedLink(self.diagram, tuple(framings), dict(self.roles), self.name)

    def _check_component(self, component: int) -> None:
        if not 0 <= component < self.component_count:
            raise DiagramValidationError("unknown component", f"no component {component}")


def unknot(framing: int = 0, count: int = 1) -> FramedLink:
    return FramedLink(OrientedDiagram((), count), (framing,) * count)


def _carry(link: FramedLink, new: OrientedDiagram, comp_map: Sequence[int | None],
           extra_framings: Mapping[int, int] | None = None) -> FramedLink:
    """Move framings and roles of ``link`` onto ``new`` along ``comp_map``."""
    framings = [0] * new.component_count
    for old, target in enumerate(comp_map):
        if target is not None:
            framings[target] = link.framings[old]
    for target, value in (extra_framings or {}).items():
        framings[target] = value
    roles = {}
    if link.roles and all(comp_map[i] is not None for i in link.roles.values()):
        roles = {tag: comp_map[i] for tag, i in link.roles.items()}
    return FramedLink(new, tuple(framings), roles, link.name)


def _label_comp_map(old: OrientedDiagram, new: OrientedDiagram,
                    unknotted_map: Sequence[int | None] | None = None) -> list[int | None]:
    """Component map for operations that keep every old edge label."""
    comp_map: list[int | None] = [new.component_of_edge[comp[0]] for comp in old.traced_components]
    offset = len(new.traced_components)
    if unknotted_map is None:
        unknotted_map = [offset + j for j in range(old.unknotted_components)]
    return comp_map + list(unknotted_map)


# ------------------------------------------------------
# ELEMENTARY INVARIANTS
# ------------------------------------------------------
def writhe(link: FramedLink, component: int | None = None) -> int:
    d = link.diagram
    if component is None:
        return sum(d.signs)
    link._check_component(component)
    return sum(s for ci, s in enumerate(d.signs) if d.strands(ci) == (component, component))


def linking_number(link: FramedLink, c1: int, c2: int) -> int:
    link._check_component(c1)
    link._check_component(c2)
    if c1 == c2:
        raise DiagramValidationError("distinct components", "linking number needs two different components")
    d = link.diagram
    total = sum(s for ci, s in enumerate(d.signs) if set(d.strands(ci)) == {c1, c2})
    if total % 2:
        raise DiagramValidationError(
            "linking parity", f"components {c1} and {c2} have odd signed crossing count {total}"
        )
    return total // 2


def crossings_between(d: OrientedDiagram, c1: int, c2: int) -> list[int]:
    return [ci for ci in range(len(d.crossings)) if set(d.strands(ci)) == {c1, c2}]


def mirror(link: FramedLink) -> FramedLink:
    """Swap over and under everywhere and negate every framing."""
    d = link.diagram
    crossings, heads = [], {}
    for ci, (c, sign) in enumerate(zip(d.crossings, d.signs)):
        a, b, cc, dd = c
        crossings.append((dd, a, b, cc) if sign > 0 else (b, cc, dd, a))
    for edge, (ci, pos) in d.heads.items():
        heads[edge] = (ci, (pos + d.signs[ci]) % 4)
    new = _assemble(crossings, d.unknotted_components, heads)
    out = _carry(link, new, _label_comp_map(d, new))
    return out.with_framings([-f for f in out.framings])


def reverse(link: FramedLink, component: int) -> FramedLink:
    link._check_component(component)
    d = link.diagram
    if component >= len(d.traced_components):
        return link
    members = set(d.traced_components[component])
    crossings, rotated = [], set()
    for ci, c in enumerate(d.crossings):
        if c[0] in members:
            crossings.append((c[2], c[3], c[0], c[1]))
            rotated.add(ci)
        else:
            crossings.append(c)
    heads = {}
    for edge in d.heads:
        ci, pos = d.tail(edge) if edge in members else d.head(edge)
        heads[edge] = (ci, (pos + 2) % 4 if ci in rotated else pos)
    new = _assemble(crossings, d.unknotted_components, heads)
    return _carry(link, new, _label_comp_map(d, new))


def disjoint_union(first: FramedLink, second: FramedLink) -> FramedLink:
    """Split union; components of ``second`` follow those of ``first`` in each group."""
    d1, d2 = first.diagram, second.diagram
    shift = d1.max_label
    crossings = list(d1.crossings) + [tuple(x + shift for x in c) for c in d2.crossings]
    heads = dict(d1.heads)
    heads.update({e + shift: (ci + len(d1.crossings), p) for e, (ci, p) in d2.heads.items()})
    new = _assemble(crossings, d1.unknotted_components + d2.unknotted_components, heads)
    t1, t2 = len(d1.traced_components), len(d2.traced_components)
    u1, u2 = d1.unknotted_components, d2.unknotted_components
    framings = (list(first.framings[:t1]) + list(second.framings[:t2])
                + list(first.framings[t1:]) + list(second.framings[t2:]))
    assert len(framings) == t1 + t2 + u1 + u2
    return FramedLink(new, tuple(framings), name=first.name)


# ------------------------------------------------------
# CROSSING DELETION
# ------------------------------------------------------
def _delete_crossings(d: OrientedDiagram, doomed: Iterable[int],
                      drop: Iterable[int] = ()) -> tuple[OrientedDiagram, list[int | None], dict[int, int]]:
    """
    Remove crossings by joining slot 0 to slot 2 and slot 1 to slot 3.

    Joined labels collapse to their least member.  A joined cycle with no
    slot left becomes a crossingless unknot, unless its component is in
    ``drop``, in which case it disappears together with every dropped
    crossingless component.
    """
    doomed, drop = set(doomed), set(drop)
    parent: dict[int, int] = {}

    def find(x: int) -> int:
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)

    for ci in sorted(doomed):
        a, b, c, dd = d.crossings[ci]
        union(a, c)
        union(b, dd)
    members: dict[int, list[int]] = {}
    for label in d.occurrences:
        members.setdefault(find(label), []).append(label)
    rep = {label: min(members[find(label)]) for label in d.occurrences}

    keep = [ci for ci in range(len(d.crossings)) if ci not in doomed]
    index = {old: new for new, old in enumerate(keep)}
    crossings = [tuple(rep[x] for x in d.crossings[ci]) for ci in keep]
    remaining = {x for c in crossings for x in c}
    traced = len(d.traced_components)
    vanished = sorted(
        root for root, labels in members.items()
        if min(labels) not in remaining and d.component_of_edge[labels[0]] not in drop
    )
    kept_unknots = [j for j in range(d.unknotted_components) if traced + j not in drop]

    heads = {}
    for label, (ci, pos) in d.heads.items():
        if ci in index:
            heads[rep[label]] = (index[ci], pos)
    new = _assemble(crossings, len(kept_unknots) + len(vanished), heads)

    new_traced = len(new.traced_components)
    comp_map: list[int | None] = []
    for k, comp in enumerate(d.traced_components):
        low = rep[comp[0]]
        if k in drop:
            comp_map.append(None)
        elif low in remaining:
            comp_map.append(new.component_of_edge[low])
        else:
            comp_map.append(new_traced + len(kept_unknots) + vanished.index(find(comp[0])))
    for j in range(d.unknotted_components):
        comp_map.append(new_traced + kept_unknots.index(j) if j in kept_unknots else None)
    return new, comp_map, rep


def delete_components(link: FramedLink, components: Iterable[int]) -> FramedLink:
    components = sorted(set(components))
    for component in components:
        link._check_component(component)
    d = link.diagram
    doomed = [ci for ci in range(len(d.crossings)) if set(d.strands(ci)) & set(components)]
    new, comp_map, _ = _delete_crossings(d, doomed, drop=components)
    out = _carry(link, new, comp_map)
    LOGGER.debug("deleted components %s (%d crossings)", components, len(doomed))
    return out


def delete_component(link: FramedLink, component: int) -> FramedLink:
    return delete_components(link, [component])


# ------------------------------------------------------
# REIDEMEISTER MOVES
# ------------------------------------------------------
def _r1_add(link: FramedLink, site, sign: int) -> FramedLink:
    d = link.diagram
    x, y = d.max_label + 1, d.max_label + 2
    if isinstance(site, str) and site.startswith("U"):
        j = int(site[1:])
        if not 0 <= j < d.unknotted_components:
            raise MoveError(f"no crossingless component {site}")
        kink = (x, x, y, y) if sign > 0 else (x, y, y, x)
        new = _assemble(list(d.crossings) + [kink], d.unknotted_components - 1, d.heads)
        traced = len(d.traced_components)
        unknotted_map = [traced + (i if i < j else i - 1) + 1 for i in range(d.unknotted_components)]
        unknotted_map[j] = traced
        return _carry(link, new, _label_comp_map(d, new, unknotted_map))
    edge = int(site)
    if edge not in d.occurrences:
        raise MoveError(f"no edge {edge} for R1")
    hc, hp = d.head(edge)
    crossings = [list(c) for c in d.crossings]
    crossings[hc][hp] = y
    crossings.append([edge, y, x, x] if sign > 0 else [edge, x, x, y])
    new = _assemble(crossings, d.unknotted_components, d.heads)
    return _carry(link, new, _label_comp_map(d, new))


def _r1_remove(link: FramedLink, site) -> FramedLink:
    d = link.diagram
    ci = int(site)
    if not 0 <= ci < len(d.crossings):
        raise MoveError(f"no crossing {ci}")
    c = d.crossings[ci]
    if not any(c[p] == c[(p + 1) % 4] for p in range(4)):
        raise MoveError(f"crossing {ci} is not a kink")
    new, comp_map, _ = _delete_crossings(d, [ci])
    return _carry(link, new, comp_map)


def _face_with(d: OrientedDiagram, e1: int, e2: int, face: int | None):
    candidates = []
    for fi, sides in enumerate(d.faces):
        s1 = [s for s in sides if s[0] == e1]
        s2 = [s for s in sides if s[0] == e2]
        if s1 and s2:
            candidates.append((fi, s1[0], s2[0]))
    if face is not None:
        candidates = [c for c in candidates if c[0] == face]
    if not candidates:
        raise MoveError(f"edges {e1} and {e2} share no face")
    return candidates[0]


def _r2_add(link: FramedLink, site) -> FramedLink:
    d = link.diagram
    e1, e2 = int(site[0]), int(site[1])
    face = int(site[2]) if len(site) > 2 else None
    if e1 == e2:
        raise MoveError("R2 needs two different edges")
    for e in (e1, e2):
        if e not in d.occurrences:
            raise MoveError(f"no edge {e} for R2")
    _, (_, s1), (_, s2) = _face_with(d, e1, e2, face)
    t1 = d.occurrences[e1][1] if d.occurrences[e1][0] == s1 else d.occurrences[e1][0]
    t2 = d.occurrences[e2][1] if d.occurrences[e2][0] == s2 else d.occurrences[e2][0]
    top = d.max_label
    a, b, cc = e1, top + 1, top + 2
    dd, e, f = e2, top + 3, top + 4
    forward = d.head(e2) == t2
    crossings = [list(c) for c in d.crossings]
    crossings[t1[0]][t1[1]] = cc
    crossings[t2[0]][t2[1]] = f
    if forward:
        crossings += [[e, b, f, a], [dd, b, e, cc]]
    else:
        crossings += [[f, a, e, b], [e, cc, dd, b]]
    heads = dict(d.heads)
    n = len(d.crossings)
    if d.head(e1) == t1:
        heads[e1] = (n, 3 if forward else 1)
    new = _assemble(crossings, d.unknotted_components, heads)
    return _carry(link, new, _label_comp_map(d, new))


def bigons(d: OrientedDiagram) -> list[tuple[int, int]]:
    """Crossing pairs bounding a bigon whose one edge is over at both ends."""
    found = []
    for sides in d.faces:
        if len(sides) != 2:
            continue
        (u, (c1, p1)), (v, (c2, p2)) = sides
        if c1 == c2:
            continue
        q1 = d.tail(u) if d.head(u) == (c1, p1) else d.head(u)
        q2 = d.tail(v) if d.head(v) == (c2, p2) else d.head(v)
        parities = {p1 % 2, q1[1] % 2}, {p2 % 2, q2[1] % 2}
        if len(parities[0]) == 1 and len(parities[1]) == 1 and parities[0] != parities[1]:
            found.append(tuple(sorted((c1, c2))))
    return sorted(set(found))


def _r2_remove(link: FramedLink, site) -> FramedLink:
    d = link.diagram
    pair = tuple(sorted((int(site[0]), int(site[1]))))
    if pair not in bigons(d):
        raise MoveError(f"crossings {pair} do not bound a removable bigon")
    new, comp_map, _ = _delete_crossings(d, pair)
    return _carry(link, new, comp_map)


def reidemeister_move(link: FramedLink, move: str, site, sign: int = 1) -> FramedLink:
    """
    Apply R1+, R1-, R2+ or R2- at ``site``.

    R1+ takes an edge label or ``"U<k>"`` for the k-th crossingless
    component; R1- a crossing index; R2+ ``(over_edge, under_edge[, face])``;
    R2- a pair of crossing indices.  Framings ride along unchanged.
    """
    move = move.replace("−", "-")
    if move == "R1+":
        return _r1_add(link, site, sign)
    if move == "R1-":
        return _r1_remove(link, site)
    if move == "R2+":
        return _r2_add(link, site)
    if move == "R2-":
        return _r2_remove(link, site)
    raise MoveError(f"unknown move {move!r}")


def kinks(d: OrientedDiagram) -> list[int]:
    return [ci for ci, c in enumerate(d.crossings) if any(c[p] == c[(p + 1) % 4] for p in range(4))]


def simplify(link: FramedLink) -> FramedLink:
    """Repeatedly remove R1 kinks and R2 bigons until neither is left."""
    before = len(link.diagram.crossings)
    while True:
        d = link.diagram
        if kinks(d):
            link = _r1_remove(link, kinks(d)[0])
        elif bigons(d):
            link = _r2_remove(link, bigons(d)[0])
        else:
            break
    LOGGER.debug("simplify: %d -> %d crossings", before, len(link.diagram.crossings))
    return link


# ------------------------------------------------------
# PD-JSON
# ------------------------------------------------------
def _syntax(message: str) -> DiagramSyntaxError:
    return DiagramSyntaxError(message, 1, 1)


def parse_diagram(text: str) -> FramedLink:
    """Parse a PD-JSON document into a validated FramedLink."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramSyntaxError(exc.msg, exc.lineno, exc.colno) from exc
    return diagram_from_dict(doc)


def diagram_from_dict(doc) -> FramedLink:
    if not isinstance(doc, dict):
        raise _syntax("top level must be an object")
    crossings = doc.get("crossings", [])
    if not isinstance(crossings, list) or not all(
        isinstance(c, list) and len(c) == 4 and all(isinstance(x, int) and not isinstance(x, bool) for x in c)
        for c in crossings
    ):
        raise _syntax('"crossings" must be an array of 4-arrays of integers')
    unknotted = doc.get("unknotted_components", 0)
    if not isinstance(unknotted, int) or isinstance(unknotted, bool) or unknotted < 0:
        raise _syntax('"unknotted_components" must be a non-negative integer')
    orientations = doc.get("orientations", [])
    if not isinstance(orientations, list) or not all(
        isinstance(o, list) and len(o) == 2 and all(isinstance(x, int) for x in o) for o in orientations
    ):
        raise _syntax('"orientations" must be an array of [edge, under_label] pairs')
    raw = OrientedDiagram(tuple(tuple(c) for c in crossings), unknotted,
                          tuple(sorted(tuple(o) for o in orientations))).validate()
    d = _assemble(raw.crossings, raw.unknotted_components, raw.heads)

    framings = doc.get("framings", [0] * d.component_count)
    if not isinstance(framings, list) or not all(isinstance(f, int) and not isinstance(f, bool) for f in framings):
        raise _syntax('"framings" must be an array of integers')
    roles = doc.get("roles", {})
    if not isinstance(roles, dict) or not all(isinstance(v, int) for v in roles.values()):
        raise _syntax('"roles" must map R/B/G to component indices')
    name = doc.get("name")
    if name is not None and not isinstance(name, str):
        raise _syntax('"name" must be a string')
    return FramedLink(d, tuple(framings), dict(roles), name)


def canonical(link: FramedLink) -> FramedLink:
    """Relabel edges 1..n along each component in order and sort the crossings."""
    d = link.diagram
    relabel, n = {}, 0
    for comp in d.traced_components:
        for edge in comp:
            n += 1
            relabel[edge] = n
    tuples = [tuple(relabel[x] for x in c) for c in d.crossings]
    order = sorted(range(len(tuples)), key=lambda ci: tuples[ci])
    position = {old: new for new, old in enumerate(order)}
    heads = {relabel[e]: (position[ci], p) for e, (ci, p) in d.heads.items()}
    new = _assemble([tuples[ci] for ci in order], d.unknotted_components, heads)
    return FramedLink(new, link.framings, dict(link.roles), link.name)


def diagram_to_dict(link: FramedLink) -> dict:
    link = canonical(link)
    d = link.diagram
    doc: dict = {}
    if link.name is not None:
        doc["name"] = link.name
    if d.crossings:
        doc["crossings"] = [list(c) for c in d.crossings]
    if d.unknotted_components:
        doc["unknotted_components"] = d.unknotted_components
    if d.orientations:
        doc["orientations"] = [list(o) for o in d.orientations]
    doc["framings"] = list(link.framings)
    if link.roles:
        doc["roles"] = {tag: link.roles[tag] for tag in ROLES}
    return doc


def serialize_diagram(link: FramedLink) -> str:
    return json.dumps(diagram_to_dict(link), sort_keys=True, separators=(",", ":"))
