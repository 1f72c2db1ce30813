"""
Khovanov homology, the Lee deformation and the Rasmussen s-invariant over
the rationals.

The default engine scans the diagram one crossing at a time in the dotted
cobordism category: objects are crossingless matchings of the boundary of
the tangle processed so far, closed circles are delooped as soon as they
appear, and every entry of the differential that is a scalar multiple of
an identity between objects of equal quantum shift is cancelled by
Gaussian elimination.  With ``x^2 = t`` the same code computes Khovanov
(t = 0) and Lee (t = 1) complexes; for Lee only degree-preserving
isomorphisms are cancelled, so the filtration survives.

A dense cube-of-resolutions engine is kept as an oracle for small
diagrams.

Conventions: ``X[a, b, c, d]`` has 0-smoothing joining a-b and c-d and
1-smoothing joining a-d and b-c; generators labelled 1 carry quantum
degree +1 and those labelled x carry -1; the homological shift is -n_-
and the quantum shift is n_+ - 2 n_-.
"""
from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Iterable, Mapping, Sequence

from diagram import BudgetExceeded, DiagramValidationError, FramedLink, KBError, LaurentPolynomial

LOGGER = logging.getLogger(__name__)

DEFAULT_BUDGET = 24
KHOVANOV, LEE = "khovanov", "lee"
ENGINES = ("scan", "dense")

Morphism = dict[frozenset, Fraction]
Matching = frozenset


# ------------------------------------------------------
# RESULT TYPES
# ------------------------------------------------------
@dataclass(frozen=True)
class BigradedRanks:
    ranks: dict[tuple[int, int], int]

    def __getitem__(self, key: tuple[int, int]) -> int:
        return self.ranks.get(key, 0)

    @property
    def total(self) -> int:
        return sum(self.ranks.values())

    def euler_characteristic(self) -> LaurentPolynomial:
        out: dict[int, int] = {}
        for (i, j), rank in self.ranks.items():
            out[j] = out.get(j, 0) + (-1) ** (i % 2) * rank
        return LaurentPolynomial.from_dict(out, "q")

    def to_json(self) -> list[list[int]]:
        return [[i, j, r] for (i, j), r in sorted(self.ranks.items())]


@dataclass(frozen=True)
class SResult:
    s: int
    s_min: int
    s_max: int
    peak_objects: int = 0
    eliminations: int = 0

    def to_json(self) -> dict:
        return {
            "s": self.s,
            "s_min": self.s_min,
            "s_max": self.s_max,
            "peak_objects": self.peak_objects,
            "eliminations": self.eliminations,
        }


# ------------------------------------------------------
# SPARSE EXACT LINEAR ALGEBRA
# ------------------------------------------------------
def _axpy(target: dict, row: Mapping, factor: Fraction) -> None:
    for col, value in row.items():
        new = target.get(col, 0) + factor * value
        if new:
            target[col] = new
        else:
            target.pop(col, None)


def _echelon_insert(vec: dict, tag: dict | None, pivots: dict) -> bool:
    """
    Reduce ``vec`` against ``pivots`` (each keyed by its least column) and
    insert it as a new pivot row when something survives.  Returns True
    when ``vec`` was independent.
    """
    while True:
        hits = [c for c in vec if c in pivots]
        if not hits:
            break
        col = min(hits)
        row, row_tag = pivots[col]
        factor = -vec[col] / row[col]
        _axpy(vec, row, factor)
        if tag is not None:
            _axpy(tag, row_tag, factor)
    if vec:
        pivots[min(vec)] = (vec, tag)
        return True
    return False


def _rank(rows: Iterable[Mapping]) -> int:
    pivots: dict = {}
    return sum(_echelon_insert(dict(row), None, pivots) for row in rows)


def _kernel(columns: Iterable[tuple[int, Mapping]]) -> list[dict]:
    """Kernel of the map sending generator ``g`` to ``image``, as vectors over the generators."""
    pivots: dict = {}
    kernel = []
    for gen, image in columns:
        tag = {gen: Fraction(1)}
        if not _echelon_insert(dict(image), tag, pivots):
            kernel.append(tag)
    return kernel


# ------------------------------------------------------
# FILTERED COMPLEXES
# ------------------------------------------------------
@dataclass
class FilteredComplex:
    """
    Generators carry ``(homological degree, quantum degree)``; ``differential``
    maps a generator index to its sparse image.  ``rule`` is ``khovanov``
    (grading preserved) or ``lee`` (quantum filtration never decreases).
    """

    generators: list[tuple[int, int]]
    differential: dict[int, dict[int, Fraction]]
    rule: str = KHOVANOV
    peak_objects: int = 0
    eliminations: int = 0

    def image(self, gen: int) -> dict[int, Fraction]:
        return self.differential.get(gen, {})

    def d_squared_is_zero(self) -> bool:
        for gen in range(len(self.generators)):
            total: dict = {}
            for mid, coef in self.image(gen).items():
                _axpy(total, self.image(mid), coef)
            if total:
                return False
        return True

    def check_filtration(self) -> bool:
        for src, images in self.differential.items():
            h, q = self.generators[src]
            for tgt in images:
                h2, q2 = self.generators[tgt]
                if h2 != h + 1:
                    return False
                if (q2 != q) if self.rule == KHOVANOV else (q2 < q):
                    return False
        return True

    def _degree_ranks(self, sources: list[int]) -> int:
        return _rank(self.image(g) for g in sources)

    def bigraded_ranks(self) -> BigradedRanks:
        if self.rule != KHOVANOV:
            raise KBError("bigraded ranks need a grading-preserving differential")
        blocks: dict[tuple[int, int], list[int]] = defaultdict(list)
        for gen, key in enumerate(self.generators):
            blocks[key].append(gen)
        out = {}
        for (h, q), gens in blocks.items():
            incoming = self._degree_ranks(blocks.get((h - 1, q), []))
            rank = len(gens) - self._degree_ranks(gens) - incoming
            if rank:
                out[(h, q)] = rank
        return BigradedRanks(out)

    def total_rank(self) -> int:
        by_degree: dict[int, list[int]] = defaultdict(list)
        for gen, (h, _) in enumerate(self.generators):
            by_degree[h].append(gen)
        total = 0
        for h, gens in by_degree.items():
            total += len(gens) - self._degree_ranks(gens) - self._degree_ranks(by_degree.get(h - 1, []))
        return total

    def filtered_image_dimension(self, level: int, degree: int = 0) -> int:
        """Dimension of the image of H(F_level) in H, in one homological degree."""
        boundaries = [self.image(g) for g, (h, _) in enumerate(self.generators) if h == degree - 1]
        cycles = _kernel(
            (g, self.image(g)) for g, (h, q) in enumerate(self.generators) if h == degree and q >= level
        )
        return _rank(boundaries + cycles) - _rank(boundaries)


def _tensor_unknots(generators, differential, count: int):
    """Tensor a complex with the homology of ``count`` crossingless circles."""
    if not count:
        return generators, differential
    labelings = list(product((0, 1), repeat=count))
    index = {}
    out_gens = []
    for gen, (h, q) in enumerate(generators):
        for labels in labelings:
            index[gen, labels] = len(out_gens)
            out_gens.append((h, q + count - 2 * sum(labels)))
    out_d: dict[int, dict[int, Fraction]] = {}
    for src, images in differential.items():
        for labels in labelings:
            out_d[index[src, labels]] = {index[tgt, labels]: c for tgt, c in images.items()}
    return out_gens, out_d


# ------------------------------------------------------
# DOTTED COBORDISMS
# ------------------------------------------------------
def _partner(pairs: Iterable[tuple]) -> dict:
    out = {}
    for a, b in pairs:
        out[a] = b
        out[b] = a
    return out


def _cycles(m1: Iterable[tuple], m2: Iterable[tuple]) -> list[frozenset]:
    """Cycles of the union of two perfect matchings on the same points."""
    p1, p2 = _partner(m1), _partner(m2)
    seen: set = set()
    out = []
    for start in sorted(p1):
        if start in seen:
            continue
        points, p = [], start
        while p not in seen:
            q = p1[p]
            seen.update((p, q))
            points += [p, q]
            p = p2[q]
        out.append(frozenset(points))
    return out


def _close(arcs: Iterable[tuple], glue: Iterable[tuple], boundary: set) -> tuple[Matching, list[frozenset]]:
    """Join ``arcs`` through glued points into boundary arcs and closed circles."""
    partner = _partner(arcs)
    glued = _partner(glue)
    seen: set = set()
    matching = []
    for start in sorted(boundary):
        if start in seen:
            continue
        seen.add(start)
        p = start
        while True:
            q = partner[p]
            seen.add(q)
            if q in boundary:
                break
            p = glued[q]
            seen.add(p)
        matching.append(tuple(sorted((start, q))))
    circles = []
    for start in sorted(partner):
        if start in seen:
            continue
        points, p = [], start
        while p not in seen:
            q = partner[p]
            seen.update((p, q))
            points += [p, q]
            p = glued[q]
        circles.append(frozenset(points))
    return frozenset(matching), circles


def _disk_terms(chi: int, dots: int, circles: Sequence[frozenset], t: Fraction) -> Morphism:
    """
    Expand a connected surface of Euler characteristic ``chi`` with ``dots``
    dots bounding ``circles`` as a combination of dotted disks.
    """
    twice_genus = 2 - chi - len(circles)
    if twice_genus < 0 or twice_genus % 2:
        raise KBError(f"impossible surface: chi={chi}, boundary={len(circles)}")
    a, b = Fraction(1), Fraction(0)
    for _ in range(dots):
        a, b = t * b, a
    for _ in range(twice_genus // 2):
        a, b = 2 * t * b, 2 * a
    if not circles:
        return {frozenset(): b} if b else {}
    terms = {(0,): a, (1,): b}
    for _ in circles[1:]:
        split: dict[tuple, Fraction] = defaultdict(Fraction)
        for key, coef in terms.items():
            if key[-1] == 0:
                split[key[:-1] + (0, 1)] += coef
                split[key[:-1] + (1, 0)] += coef
            else:
                split[key[:-1] + (1, 1)] += coef
                split[key[:-1] + (0, 0)] += t * coef
        terms = split
    out = {}
    for key, coef in terms.items():
        if coef:
            out[frozenset(c for c, bit in zip(circles, key) if bit)] = coef
    return out


def _product(factors: Iterable[Morphism]) -> Morphism:
    out: Morphism = {frozenset(): Fraction(1)}
    for factor in factors:
        nxt: dict = defaultdict(Fraction)
        for k1, c1 in out.items():
            for k2, c2 in factor.items():
                nxt[k1 | k2] += c1 * c2
        out = {k: v for k, v in nxt.items() if v}
        if not out:
            return {}
    return out


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def _compose(first: Morphism, m1: Matching, m2: Matching, second: Morphism, m3: Matching, t: Fraction) -> Morphism:
    """``second`` after ``first`` for ``first: m1 -> m2`` and ``second: m2 -> m3``."""
    lower, upper, outer = _cycles(m1, m2), _cycles(m2, m3), _cycles(m1, m3)
    uf = _UnionFind()
    for cycle in lower + upper:
        points = sorted(cycle)
        for p in points[1:]:
            uf.union(points[0], p)
    chi: dict = defaultdict(int)
    for cycle in lower + upper:
        chi[uf.find(min(cycle))] += 1
    for a, _ in m2:
        chi[uf.find(a)] -= 1
    rims: dict = defaultdict(list)
    for cycle in outer:
        rims[uf.find(min(cycle))].append(cycle)
    out: dict = defaultdict(Fraction)
    for d1, c1 in first.items():
        for d2, c2 in second.items():
            dots: dict = defaultdict(int)
            for cycle in d1 | d2:
                dots[uf.find(min(cycle))] += 1
            term = _product(_disk_terms(chi[r], dots[r], rims[r], t) for r in chi)
            for key, coef in term.items():
                out[key] += c1 * c2 * coef
    return {k: v for k, v in out.items() if v}


@dataclass(frozen=True)
class _Glued:
    matching: Matching
    circles: tuple[frozenset, ...]


def _glued_morphism(pieces: Sequence[tuple[frozenset, bool]], glue: Sequence[tuple], src: _Glued, tgt: _Glued,
                    src_labels: Sequence[int], tgt_labels: Sequence[int], rename: Mapping, t: Fraction) -> Morphism:
    """
    Evaluate disjoint dotted disks ``pieces`` glued along ``glue`` between
    two delooped objects.  Source circles labelled x and target circles
    labelled 1 are capped with a dotted disk, the others with a plain one.
    """
    uf = _UnionFind()
    for points, _ in pieces:
        points = sorted(points)
        for p in points[1:]:
            uf.union(points[0], p)
    for a, b in glue:
        uf.union(a, b)
    chi: dict = defaultdict(int)
    dots: dict = defaultdict(int)
    for points, dotted in pieces:
        root = uf.find(min(points))
        chi[root] += 1
        dots[root] += dotted
    for a, _ in glue:
        chi[uf.find(a)] -= 1
    for circle, label in zip(src.circles, src_labels):
        root = uf.find(min(circle))
        chi[root] += 1
        dots[root] += label
    for circle, label in zip(tgt.circles, tgt_labels):
        root = uf.find(min(circle))
        chi[root] += 1
        dots[root] += 1 - label
    rims: dict = defaultdict(list)
    for cycle in _cycles(src.matching, tgt.matching):
        rims[uf.find(min(cycle))].append(frozenset(rename[p] for p in cycle))
    return _product(_disk_terms(chi[r], dots[r], rims[r], t) for r in chi)


# ------------------------------------------------------
# SCANNING ENGINE
# ------------------------------------------------------
@dataclass
class _Object:
    h: int
    q: int
    matching: Matching


@dataclass
class _TangleComplex:
    t: Fraction
    objects: dict[int, _Object] = field(default_factory=dict)
    d: dict[int, dict[int, Morphism]] = field(default_factory=dict)
    back: dict[int, set[int]] = field(default_factory=dict)
    boundary: set[int] = field(default_factory=set)
    counter: int = 0
    peak: int = 0
    eliminations: int = 0

    def add_object(self, obj: _Object) -> int:
        key = self.counter
        self.counter += 1
        self.objects[key] = obj
        self.d[key] = {}
        self.back[key] = set()
        return key

    def add_entry(self, src: int, tgt: int, mor: Morphism, scale: Fraction = Fraction(1)) -> None:
        current = dict(self.d[src].get(tgt, {}))
        _axpy(current, mor, scale)
        if current:
            self.d[src][tgt] = current
            self.back[tgt].add(src)
        else:
            self.d[src].pop(tgt, None)
            self.back[tgt].discard(src)

    def remove(self, key: int) -> None:
        for tgt in self.d.pop(key):
            self.back[tgt].discard(key)
        for src in self.back.pop(key):
            self.d[src].pop(key, None)
        del self.objects[key]

    def scalar_identity(self, src: int, tgt: int) -> Fraction | None:
        a, b = self.objects[src], self.objects[tgt]
        if a.matching != b.matching or a.q != b.q:
            return None
        mor = self.d[src][tgt]
        if set(mor) != {frozenset()}:
            return None
        return mor[frozenset()]

    def cancel(self, b1: int, b2: int, coef: Fraction) -> None:
        """Gaussian elimination of the isomorphism ``b1 -> b2``."""
        middle = self.objects[b1].matching
        into = [x for x in self.back[b2] if x != b1]
        out = [y for y in self.d[b1] if y != b2]
        for x in into:
            delta = self.d[x][b2]
            for y in out:
                gamma = self.d[b1][y]
                zigzag = _compose(delta, self.objects[x].matching, middle, gamma, self.objects[y].matching, self.t)
                self.add_entry(x, y, zigzag, -1 / coef)
        self.remove(b1)
        self.remove(b2)
        self.eliminations += 1

    def eliminate(self) -> None:
        progress = True
        while progress:
            progress = False
            for src in list(self.d):
                if src not in self.d:
                    continue
                for tgt in list(self.d[src]):
                    coef = self.scalar_identity(src, tgt)
                    if coef is not None:
                        self.cancel(src, tgt, coef)
                        progress = True
                        break


def _scan_order(crossings: Sequence[tuple[int, ...]]) -> list[int]:
    """Greedy order keeping the open boundary small: always take the crossing sharing most edges."""
    remaining = set(range(len(crossings)))
    open_edges: set[int] = set()
    order = []
    while remaining:
        ci = max(remaining, key=lambda k: (sum(1 for e in crossings[k] if e in open_edges), -k))
        remaining.discard(ci)
        order.append(ci)
        for e in crossings[ci]:
            open_edges ^= {e}
    return order


_SMOOTHINGS = (((-1, -2), (-3, -4)), ((-1, -4), (-2, -3)))


def _add_crossing(cx: _TangleComplex, crossing: Sequence[int]) -> _TangleComplex:
    slots = [-(k + 1) for k in range(4)]
    glue, fresh = [], {}
    for k, label in enumerate(crossing):
        twins = [j for j in range(4) if j != k and crossing[j] == label]
        if label in cx.boundary:
            glue.append((label, slots[k]))
        elif twins:
            if k < twins[0]:
                glue.append((slots[k], slots[twins[0]]))
        else:
            fresh[slots[k]] = label
    used = {a for a, _ in glue if a > 0}
    boundary = (cx.boundary - used) | set(fresh)
    rename = {p: fresh.get(p, p) for p in boundary}

    new = _TangleComplex(cx.t, boundary=set(rename.values()), peak=cx.peak, eliminations=cx.eliminations)
    glued: dict[tuple[int, int], _Glued] = {}
    index: dict[tuple[int, int, tuple[int, ...]], int] = {}
    for key, obj in cx.objects.items():
        for s, smoothing in enumerate(_SMOOTHINGS):
            matching, circles = _close(list(obj.matching) + list(smoothing), glue, boundary)
            glued[key, s] = _Glued(matching, tuple(circles))
            renamed = frozenset(tuple(sorted((rename[a], rename[b]))) for a, b in matching)
            for labels in product((0, 1), repeat=len(circles)):
                q = obj.q + s + len(circles) - 2 * sum(labels)
                index[key, s, labels] = new.add_object(_Object(obj.h + s, q, renamed))

    def connect(src_key, s1, tgt_key, s2, pieces, coef):
        g1, g2 = glued[src_key, s1], glued[tgt_key, s2]
        for l1 in product((0, 1), repeat=len(g1.circles)):
            for l2 in product((0, 1), repeat=len(g2.circles)):
                mor = _glued_morphism(pieces, glue, g1, g2, l1, l2, rename, cx.t)
                if mor:
                    new.add_entry(index[src_key, s1, l1], index[tgt_key, s2, l2], mor, coef)

    for src_key, images in cx.d.items():
        m1 = cx.objects[src_key].matching
        for tgt_key, mor in images.items():
            lower = _cycles(m1, cx.objects[tgt_key].matching)
            for s, smoothing in enumerate(_SMOOTHINGS):
                flat = [(frozenset(arc), False) for arc in smoothing]
                for dotted, coef in mor.items():
                    pieces = [(cycle, cycle in dotted) for cycle in lower] + flat
                    connect(src_key, s, tgt_key, s, pieces, coef)
    for key, obj in cx.objects.items():
        pieces = [(frozenset(arc), False) for arc in obj.matching] + [(frozenset(slots), False)]
        connect(key, 0, key, 1, pieces, Fraction((-1) ** obj.h))
    new.peak = max(new.peak, len(new.objects))
    new.eliminate()
    return new


def _crossing_counts(link: FramedLink) -> tuple[int, int]:
    signs = link.diagram.signs
    return sum(1 for s in signs if s > 0), sum(1 for s in signs if s < 0)


def _scan_complex(link: FramedLink, rule: str) -> FilteredComplex:
    t = Fraction(1 if rule == LEE else 0)
    d = link.diagram
    cx = _TangleComplex(t)
    cx.add_object(_Object(0, 0, frozenset()))
    for step, ci in enumerate(_scan_order(d.crossings), 1):
        cx = _add_crossing(cx, d.crossings[ci])
        LOGGER.debug("scan %s: crossing %d/%d, %d objects, boundary %d", link.name, step, len(d.crossings),
                     len(cx.objects), len(cx.boundary))
    n_plus, n_minus = _crossing_counts(link)
    keys = sorted(cx.objects)
    position = {k: i for i, k in enumerate(keys)}
    generators = [(cx.objects[k].h - n_minus, cx.objects[k].q + n_plus - 2 * n_minus) for k in keys]
    differential = {}
    for k in keys:
        images = {position[tgt]: mor.get(frozenset(), Fraction(0)) for tgt, mor in cx.d[k].items()}
        images = {tgt: c for tgt, c in images.items() if c}
        if images:
            differential[position[k]] = images
    generators, differential = _tensor_unknots(generators, differential, d.unknotted_components)
    return FilteredComplex(generators, differential, rule, cx.peak, cx.eliminations)


# ------------------------------------------------------
# DENSE ORACLE
# ------------------------------------------------------
def _dense_complex(link: FramedLink, rule: str) -> FilteredComplex:
    """Full cube of resolutions; exponential in the crossing count."""
    t = Fraction(1 if rule == LEE else 0)
    d = link.diagram
    n = len(d.crossings)
    glue = [tuple(slots) for slots in d.occurrences.values()]
    n_plus, n_minus = _crossing_counts(link)

    def smoothing(bits):
        arcs = []
        for ci, bit in enumerate(bits):
            for a, b in _SMOOTHINGS[bit]:
                arcs.append(((ci, -a - 1), (ci, -b - 1)))
        return _close(arcs, glue, set())[1]

    states = {bits: smoothing(bits) for bits in product((0, 1), repeat=n)}
    generators: list[tuple[int, int]] = []
    index: dict = {}
    for bits, circles in states.items():
        r = sum(bits)
        for labels in product((0, 1), repeat=len(circles)):
            index[bits, labels] = len(generators)
            generators.append((r - n_minus, len(circles) - 2 * sum(labels) + r + n_plus - 2 * n_minus))

    differential: dict[int, dict[int, Fraction]] = defaultdict(dict)
    for bits, circles in states.items():
        for i in (i for i, b in enumerate(bits) if b == 0):
            target = bits[:i] + (1,) + bits[i + 1:]
            after = states[target]
            sign = Fraction((-1) ** sum(bits[:i]))
            kept = [c for c in circles if c in after]
            gone = [c for c in circles if c not in after]
            born = [c for c in after if c not in circles]
            for labels in product((0, 1), repeat=len(circles)):
                lab = dict(zip(circles, labels))
                if len(gone) == 2:
                    a, b = lab[gone[0]], lab[gone[1]]
                    if a == b == 1:
                        results = [({born[0]: 0}, t)] if t else []
                    else:
                        results = [({born[0]: a + b}, Fraction(1))]
                else:
                    a = lab[gone[0]]
                    if a == 0:
                        results = [({born[0]: 0, born[1]: 1}, Fraction(1)), ({born[0]: 1, born[1]: 0}, Fraction(1))]
                    else:
                        results = [({born[0]: 1, born[1]: 1}, Fraction(1))]
                        if t:
                            results.append(({born[0]: 0, born[1]: 0}, t))
                src = index[bits, labels]
                for new_labels, coef in results:
                    full = {c: lab[c] for c in kept}
                    full.update(new_labels)
                    tgt = index[target, tuple(full[c] for c in after)]
                    differential[src][tgt] = differential[src].get(tgt, 0) + sign * coef
    differential = {s: {k: v for k, v in img.items() if v} for s, img in differential.items()}
    generators, differential = _tensor_unknots(generators, differential, d.unknotted_components)
    return FilteredComplex(generators, differential, rule, len(generators), 0)


# ------------------------------------------------------
# PUBLIC OPERATIONS
# ------------------------------------------------------
def _check_budget(link: FramedLink, budget: int) -> None:
    n = len(link.diagram.crossings)
    if n > budget:
        raise BudgetExceeded(
            f"{link.name or 'diagram'} has {n} crossings, over the budget of {budget}",
            projected_cost=float(2 ** n),
        )


def chain_complex(link: FramedLink, rule: str = KHOVANOV, engine: str = "scan",
                  budget: int = DEFAULT_BUDGET) -> FilteredComplex:
    if engine not in ENGINES:
        raise KBError(f"unknown engine {engine!r}, expected one of {ENGINES}")
    if rule not in (KHOVANOV, LEE):
        raise KBError(f"unknown complex {rule!r}")
    _check_budget(link, budget)
    build = _scan_complex if engine == "scan" else _dense_complex
    cx = build(link, rule)
    if not cx.d_squared_is_zero():
        raise KBError(f"{rule} differential of {link.name or 'diagram'} does not square to zero "
                      f"after {cx.eliminations} eliminations")
    if not cx.check_filtration():
        raise KBError(f"{rule} differential of {link.name or 'diagram'} breaks the grading "
                      f"after {cx.eliminations} eliminations")
    LOGGER.info("%s complex of %s (%s): %d generators after %d eliminations", rule, link.name, engine,
                len(cx.generators), cx.eliminations)
    return cx


def khovanov_homology(link: FramedLink, engine: str = "scan", budget: int = DEFAULT_BUDGET) -> BigradedRanks:
    return chain_complex(link, KHOVANOV, engine, budget).bigraded_ranks()


def jones_polynomial(link: FramedLink, engine: str = "scan", budget: int = DEFAULT_BUDGET) -> LaurentPolynomial:
    """Graded Euler characteristic, normalised so the unknot gives q + q^-1."""
    return khovanov_homology(link, engine, budget).euler_characteristic()


def lee_rank(link: FramedLink, engine: str = "scan", budget: int = DEFAULT_BUDGET) -> int:
    rank = chain_complex(link, LEE, engine, budget).total_rank()
    expected = 2 ** link.component_count
    if rank != expected:
        raise KBError(f"Lee homology of {link.name or 'diagram'} has rank {rank}, expected {expected}")
    return rank


def s_invariant(link: FramedLink, engine: str = "scan", budget: int = DEFAULT_BUDGET) -> SResult:
    """
    Read s from the two filtration levels carrying Lee homology in degree 0:
    s_max is the highest level whose cycles still reach homology and s_min
    the highest level whose cycles reach all of it.
    """
    if link.component_count != 1:
        raise DiagramValidationError(
            "single component", f"s-invariant needs a knot, got {link.component_count} components"
        )
    cx = chain_complex(link, LEE, engine, budget)
    levels = sorted({q for h, q in cx.generators if h == 0}, reverse=True)
    reach = {level: cx.filtered_image_dimension(level) for level in levels}
    if not levels or reach[levels[-1]] != 2:
        found = reach[levels[-1]] if levels else 0
        raise KBError(f"Lee homology of {link.name} in degree 0 has dimension {found}")
    s_max = max(level for level in levels if reach[level] >= 1)
    s_min = max(level for level in levels if reach[level] >= 2)
    if s_max != s_min + 2:
        raise KBError(f"Lee generators of {link.name} at levels {s_min}, {s_max} are not two apart")
    result = SResult(s_min + 1, s_min, s_max, cx.peak_objects, cx.eliminations)
    LOGGER.info("s(%s) = %d", link.name, result.s)
    return result
