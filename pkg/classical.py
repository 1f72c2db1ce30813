"""
Classical knot invariants: the Wirtinger presentation, the Alexander
polynomial by Fox calculus and the knot determinant.

The Alexander polynomial is normalized to be symmetric with value 1 at
t = 1, so "Alexander polynomial 1" is a literal equality test.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import sympy as sym

from diagram import DiagramValidationError, FramedLink, LaurentPolynomial
from surgery import AbelianInvariants, smith_normal_form

LOGGER = logging.getLogger(__name__)

Word = tuple[tuple[int, int], ...]


# ------------------------------------------------------
# WIRTINGER PRESENTATION
# ------------------------------------------------------
@dataclass(frozen=True)
class WirtingerPresentation:
    """
    One generator per arc, one relator per crossing.

    ``arc_of_edge`` maps each edge label to the arc holding it; arcs are
    numbered by their least edge label, crossingless components last.
    A relator is a word of ``(generator, exponent)`` pairs.
    """

    generators: int
    relators: tuple[Word, ...]
    arc_of_edge: dict[int, int]

    def exponent_matrix(self) -> list[list[int]]:
        rows = []
        for word in self.relators:
            row = [0] * self.generators
            for gen, exp in word:
                row[gen] += exp
            rows.append(row)
        return rows

    def abelianization(self) -> AbelianInvariants:
        rows = self.exponent_matrix()
        if not self.generators:
            return AbelianInvariants(())
        rows += [[0] * self.generators for _ in range(self.generators - len(rows))]
        return smith_normal_form(rows)

    def to_json(self) -> dict:
        return {
            "generators": self.generators,
            "relators": [[list(p) for p in word] for word in self.relators],
        }


def _arcs(link: FramedLink) -> dict[int, int]:
    d = link.diagram
    parent = {e: e for e in d.occurrences}

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for c in d.crossings:
        a, b = find(c[1]), find(c[3])
        if a != b:
            parent[max(a, b)] = min(a, b)
    roots = sorted({find(e) for e in parent})
    index = {root: k for k, root in enumerate(roots)}
    return {e: index[find(e)] for e in parent}


def wirtinger(link: FramedLink) -> WirtingerPresentation:
    """
    Arcs are the classes of edges joined through over-passes.  At a crossing
    with incoming under-arc ``a``, outgoing under-arc ``b``, over-arc ``o``
    and sign ``s`` the relator is ``o^s a o^-s b^-1``.
    """
    d = link.diagram
    arc_of_edge = _arcs(link)
    relators = []
    for c, sign in zip(d.crossings, d.signs):
        a, o, b = arc_of_edge[c[0]], arc_of_edge[c[1]], arc_of_edge[c[2]]
        relators.append(((o, sign), (a, 1), (o, -sign), (b, -1)))
    generators = len(set(arc_of_edge.values())) + d.unknotted_components
    LOGGER.debug("wirtinger %s: %d generators, %d relators", link.name, generators, len(relators))
    return WirtingerPresentation(generators, tuple(relators), arc_of_edge)


# ------------------------------------------------------
# ALEXANDER POLYNOMIAL
# ------------------------------------------------------
T = sym.Symbol("t")


def _require_knot(link: FramedLink) -> None:
    if link.component_count != 1:
        raise DiagramValidationError(
            "single component", f"{link.name or 'link'} has {link.component_count} components, expected a knot"
        )


def fox_matrix(presentation: WirtingerPresentation) -> sym.Matrix:
    """
    Abelianized Fox Jacobian with every generator sent to t.

    Rows with a negative over-exponent are multiplied by the unit t so all
    entries are polynomials.
    """
    m = sym.zeros(len(presentation.relators), presentation.generators)
    for row, word in enumerate(presentation.relators):
        (o, s), (a, _), _, (b, _) = word
        if s > 0:
            entries = ((o, 1 - T), (a, T), (b, -1))
        else:
            entries = ((o, T - 1), (a, 1), (b, -T))
        for col, value in entries:
            m[row, col] += value
    return m


def normalize_alexander(expr, variable: str = "t") -> LaurentPolynomial:
    """Strip powers of t, center the exponents and fix the sign so that Δ(1) = 1."""
    expr = sym.expand(expr)
    if expr == 0:
        return LaurentPolynomial((), variable)
    poly = sym.Poly(expr, T)
    coefficients = {monomial[0]: int(c) for monomial, c in poly.terms()}
    low, high = min(coefficients), max(coefficients)
    if (high - low) % 2:
        raise DiagramValidationError("alexander symmetry", f"polynomial {expr} has odd span")
    shift = low + (high - low) // 2
    centered = {e - shift: c for e, c in coefficients.items()}
    if sum(centered.values()) < 0:
        centered = {e: -c for e, c in centered.items()}
    result = LaurentPolynomial.from_dict(centered, variable)
    if result != result.invert_variable():
        raise DiagramValidationError("alexander symmetry", f"{result} is not symmetric")
    return result


def alexander_polynomial(knot: FramedLink) -> LaurentPolynomial:
    _require_knot(knot)
    if not knot.diagram.crossings:
        return LaurentPolynomial.monomial(0, 1, "t")
    jacobian = fox_matrix(wirtinger(knot))
    minor = jacobian[:-1, :-1]
    det = minor.det(method="berkowitz") if minor.rows else sym.Integer(1)
    result = normalize_alexander(det)
    if result.evaluate(1) != 1:
        raise DiagramValidationError("alexander normalization", f"Δ(1) = {result.evaluate(1)} for {knot.name}")
    LOGGER.info("alexander %s: %s", knot.name, result)
    return result


def alexander_from_seifert(matrix) -> LaurentPolynomial:
    """det(tV - V^T), normalized; the oracle for corpus knots with a stored Seifert matrix."""
    v = sym.Matrix(matrix)
    if not v.rows:
        return LaurentPolynomial.monomial(0, 1, "t")
    return normalize_alexander((T * v - v.T).det(method="berkowitz"))


def determinant(knot: FramedLink) -> int:
    value = alexander_polynomial(knot).evaluate(-1)
    return abs(int(value))
