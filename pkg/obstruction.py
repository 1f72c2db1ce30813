"""
Projective slice framing bookkeeping and the RBG obstruction classifier.

PF_+(K) is the least framing k with (K, k) slice in some #n(-CP^2) and
PF_-(K) the greatest with (K, k) slice in some #nCP^2.  Both are tracked as
intervals; the classifier only fires on comparisons of r with these
intervals that the bounds decide.  Conjecture-dependent conclusions are
gated behind ``AssumptionSet.assume_conjecture`` and marked conditional.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from classical import alexander_polynomial, determinant
from diagram import (BudgetExceeded, FramedLink, KBError, MoveError, delete_components, diagram_to_dict,
                     simplify)
from khovanov import DEFAULT_BUDGET, s_invariant
from kirby import apply_move, derive_pair
from surgery import validate_rbg

LOGGER = logging.getLogger(__name__)

# s of the (2,1)-cable-like link F_{2,1}(1), a stored constant used by the small, r < 0 rule.
S_F21 = -2

CONJECTURE = "assume_conjecture"
CONJECTURE_TEXT = "conditional on: a knot (-1)-slice in some #nCP² has s ≥ 0"


class ConsistencyError(KBError):
    """Computed invariants contradict a proved implication."""


# ------------------------------------------------------
# PROJECTIVE SLICE FRAMINGS
# ------------------------------------------------------
def _bound_json(value: int | None, sign: str) -> int | str:
    return value if value is not None else f"{sign}inf"


@dataclass(frozen=True)
class PFBounds:
    """
    Intervals ``[plus_lower, plus_upper]`` for PF_+ and
    ``[minus_lower, minus_upper]`` for PF_-.  ``None`` is an open end.
    """

    plus_lower: int = 0
    plus_upper: int | None = None
    minus_lower: int | None = None
    minus_upper: int = 0
    provenance: Mapping[str, str] = field(
        default_factory=lambda: {"plus_lower": "homological", "minus_upper": "homological"}
    )

    def __post_init__(self):
        if self.plus_lower < 0 or self.minus_upper > 0:
            raise KBError("PF_+ is never negative and PF_- is never positive")
        if self.plus_upper is not None and self.plus_upper < self.plus_lower:
            raise KBError(f"inconsistent PF_+ bounds [{self.plus_lower}, {self.plus_upper}]")
        if self.minus_lower is not None and self.minus_lower > self.minus_upper:
            raise KBError(f"inconsistent PF_- bounds [{self.minus_lower}, {self.minus_upper}]")

    @classmethod
    def biprojective(cls, provenance: str = "biprojective") -> "PFBounds":
        return cls(0, 0, 0, 0, {k: provenance for k in ("plus_lower", "plus_upper", "minus_lower", "minus_upper")})

    @property
    def is_biprojective(self) -> bool:
        return self.plus_upper == 0 and self.minus_lower == 0

    def combine(self, other: "PFBounds") -> "PFBounds":
        """Intersect two sets of bounds, keeping the provenance of whichever bound is tighter."""
        prov = dict(self.provenance)

        def pick(name, mine, theirs, better):
            if theirs is None or (mine is not None and not better(theirs, mine)):
                return mine
            if name in other.provenance:
                prov[name] = other.provenance[name]
            return theirs

        return PFBounds(
            pick("plus_lower", self.plus_lower, other.plus_lower, lambda a, b: a > b),
            pick("plus_upper", self.plus_upper, other.plus_upper, lambda a, b: a < b),
            pick("minus_lower", self.minus_lower, other.minus_lower, lambda a, b: a > b),
            pick("minus_upper", self.minus_upper, other.minus_upper, lambda a, b: a < b),
            prov,
        )

    # each comparison answers True or False when the bounds decide it, None otherwise
    def r_at_least_plus(self, r: int) -> bool | None:
        if self.plus_upper is not None and r >= self.plus_upper:
            return True
        return False if r < self.plus_lower else None

    def r_above_plus(self, r: int) -> bool | None:
        if self.plus_upper is not None and r > self.plus_upper:
            return True
        return False if r <= self.plus_lower else None

    def r_below_minus(self, r: int) -> bool | None:
        if self.minus_lower is not None and r < self.minus_lower:
            return True
        return False if r >= self.minus_upper else None

    def r_at_most_minus(self, r: int) -> bool | None:
        if self.minus_lower is not None and r <= self.minus_lower:
            return True
        return False if r > self.minus_upper else None

    def to_json(self) -> dict:
        return {
            "pf_plus": [self.plus_lower, _bound_json(self.plus_upper, "+")],
            "pf_minus": [_bound_json(self.minus_lower, "-"), self.minus_upper],
            "provenance": dict(sorted(self.provenance.items())),
        }


def _least_framing(x: int) -> int:
    """Least k >= 0 with k - sqrt(k) >= x, using (k - x)^2 >= k with k >= x."""
    k = max(0, x)
    while (k - x) ** 2 < k:
        k += 1
    return k


def pf_bounds_from_tau(tau: int) -> PFBounds:
    """Bounds from PF_- + sqrt|PF_-| <= 2 tau <= PF_+ - sqrt(PF_+)."""
    bounds = PFBounds(
        plus_lower=_least_framing(2 * tau),
        minus_upper=-_least_framing(-2 * tau),
        provenance={"plus_lower": "tau-inequality", "minus_upper": "tau-inequality"},
    )
    LOGGER.debug("tau=%d gives PF_+ >= %d, PF_- <= %d", tau, bounds.plus_lower, bounds.minus_upper)
    return bounds


def unknot_bounds() -> PFBounds:
    return PFBounds.biprojective("unknot")


def pf_minus_from_biprojective(bounds: PFBounds) -> PFBounds:
    """An asserted biprojectively H-slice knot has PF_+ = PF_- = 0."""
    pinned = PFBounds.biprojective("user-asserted")
    if bounds.plus_lower > 0 or bounds.minus_upper < 0:
        raise KBError(f"bounds {bounds.to_json()} rule out a biprojectively H-slice knot")
    return bounds.combine(pinned)


def _twist_sign(link: FramedLink, move: Mapping) -> int:
    op = move.get("op")
    if op == "twist":
        return int(move["region"].get("sign", 1)) if "region" in move else int(move.get("sign", 1))
    if op == "crossing_change":
        # the twist runs through oppositely oriented strands, so it has the sign of the crossing it changes
        return link.diagram.signs[int(move["crossing"])]
    return 0


def pf_upper_from_twists(knot: FramedLink, script: Iterable[Mapping]) -> PFBounds:
    """
    Bound a projective slice framing from full twists that unknot ``knot``.

    Undoing the script builds the knot from the unknot: negative twists on
    the knot give (K, sum ell^2) slice in some #n(-CP^2), so PF_+ is at most
    that; positive twists give PF_- at least -sum ell^2.  Reidemeister moves
    and ``simplify`` may be interleaved.
    """
    if knot.component_count != 1:
        raise MoveError("twist scripts bound framings of knots only")
    link = knot.with_framings([0])
    signs = set()
    for step, move in enumerate(script):
        sign = _twist_sign(link, move)
        if sign:
            signs.add(sign)
        try:
            link = apply_move(link, move)
        except (KeyError, TypeError, ValueError) as exc:
            raise MoveError(f"step {step}: malformed move {dict(move)!r}") from exc
    link = simplify(link)
    if link.component_count != 1 or link.diagram.crossings:
        raise MoveError(f"twist script leaves {len(link.diagram.crossings)} crossings, not an unknot")
    if len(signs) > 1:
        raise MoveError("twists of both signs give no projective bound")
    framing = -link.framings[0]
    if not signs:
        return PFBounds.biprojective("twist-construction")
    if signs == {-1}:
        return PFBounds(plus_upper=framing,
                        provenance={"plus_lower": "homological", "plus_upper": "twist-construction",
                                    "minus_upper": "homological"})
    return PFBounds(minus_lower=framing,
                    provenance={"plus_lower": "homological", "minus_lower": "twist-construction",
                                "minus_upper": "homological"})


# ------------------------------------------------------
# CLASSIFIER
# ------------------------------------------------------
@dataclass(frozen=True)
class AssumptionSet:
    assume_conjecture: bool = False
    assume_special: bool = False
    small_unknot_R: bool = False
    biprojective_R: bool = False
    tau_R: int | None = None
    s_K: int | None = None
    s_Kprime: int | None = None

    def __post_init__(self):
        for name in ("s_K", "s_Kprime"):
            value = getattr(self, name)
            if value is not None and value % 2:
                raise KBError(f"{name}={value} is not even")

    def bounds(self, base: PFBounds | None = None) -> PFBounds:
        bounds = base or PFBounds()
        if self.tau_R is not None:
            bounds = bounds.combine(pf_bounds_from_tau(self.tau_R))
        if self.biprojective_R:
            bounds = pf_minus_from_biprojective(bounds)
        return bounds

    def to_json(self) -> dict:
        return {k: v for k, v in sorted(vars(self).items())}


@dataclass(frozen=True)
class Implication:
    case: int
    subject: str
    other: str
    route: str
    conditional: bool = False
    flags: tuple[str, ...] = ()

    HYPOTHESES = {1: "is H-slice in some #nCP²", 2: "is H-slice in some #n(-CP²)",
                  3: "is slice (or biprojectively H-slice)"}
    RELATIONS = {1: "≥ 0", 2: "≤ 0", 3: "= 0"}
    NEGATIONS = {1: "is not slice nor H-slice in any #nCP²", 2: "is not slice nor H-slice in any #n(-CP²)",
                 3: "is not slice nor biprojectively H-slice"}

    @property
    def statement(self) -> str:
        return f"If {self.subject} {self.HYPOTHESES[self.case]}, then s({self.other}) {self.RELATIONS[self.case]}"

    def violated_by(self, s_value: int) -> bool:
        return {1: s_value < 0, 2: s_value > 0, 3: s_value != 0}[self.case]

    @property
    def negation(self) -> str:
        return f"{self.subject} {self.NEGATIONS[self.case]}"

    def to_json(self) -> dict:
        doc = {"case": self.case, "subject": self.subject, "statement": self.statement, "route": self.route,
               "conditional": self.conditional, "flags": list(self.flags)}
        if self.conditional:
            doc["watermark"] = CONJECTURE_TEXT
        return doc


@dataclass(frozen=True)
class Expectation:
    statement: str
    justification: str
    violations: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {"statement": self.statement, "justification": self.justification,
                "violations": list(self.violations)}


def small_r_negative_rule(r: int, small_unknot_R: bool, s_K: int | None = None,
                          s_Kprime: int | None = None) -> Expectation | None:
    """For a small RBG-link with R = U and r < 0 both derived knots have s >= 0."""
    if not (small_unknot_R and r < 0):
        return None
    justification = (f"(K,-1) bounds a disk in #|r|CP² meeting one exceptional sphere in 3 points; "
                     f"removing it leaves a cobordism of Euler characteristic -2 from -F_(2,1)(1), so "
                     f"s(K) ≥ s(-F_(2,1)(1)) - 2 = {-S_F21} - 2 = 0")
    violations = tuple(f"s({name}) = {value} < 0" for name, value in (("K", s_K), ("K'", s_Kprime))
                       if value is not None and value < 0)
    return Expectation("s(K) ≥ 0 and s(K') ≥ 0", justification, violations)


@dataclass(frozen=True)
class ObstructionVerdict:
    r: int
    bounds: PFBounds
    applicable_cases: tuple[int, ...]
    case_status: Mapping[int, str]
    implications: tuple[Implication, ...]
    blocking: str | None = None
    contradiction_found: bool = False
    contradictions: tuple[dict, ...] = ()
    conclusions: tuple[str, ...] = ()
    expectation: Expectation | None = None
    assumptions: AssumptionSet = field(default_factory=AssumptionSet)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "pf_bounds": self.bounds.to_json(),
            "applicable_cases": list(self.applicable_cases),
            "case_status": {str(k): v for k, v in sorted(self.case_status.items())},
            "implications": [imp.to_json() for imp in self.implications],
            "blocking": self.blocking,
            "contradiction_found": self.contradiction_found,
            "contradictions": list(self.contradictions),
            "conclusions": list(self.conclusions),
            "expectation": self.expectation.to_json() if self.expectation else None,
            "assumptions": self.assumptions.to_json(),
        }


def _routes(case: int, r: int, pf: PFBounds, small: bool) -> list[tuple[str, bool | None, bool]]:
    """Candidate reasons for a case to apply: (route, decided comparison, needs the conjecture)."""
    if case == 1:
        return [("r ≥ PF_+(R)", pf.r_at_least_plus(r), False),
                ("small RBG-link with R = U and r < 0", small and r < 0, False),
                ("r < PF_-(R)", pf.r_below_minus(r), True)]
    return [("r ≤ PF_-(R)", pf.r_at_most_minus(r), False),
            ("small RBG-link with R = U and r > 0", small and r > 0, False),
            ("r > PF_+(R)", pf.r_above_plus(r), True)]


def _decide(case: int, r: int, pf: PFBounds, assumptions: AssumptionSet) -> tuple[str, str | None, bool]:
    routes = _routes(case, r, pf, assumptions.small_unknot_R)
    for route, holds, conjectural in routes:
        if holds and (not conjectural or assumptions.assume_conjecture):
            return "applies", route, conjectural
    if any(holds for _, holds, _ in routes):
        return "needs conjecture", None, False
    if any(holds is None for _, holds, _ in routes):
        return "unknown", None, False
    return "does not apply", None, False


def classify(r: int, pf: PFBounds, assumptions: AssumptionSet | None = None) -> ObstructionVerdict:
    """
    Decide which of the three implications hold for an RBG-link with R of
    framing r and projective slice framings within ``pf``.

    Case 1 (H-slice in #nCP² gives s ≥ 0) holds when r ≥ PF_+(R), for small
    links with R = U and r < 0, or under the conjecture when r < PF_-(R).
    Case 2 is its mirror.  Case 3 holds when both do.  The roles of B and G
    are symmetric, so each case is stated for K and for K'.
    """
    assumptions = assumptions or AssumptionSet()
    pf = assumptions.bounds(pf)
    status, chosen = {}, {}
    for case in (1, 2):
        status[case], route, conjectural = _decide(case, r, pf, assumptions)
        if route:
            chosen[case] = (route, conjectural)
    if status[1] == status[2] == "applies":
        status[3] = "applies"
        chosen[3] = (f"cases 1 ({chosen[1][0]}) and 2 ({chosen[2][0]})", chosen[1][1] or chosen[2][1])
    elif "does not apply" in (status[1], status[2]):
        status[3] = "does not apply"
    else:
        status[3] = "unknown" if "unknown" in (status[1], status[2]) else "needs conjecture"
    applicable = tuple(case for case in (1, 2, 3) if status[case] == "applies")

    implications = []
    for case in applicable:
        route, conjectural = chosen[case]
        flags = (CONJECTURE,) if conjectural else ()
        if "small RBG-link" in route:
            flags += ("small_unknot_R",)
        for subject, other in (("K", "K'"), ("K'", "K")):
            implications.append(Implication(case, subject, other, route, conjectural, flags))

    blocking = None
    if not applicable:
        if pf.r_below_minus(r) is False and pf.r_at_least_plus(r) is False:
            blocking = "r in the undetermined window [PF_-(R), PF_+(R))"
        elif "unknown" in status.values():
            blocking = "comparison of r with PF_±(R) is unknown from the given bounds"
        else:
            blocking = "only conjecture-dependent routes apply; rerun with the conjecture assumed"

    s_values = {"K": assumptions.s_K, "K'": assumptions.s_Kprime}
    contradictions, conclusions = [], []
    for imp in implications:
        value = s_values[imp.other]
        if value is not None and imp.violated_by(value):
            contradictions.append({"implication": imp.statement, f"s({imp.other})": value,
                                   "conditional": imp.conditional})
            if imp.negation not in conclusions:
                conclusions.append(imp.negation)
    expectation = small_r_negative_rule(r, assumptions.small_unknot_R, assumptions.s_K, assumptions.s_Kprime)
    verdict = ObstructionVerdict(
        r=r,
        bounds=pf,
        applicable_cases=applicable,
        case_status=status,
        implications=tuple(implications),
        blocking=blocking,
        contradiction_found=bool(contradictions),
        contradictions=tuple(contradictions),
        conclusions=tuple(conclusions),
        expectation=expectation,
        assumptions=assumptions,
    )
    LOGGER.info("classify r=%d: cases %s, contradiction=%s", r, list(applicable), verdict.contradiction_found)
    return verdict


@dataclass(frozen=True)
class SatelliteWindow:
    r: int
    tau_J: int
    bounds: PFBounds
    alexander_preserved: bool
    methods_apply: bool | None
    reason: str

    def to_json(self) -> dict:
        return {"r": self.r, "tau_J": self.tau_J, "pf_bounds": self.bounds.to_json(),
                "alexander_preserved": self.alexander_preserved, "methods_apply": self.methods_apply,
                "reason": self.reason}


def satellite_window(r: int, tau_J: int, ell: int = 0) -> SatelliteWindow:
    """
    Local connected sum of R = U with J.  Winding number ell = 0 keeps the
    Alexander polynomials of the derived knots; the classifier is then
    blocked exactly when PF_-(J) <= r < PF_+(J) is certified.
    """
    bounds = pf_bounds_from_tau(tau_J)
    verdict = classify(r, bounds)
    if verdict.applicable_cases:
        return SatelliteWindow(r, tau_J, bounds, ell == 0, True, f"cases {list(verdict.applicable_cases)} apply")
    if verdict.blocking and verdict.blocking.startswith("r in the undetermined window"):
        reason = f"methods do not apply: PF_-(J) ≤ {r} < PF_+(J) since PF_+(J) ≥ {bounds.plus_lower}"
        return SatelliteWindow(r, tau_J, bounds, ell == 0, False, reason)
    return SatelliteWindow(r, tau_J, bounds, ell == 0, None, verdict.blocking or "undecided")


# ------------------------------------------------------
# PIPELINE
# ------------------------------------------------------
def _knot_report(knot: FramedLink, budget: int, errors: list[dict], tag: str) -> dict:
    doc: dict = {"name": knot.name, "pd": diagram_to_dict(knot), "crossings": len(knot.diagram.crossings)}
    try:
        alex = alexander_polynomial(knot)
        doc["alexander"] = alex.to_json()
        doc["alexander_is_one"] = alex.coefficients == {0: 1}
        doc["determinant"] = determinant(knot)
    except KBError as exc:
        errors.append({"stage": f"alexander {tag}", "error": str(exc)})
    try:
        doc["s"] = s_invariant(knot, budget=budget).s
    except BudgetExceeded as exc:
        errors.append({"stage": f"s {tag}", "error": str(exc), "projected_cost": exc.projected_cost})
    except KBError as exc:
        errors.append({"stage": f"s {tag}", "error": str(exc)})
    return doc


def _r_is_unknot(rbg: FramedLink) -> bool:
    others = [rbg.role("B"), rbg.role("G")]
    r_knot = simplify(delete_components(rbg, others))
    return not r_knot.diagram.crossings


def run_pipeline(rbg: FramedLink, assumptions: AssumptionSet | None = None, budget: int = DEFAULT_BUDGET,
                 pf: PFBounds | None = None) -> dict:
    """
    validate_rbg, derive_pair, Alexander and s of both knots, classify.
    Stage failures are collected in ``errors`` and later stages run on
    whatever survived.
    """
    assumptions = assumptions or AssumptionSet()
    errors: list[dict] = []
    report = validate_rbg(rbg, assumptions.assume_special)
    doc: dict = {"name": rbg.name, "rbg": report.to_json(), "knots": {}, "errors": errors}

    r_unknot = _r_is_unknot(rbg)
    bounds = pf or PFBounds()
    if r_unknot:
        bounds = bounds.combine(unknot_bounds())
    small_unknot = assumptions.small_unknot_R or (report.is_small and r_unknot)

    computed: dict[str, int | None] = {"K": None, "K'": None}
    if report.is_special:
        try:
            k_b, k_g = derive_pair(rbg, assumptions.assume_special)
            for tag, knot in (("K", k_b), ("K'", k_g)):
                doc["knots"][tag] = _knot_report(knot, budget, errors, tag)
                computed[tag] = doc["knots"][tag].get("s")
        except KBError as exc:
            errors.append({"stage": "derive_pair", "error": str(exc)})
    else:
        errors.append({"stage": "validate_rbg", "error": f"not special: {', '.join(report.failures)}"})

    merged = replace(
        assumptions,
        small_unknot_R=small_unknot,
        s_K=assumptions.s_K if assumptions.s_K is not None else computed["K"],
        s_Kprime=assumptions.s_Kprime if assumptions.s_Kprime is not None else computed["K'"],
    )
    verdict = classify(report.r, bounds, merged)
    doc["r_is_unknot"] = r_unknot
    doc["verdict"] = verdict.to_json()
    if verdict.expectation and verdict.expectation.violations:
        raise ConsistencyError(f"{rbg.name}: {'; '.join(verdict.expectation.violations)} "
                               f"for a small RBG-link with R = U and r = {report.r} < 0")
    return doc
