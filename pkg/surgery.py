"""
Linking-matrix homology of surgery descriptions and RBG-link validation.

H_1 of integral surgery on a framed link is presented by its linking
matrix; Smith normal form reads off the group.  ``validate_rbg`` checks
the special and small conditions on a three-component (R, B, G) link
using syntactic standard-position tests.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
import sympy
from sympy import ZZ
from sympy.matrices.normalforms import smith_normal_form as _sympy_snf

from diagram import FramedLink, RoleError, crossings_between, linking_number

LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinkingMatrix:
    entries: tuple[tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.entries)

    def to_sympy(self) -> sympy.Matrix:
        return sympy.Matrix(self.size, self.size, [x for row in self.entries for x in row])

    def to_numpy(self) -> np.ndarray:
        return np.array(self.entries, dtype=object).reshape(self.size, self.size)

    def det(self) -> int:
        if not self.size:
            return 1
        return int(self.to_sympy().det(method="bareiss"))

    def after_slide(self, moving: int, over: int, sign: int = 1) -> "LinkingMatrix":
        """E L E^T with E = I + sign e_moving e_over^T: the matrix once ``moving`` slides over ``over``."""
        change = np.eye(self.size, dtype=np.int64)
        change[moving, over] += sign
        return LinkingMatrix.from_rows(change @ self.to_numpy().astype(np.int64) @ change.T)

    def is_symmetric(self) -> bool:
        return all(self.entries[i][j] == self.entries[j][i] for i in range(self.size) for j in range(self.size))

    @classmethod
    def from_rows(cls, rows) -> "LinkingMatrix":
        return cls(tuple(tuple(int(x) for x in row) for row in rows))


@dataclass(frozen=True)
class AbelianInvariants:
    """Divisibility-ordered invariant factors; zeros (free summands) come last."""

    factors: tuple[int, ...]

    @property
    def rank(self) -> int:
        return sum(1 for d in self.factors if d == 0)

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.factors if d > 1)

    def is_infinite_cyclic(self) -> bool:
        return self.rank == 1 and not self.torsion

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion] + ["Z"] * self.rank
        return " + ".join(parts) or "0"


def linking_matrix(link: FramedLink) -> LinkingMatrix:
    n = link.component_count
    rows = [[0] * n for _ in range(n)]
    for i in range(n):
        rows[i][i] = link.framings[i]
        for j in range(i + 1, n):
            rows[i][j] = rows[j][i] = linking_number(link, i, j)
    return LinkingMatrix.from_rows(rows)


def smith_normal_form(m: LinkingMatrix | list | np.ndarray) -> AbelianInvariants:
    if not isinstance(m, LinkingMatrix):
        m = LinkingMatrix.from_rows(m)
    if not m.size:
        return AbelianInvariants(())
    diagonal = _sympy_snf(m.to_sympy(), domain=ZZ)
    values = [abs(int(diagonal[i, i])) for i in range(m.size)]
    nonzero = sorted(v for v in values if v)
    return AbelianInvariants(tuple(nonzero) + (0,) * (len(values) - len(nonzero)))


def surgery_h1(link: FramedLink) -> AbelianInvariants:
    return smith_normal_form(linking_matrix(link))


# ------------------------------------------------------
# RBG VALIDATION
# ------------------------------------------------------
@dataclass(frozen=True)
class MeridianCheck:
    component: str
    crossings_with_R: int
    lk_with_R: int
    self_crossings: int
    piercing_strands: int

    @property
    def standard(self) -> bool:
        return self.crossings_with_R == 2 and abs(self.lk_with_R) == 1 and self.self_crossings == 0

    def to_json(self) -> dict:
        return {
            "standard_position": self.standard,
            "crossings_with_R": self.crossings_with_R,
            "lk_with_R": self.lk_with_R,
            "self_crossings": self.self_crossings,
            "piercing_strands": self.piercing_strands,
        }


@dataclass(frozen=True)
class RBGReport:
    is_special: bool
    is_small: bool
    failures: tuple[str, ...]
    ell: int
    r: int
    meridian_checks: dict[str, MeridianCheck] = field(default_factory=dict)
    assumed_special: bool = False
    h1: str = ""

    def to_json(self) -> dict:
        return {
            "is_special": self.is_special,
            "is_small": self.is_small,
            "ell": self.ell,
            "r": self.r,
            "h1": self.h1,
            "failures": list(self.failures),
            "assumed_special": self.assumed_special,
            "meridian_checks": {k: v.to_json() for k, v in sorted(self.meridian_checks.items())},
        }


def piercing_edges(link: FramedLink, disk: int, strand: int) -> list[int]:
    """
    Edges of ``strand`` running between two crossings with ``disk`` that it
    passes under at one end and over at the other: each such edge is a
    strand through the meridian disk bounded by ``disk``.
    """
    d = link.diagram
    found = []
    if strand >= len(d.traced_components):
        return found
    for edge in d.traced_components[strand]:
        ends = [d.tail(edge), d.head(edge)]
        if any(set(d.strands(ci)) != {disk, strand} for ci, _ in ends):
            continue
        passages = {pos % 2 for _, pos in ends}
        if len(passages) == 2:
            found.append(edge)
    return found


def _meridian_check(link: FramedLink, tag: str) -> MeridianCheck:
    d = link.diagram
    rc, mc = link.role("R"), link.role(tag)
    self_crossings = sum(1 for ci in range(len(d.crossings)) if d.strands(ci) == (mc, mc))
    piercing = sum(
        len(piercing_edges(link, mc, other)) for other in range(link.component_count) if other not in (rc, mc)
    )
    return MeridianCheck(tag, len(crossings_between(d, rc, mc)), linking_number(link, rc, mc),
                         self_crossings, piercing)


def validate_rbg(link: FramedLink, assume_special: bool = False) -> RBGReport:
    """
    Check the special and small conditions of an R/B/G-tagged link.

    Standard position is syntactic: B and G each cross R exactly twice with
    linking number +-1 and have no self-crossings.  Smallness counts the
    strands of the other components through each meridian disk.
    ``assume_special`` waives the standard-position requirement for links
    known to be special by construction.
    """
    if not link.roles:
        raise RoleError("validate_rbg needs R, B and G role tags")
    rc, bc, gc = link.role("R"), link.role("B"), link.role("G")
    failures = []
    if link.framings[bc] != 0:
        failures.append("b≠0")
    if link.framings[gc] != 0:
        failures.append("g≠0")
    h1 = surgery_h1(link)
    if not h1.is_infinite_cyclic():
        failures.append("H1≠Z")
    checks = {tag: _meridian_check(link, tag) for tag in ("B", "G")}
    for tag, check in checks.items():
        if not check.standard and not assume_special:
            failures.append(f"{tag} not in standard position")
    small = all(check.piercing_strands <= 2 for check in checks.values())
    if not small:
        failures.append("not small")
    special = not [f for f in failures if f != "not small"]
    report = RBGReport(
        is_special=special,
        is_small=small and special,
        failures=tuple(failures),
        ell=linking_number(link, bc, gc),
        r=link.framings[rc],
        meridian_checks=checks,
        assumed_special=assume_special,
        h1=str(h1),
    )
    LOGGER.info("rbg %s: special=%s small=%s ell=%d r=%d", link.name, report.is_special, report.is_small,
                report.ell, report.r)
    return report
