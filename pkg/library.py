"""
Knot library files, configuration and the on-disk invariant cache.

A library file is a JSON array of entries::

    {"name": "3_1", "pd": {...PD-JSON...}, "source": "...",
     "expected": {"s": {"value": 2, "provenance": "..."}}}

An entry whose ``pd`` is null is an empty transcription slot: it is listed
and reported as skipped, never as passed.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import pandas as pd

from classical import alexander_from_seifert, alexander_polynomial, determinant
from diagram import (BudgetExceeded, DiagramValidationError, FramedLink, KBError, canonical, diagram_from_dict,
                     serialize_diagram, writhe)
from khovanov import DEFAULT_BUDGET, khovanov_homology, lee_rank, s_invariant
from surgery import linking_matrix

LOGGER = logging.getLogger(__name__)

DATA_DIR = Path(__file__).resolve().parent / "data"
BUNDLED_LIBRARY = DATA_DIR / "library.json"
INVARIANTS = ("alexander", "determinant", "jones", "kh", "lee", "linking", "s", "writhe")


# ------------------------------------------------------
# CONFIGURATION
# ------------------------------------------------------
@dataclass(frozen=True)
class Config:
    budget: int = DEFAULT_BUDGET
    cache_dir: Path = Path("~/.cache/kb").expanduser()
    use_cache: bool = True
    engine: str = "scan"


def load_config(env: Mapping[str, str] | None = None) -> Config:
    env = os.environ if env is None else env
    raw = env.get("KB_BUDGET", "").strip()
    try:
        budget = int(raw) if raw else DEFAULT_BUDGET
    except ValueError as exc:
        raise KBError(f"KB_BUDGET must be an integer, got {raw!r}") from exc
    if budget < 0:
        raise KBError(f"KB_BUDGET must be non-negative, got {budget}")
    cache_dir = Path(env.get("KB_CACHE_DIR") or "~/.cache/kb").expanduser()
    return Config(budget=budget, cache_dir=cache_dir)


# ------------------------------------------------------
# CACHE
# ------------------------------------------------------
class InvariantCache:
    """Content-addressed JSON payloads keyed by canonical diagram and invariant set."""

    def __init__(self, root: Path):
        self.root = Path(root)

    @staticmethod
    def key(link: FramedLink, names: Iterable[str]) -> str:
        text = serialize_diagram(canonical(link)) + "|" + ",".join(sorted(set(names)))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.root / key[:2] / f"{key}.json"

    def get(self, key: str) -> dict | None:
        path = self._path(key)
        if not path.exists():
            return None
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            LOGGER.warning("ignoring unreadable cache entry %s: %s", path, exc)
            return None

    def put(self, key: str, payload: dict) -> None:
        path = self._path(key)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile("w", dir=path.parent, suffix=".tmp", delete=False,
                                             encoding="utf-8") as handle:
                json.dump(payload, handle, sort_keys=True)
                tmp = handle.name
            os.replace(tmp, path)
        except OSError as exc:
            LOGGER.warning("could not write cache entry %s: %s", path, exc)


# ------------------------------------------------------
# INVARIANTS
# ------------------------------------------------------
def _compute(link: FramedLink, names: set[str], budget: int, engine: str) -> dict:
    out: dict = {}
    if names & {"kh", "jones"}:
        ranks = khovanov_homology(link, engine, budget)
        if "kh" in names:
            out["kh"] = ranks.to_json()
        if "jones" in names:
            out["jones"] = ranks.euler_characteristic().to_json()
    if "alexander" in names:
        out["alexander"] = alexander_polynomial(link).to_json()
    if "determinant" in names:
        out["determinant"] = determinant(link)
    if "s" in names:
        out["s"] = s_invariant(link, engine, budget).s
    if "lee" in names:
        out["lee"] = lee_rank(link, engine, budget)
    if "writhe" in names:
        out["writhe"] = writhe(link)
    if "linking" in names:
        out["linking"] = [list(row) for row in linking_matrix(link).entries]
    return out


def compute_invariants(link: FramedLink, names: Iterable[str], config: Config | None = None) -> dict:
    """Requested invariants as a JSON-ready dict, consulting and updating the cache."""
    config = config or load_config()
    names = set(names)
    unknown = names - set(INVARIANTS)
    if unknown:
        raise KBError(f"unknown invariants {sorted(unknown)}")
    cache = InvariantCache(config.cache_dir) if config.use_cache else None
    key = InvariantCache.key(link, names)
    if cache is not None:
        hit = cache.get(key)
        if hit is not None:
            LOGGER.debug("cache hit %s for %s", key[:12], link.name)
            return hit
    payload = json.loads(json.dumps(_compute(link, names, config.budget, config.engine), sort_keys=True))
    if cache is not None:
        cache.put(key, payload)
    return payload


# ------------------------------------------------------
# LIBRARY FILES
# ------------------------------------------------------
@dataclass(frozen=True)
class ExpectedValue:
    value: object
    provenance: str


@dataclass(frozen=True)
class KnotLibraryEntry:
    name: str
    pd: Mapping | None
    expected: Mapping[str, ExpectedValue] = field(default_factory=dict)
    source: str = ""
    seifert: tuple[tuple[int, ...], ...] | None = None

    @property
    def is_slot(self) -> bool:
        return self.pd is None

    def link(self) -> FramedLink:
        if self.pd is None:
            raise KBError(f"library entry {self.name} has no transcription")
        doc = dict(self.pd)
        doc.setdefault("name", self.name)
        return diagram_from_dict(doc)

    @classmethod
    def from_dict(cls, doc: Mapping) -> "KnotLibraryEntry":
        if "name" not in doc:
            raise DiagramValidationError("library entry", "entry without a name")
        name = str(doc["name"])
        expected = {}
        for invariant, spec in (doc.get("expected") or {}).items():
            if invariant not in INVARIANTS:
                raise DiagramValidationError("library entry", f"{name}: unknown invariant {invariant!r}")
            if not isinstance(spec, Mapping) or "value" not in spec or not spec.get("provenance"):
                raise DiagramValidationError("library provenance",
                                             f"{name}: expected {invariant} needs a value and a provenance")
            expected[invariant] = ExpectedValue(spec["value"], str(spec["provenance"]))
        seifert = doc.get("seifert")
        return cls(
            name=name,
            pd=doc.get("pd"),
            expected=expected,
            source=str(doc.get("source", "")),
            seifert=tuple(tuple(int(x) for x in row) for row in seifert) if seifert is not None else None,
        )


def parse_library(text: str) -> list[KnotLibraryEntry]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramValidationError("library syntax", f"{exc.msg} at line {exc.lineno}") from exc
    if not isinstance(doc, list):
        raise DiagramValidationError("library syntax", "a library file is a JSON array of entries")
    entries = [KnotLibraryEntry.from_dict(item) for item in doc]
    seen: set[str] = set()
    for entry in entries:
        if entry.name in seen:
            raise DiagramValidationError("library names", f"duplicate entry {entry.name!r}")
        seen.add(entry.name)
    return entries


def load_library(path: str | Path = BUNDLED_LIBRARY) -> list[KnotLibraryEntry]:
    return parse_library(Path(path).read_text(encoding="utf-8"))


def _row(entry: KnotLibraryEntry, invariant: str, expected, computed, status: str, provenance: str) -> dict:
    return {
        "entry": entry.name,
        "invariant": invariant,
        "expected": json.dumps(expected, sort_keys=True) if expected is not None else "",
        "computed": json.dumps(computed, sort_keys=True) if computed is not None else "",
        "status": status,
        "provenance": provenance,
    }


def verify_library(entries: Iterable[KnotLibraryEntry], config: Config | None = None) -> pd.DataFrame:
    """Recompute every expected invariant and tabulate pass, fail, error and skipped rows."""
    config = config or load_config()
    rows = []
    for entry in entries:
        if entry.is_slot:
            rows.append(_row(entry, "-", None, None, "skipped", "no transcription supplied"))
            continue
        try:
            link = entry.link()
        except KBError as exc:
            rows.append(_row(entry, "pd", None, str(exc), "error", entry.source))
            continue
        for invariant, want in sorted(entry.expected.items()):
            try:
                got = compute_invariants(link, [invariant], config)[invariant]
            except BudgetExceeded as exc:
                rows.append(_row(entry, invariant, want.value, None, "skipped", f"budget: {exc}"))
                continue
            except KBError as exc:
                rows.append(_row(entry, invariant, want.value, str(exc), "error", want.provenance))
                continue
            status = "pass" if got == want.value else "fail"
            rows.append(_row(entry, invariant, want.value, got, status, want.provenance))
        if entry.seifert is not None:
            oracle = alexander_from_seifert(entry.seifert).to_json()
            got = compute_invariants(link, ["alexander"], config)["alexander"]
            rows.append(_row(entry, "alexander (seifert)", oracle, got, "pass" if got == oracle else "fail",
                             "Seifert-matrix oracle"))
    table = pd.DataFrame(rows, columns=["entry", "invariant", "expected", "computed", "status", "provenance"])
    failed = table[table["status"].isin(["fail", "error"])]
    LOGGER.info("library verify: %d rows, %d failing", len(table), len(failed))
    return table


def library_passed(table: pd.DataFrame) -> bool:
    return not table["status"].isin(["fail", "error"]).any()
