import json
from pathlib import Path

import pytest

from diagram import diagram_from_dict, reidemeister_move

DATA = Path(__file__).resolve().parent.parent / "data"
LIBRARY = json.loads((DATA / "library.json").read_text(encoding="utf-8"))
CORPUS = {entry["name"]: entry for entry in LIBRARY}
KNOTS = sorted(CORPUS)
NONTRIVIAL = [name for name in KNOTS if name != "unknot"]


def knot(name: str):
    doc = dict(CORPUS[name]["pd"], name=name)
    return diagram_from_dict(doc)


def expected(name: str, invariant: str):
    return CORPUS[name]["expected"][invariant]["value"]


HOPF = {"name": "hopf", "crossings": [[1, 4, 2, 3], [4, 1, 3, 2]]}


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("KB_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.delenv("KB_BUDGET", raising=False)
    return tmp_path / "cache"


@pytest.fixture
def trefoil():
    return knot("3_1_right")


@pytest.fixture
def hopf():
    return diagram_from_dict(HOPF)


def random_moves(link, rng, steps):
    """Apply ``steps`` random R1+/R2+ moves."""
    for _ in range(steps):
        d = link.diagram
        pairs = [(e1, e2) for sides in d.faces for (e1, _), (e2, _) in zip(sides, sides[1:]) if e1 != e2]
        if not d.occurrences:
            link = reidemeister_move(link, "R1+", "U0", rng.choice((1, -1)))
        elif not pairs or rng.random() < 0.5:
            link = reidemeister_move(link, "R1+", rng.choice(sorted(d.occurrences)), rng.choice((1, -1)))
        else:
            link = reidemeister_move(link, "R2+", rng.choice(pairs))
    return link
