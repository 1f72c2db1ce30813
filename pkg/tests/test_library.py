import json
import logging

import pytest

from conftest import CORPUS, DATA, knot
from diagram import DiagramValidationError, KBError, diagram_from_dict
from library import (BUNDLED_LIBRARY, Config, InvariantCache, compute_invariants, library_passed, load_config,
                     load_library, parse_library, verify_library)


@pytest.fixture
def config(isolated_cache):
    return Config(cache_dir=isolated_cache)


def test_load_config_reads_environment(tmp_path):
    config = load_config({"KB_BUDGET": "12", "KB_CACHE_DIR": str(tmp_path)})
    assert config.budget == 12
    assert config.cache_dir == tmp_path
    assert load_config({}).budget == 24
    with pytest.raises(KBError):
        load_config({"KB_BUDGET": "many"})
    with pytest.raises(KBError):
        load_config({"KB_BUDGET": "-1"})


def test_compute_invariants(config, trefoil):
    payload = compute_invariants(trefoil, ["alexander", "determinant", "s", "writhe", "linking"], config)
    assert payload == {
        "alexander": {"-1": 1, "0": -1, "1": 1},
        "determinant": 3,
        "linking": [[0]],
        "s": 2,
        "writhe": 3,
    }
    with pytest.raises(KBError):
        compute_invariants(trefoil, ["signature"], config)


def test_cache_hit_is_identical_to_miss(config, trefoil):
    first = compute_invariants(trefoil, ["kh", "jones"], config)
    files = list(config.cache_dir.rglob("*.json"))
    assert len(files) == 1
    second = compute_invariants(trefoil, ["jones", "kh"], config)
    assert json.dumps(first, sort_keys=True) == json.dumps(second, sort_keys=True)
    assert first["jones"] == {"1": 1, "3": 1, "5": 1, "9": -1}


def test_cache_key_ignores_edge_labels(trefoil):
    shifted = [[label + 10 for label in crossing] for crossing in CORPUS["3_1_right"]["pd"]["crossings"]]
    relabelled = diagram_from_dict({"name": "3_1_right", "crossings": shifted})
    assert relabelled.diagram.crossings != trefoil.diagram.crossings
    assert InvariantCache.key(trefoil, ["s"]) == InvariantCache.key(relabelled, ["s"])
    assert InvariantCache.key(trefoil, ["s"]) != InvariantCache.key(trefoil, ["s", "kh"])
    assert InvariantCache.key(trefoil, ["s"]) != InvariantCache.key(knot("3_1_left"), ["s"])


def test_corrupt_cache_entry_is_a_miss(config, trefoil, caplog):
    cache = InvariantCache(config.cache_dir)
    key = InvariantCache.key(trefoil, ["s"])
    cache.put(key, {"s": 99})
    assert compute_invariants(trefoil, ["s"], config) == {"s": 99}
    path = next(config.cache_dir.rglob(f"{key}.json"))
    path.write_text("{not json")
    with caplog.at_level(logging.WARNING, logger="library"):
        assert compute_invariants(trefoil, ["s"], config) == {"s": 2}
    assert "unreadable cache entry" in caplog.text
    assert json.loads(path.read_text()) == {"s": 2}


def test_disabled_cache_writes_nothing(isolated_cache, trefoil):
    compute_invariants(trefoil, ["writhe"], Config(cache_dir=isolated_cache, use_cache=False))
    assert not isolated_cache.exists()


def test_bundled_library_has_provenance():
    entries = load_library()
    assert [e.name for e in entries] == ["unknot", "3_1_right", "3_1_left", "4_1", "5_1"]
    assert all(value.provenance for e in entries for value in e.expected.values())


def test_bundled_library_verifies(config):
    table = verify_library(load_library(BUNDLED_LIBRARY), config)
    assert list(table.columns) == ["entry", "invariant", "expected", "computed", "status", "provenance"]
    assert set(table["status"]) == {"pass"}
    assert library_passed(table)
    assert len(table[table["invariant"] == "alexander (seifert)"]) == 4


def test_wrong_expectation_fails(config):
    doc = json.loads(BUNDLED_LIBRARY.read_text())
    broken = next(e for e in doc if e["name"] == "3_1_right")
    broken["expected"] = {"s": {"value": -2, "provenance": "deliberately wrong"}}
    table = verify_library(parse_library(json.dumps([broken])), config)
    row = table.iloc[0]
    assert (row["entry"], row["invariant"], row["status"]) == ("3_1_right", "s", "fail")
    assert not library_passed(table)


def test_transcription_slots_are_skipped_not_passed(config):
    entries = load_library(DATA / "candidate_knots.json")
    assert len(entries) == 28
    assert all(e.is_slot for e in entries)
    table = verify_library(entries, config)
    assert set(table["status"]) == {"skipped"}
    assert library_passed(table)


def test_budget_overrun_is_skipped(isolated_cache):
    doc = json.loads(BUNDLED_LIBRARY.read_text())
    table = verify_library(parse_library(json.dumps(doc[1:2])), Config(budget=2, cache_dir=isolated_cache))
    by_invariant = dict(zip(table["invariant"], table["status"]))
    assert by_invariant["s"] == "skipped"
    assert by_invariant["alexander"] == "pass"


@pytest.mark.parametrize("text", [
    '{"name": "x"}',
    '[{"pd": null}]',
    '[{"name": "a", "pd": null}, {"name": "a", "pd": null}]',
    '[{"name": "a", "pd": null, "expected": {"s": {"value": 0}}}]',
    '[{"name": "a", "pd": null, "expected": {"signature": {"value": 0, "provenance": "x"}}}]',
    "[",
])
def test_malformed_libraries(text):
    with pytest.raises(DiagramValidationError):
        parse_library(text)
