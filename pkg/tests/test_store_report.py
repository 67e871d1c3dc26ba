from __future__ import annotations

import json

import pytest
from conftest import FIXTURES, learn_from
from hypothesis import given
from hypothesis import strategies as st

from exmig.migrator import migrate_file
from exmig.report import ROWS, CorruptReport, classify_outcome, dump_records, load_records, render_table, row_of
from exmig.source_model import parse
from exmig.store import CorruptPatternStore, dumps_patterns, loads_patterns


def all_patterns(catalog):
    out = learn_from(FIXTURES / "getcolor" / "example", catalog)
    for root in sorted((FIXTURES / "migration_types").iterdir()):
        out += learn_from(root / "example", catalog)
    out += learn_from(FIXTURES / "removal" / "example", catalog)
    return out


def test_store_round_trip_is_stable(catalog):
    patterns = all_patterns(catalog)
    text = dumps_patterns(patterns)
    again = loads_patterns(text)
    assert dumps_patterns(again) == text
    for a, b in zip(patterns, again):
        assert a.pairings == b.pairings
        assert a.new_nodes == b.new_nodes
        assert a.before_pattern.kept == b.before_pattern.kept


def test_loaded_patterns_still_apply(catalog):
    (pattern,) = loads_patterns(dumps_patterns(learn_from(FIXTURES / "getcolor" / "example", catalog)))
    target = FIXTURES / "getcolor" / "target" / "BadgeView.java"
    _, new = migrate_file(parse(target.read_text()), [pattern], catalog, "BadgeView.java")
    assert new == (FIXTURES / "getcolor" / "expected" / "BadgeView.java").read_text()


def test_documented_keys_present(catalog):
    (entry,) = json.loads(dumps_patterns(learn_from(FIXTURES / "getcolor" / "example", catalog)))
    for key in ("api", "sourceId", "beforeSnippet", "afterSnippet", "pairings", "newNodes", "removesCall"):
        assert key in entry


@pytest.mark.parametrize("text", ["{", "{}", '[{"api": 1}]', "[1]"])
def test_corrupt_store(text):
    with pytest.raises(CorruptPatternStore):
        loads_patterns(text)


def rec(outcome, source="Mined", unresolved=(), tokens=0):
    return {"outcome": outcome, "source": source, "unresolvedNames": list(unresolved), "tokensChanged": tokens}


def test_row_mapping():
    assert ROWS[row_of(rec("Applied"))] == "Faultless migration"
    assert ROWS[row_of(rec("Applied", unresolved=["ctx"]))] == "Migrated with minor mod."
    assert ROWS[row_of(rec("Guidance"))] == "Unmatched guidance"
    assert ROWS[row_of(rec("NonMigration"))] == "Ex. was not a migration"
    assert ROWS[row_of(rec("Unsupported"))] == "Unsupported cases"
    with pytest.raises(CorruptReport):
        row_of(rec("Exploded"))


def test_table_columns_and_token_stats():
    records = [rec("Applied", tokens=2), rec("Applied", "UserProvided", tokens=5), rec("Unsupported")]
    summary = classify_outcome(records)
    assert summary.sources == ["Mined", "UserProvided"]
    assert summary.totals() == (2, 0, 0, 0, 0, 1)
    table = render_table(summary)
    assert table.splitlines()[0].split() == ["Mined", "UserProvided", "Total"]
    assert "tokens changed: min 2  avg 3.50  max 5" in table
    assert "tokens changed: n/a" in render_table(classify_outcome([rec("Guidance")]))


outcomes = st.sampled_from(["Applied", "Guidance", "Unsupported", "NonMigration"])


@given(st.lists(st.tuples(outcomes, st.sampled_from(["Mined", "UserProvided"]), st.booleans()), max_size=30))
def test_every_record_lands_in_one_row(items):
    records = [rec(o, s, ["x"] if u else []) for o, s, u in items]
    summary = classify_outcome(records)
    assert sum(summary.totals()) == len(records)
    assert summary.totals()[3] == 0


def test_records_round_trip(tmp_path):
    records = [rec("Applied", tokens=3), rec("Guidance")]
    path = tmp_path / "r.jsonl"
    path.write_text(dump_records(records))
    assert load_records(path) == records


@pytest.mark.parametrize("text", ["not json\n", '{"no": "outcome"}\n', '{"outcome": "Weird"}\n'])
def test_corrupt_report(tmp_path, text):
    path = tmp_path / "r.jsonl"
    path.write_text(text)
    with pytest.raises(CorruptReport):
        load_records(path)
