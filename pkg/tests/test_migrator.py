from __future__ import annotations

import dataclasses

import pytest
from conftest import FIXTURES, learn_from
from hypothesis import given
from hypothesis import strategies as st

from exmig.diffs import count_token_changes
from exmig.migrator import (
    OutcomeKind,
    Reason,
    enumerate_embeddings,
    find_candidates,
    migrate_file,
    replay_on_example,
    substitute,
)
from exmig.report import row_of
from exmig.source_model import parse, visible_variables
from exmig.source_model.nodes import METHOD_DECL


@pytest.fixture(scope="module")
def getcolor(catalog):
    return learn_from(FIXTURES / "getcolor" / "example", catalog)


def run(patterns, catalog, text, choose=None):
    return migrate_file(parse(text, path="T.java"), patterns, catalog, "T.java", choose)


TARGET = """import android.content.res.Resources;

class T {
    int tint(Resources r) {
        int c = r.getColor(R.color.tint);
        return c;
    }
}
"""


def test_target_names_are_kept(getcolor, catalog):
    (outcome,), text = run(getcolor, catalog, TARGET)
    assert outcome.kind is OutcomeKind.APPLIED
    assert "r.getColor(R.color.tint, null)" in text
    assert outcome.tokens_changed == 2
    assert outcome.edits.startswith("--- a/T.java\n+++ b/T.java\n")


def test_record_fields(getcolor, catalog):
    (outcome,), _ = run(getcolor, catalog, TARGET)
    record = outcome.to_record()
    assert set(record) >= {
        "file", "offset", "api", "patternId", "source", "outcome", "reason", "tokensChanged", "unresolvedNames",
    }
    assert record["outcome"] == "Applied" and record["reason"] == "Matched"
    assert record["source"] == "UserProvided"
    assert record["offset"] == TARGET.index("r.getColor")


def test_two_calls_in_one_file(getcolor, catalog):
    text = TARGET.replace("return c;", "return c + r.getColor(R.color.edge);")
    outcomes, new = run(getcolor, catalog, text)
    assert [o.kind for o in outcomes] == [OutcomeKind.APPLIED, OutcomeKind.APPLIED]
    assert new.count(", null)") == 2


def test_nested_unknown_call_gives_guidance(getcolor, catalog):
    text = TARGET.replace("R.color.tint", "pick()")
    (outcome,), new = run(getcolor, catalog, text)
    assert (outcome.kind, outcome.reason) == (OutcomeKind.GUIDANCE, Reason.UNMATCHED_DATAFLOW)
    assert outcome.suggested_examples == (getcolor[0].pattern_id,)
    assert new == text


def test_interactive_skip_keeps_text(getcolor, catalog):
    (outcome,), new = run(getcolor, catalog, TARGET, choose=lambda attempts: None)
    assert outcome.kind is OutcomeKind.GUIDANCE
    assert new == TARGET


def test_try_block_contained_edit_applies(catalog):
    patterns = learn_from(FIXTURES / "unsupported" / "try_example", catalog)
    target = FIXTURES / "unsupported" / "try_same_block" / "Loader.java"
    outcomes, new = migrate_file(parse(target.read_text()), patterns, catalog, "Loader.java")
    assert [o.kind for o in outcomes] == [OutcomeKind.APPLIED]
    assert new == (FIXTURES / "unsupported" / "try_same_block_expected" / "Loader.java").read_text()


def test_unresolved_names_are_reported(catalog):
    patterns = learn_from(FIXTURES / "migration_types" / "expose_implementation" / "example", catalog)
    # no Context anywhere in scope, so the example's `context` stays as written
    (outcome,), new = run(patterns, catalog, TARGET)
    assert outcome.kind is OutcomeKind.APPLIED
    assert list(outcome.unresolved_names) == ["context"]
    assert "Resources.Theme theme = context.getTheme();" in new
    assert row_of(outcome.to_record()) == 1


def test_candidates_pin_focal(getcolor, catalog):
    (cand,) = find_candidates(parse(TARGET), getcolor[0], catalog)
    assert cand.embedding[getcolor[0].before_pattern.focal] == cand.target_slice.focal


def test_substitute_leaves_members_alone():
    assert substitute("res.getColor(res)", {"res": "r", "getColor": "x"}) == "r.getColor(r)"


def test_embeddings_are_injective_and_preserve_edges():
    # pattern 0 -> 2, 1 -> 2 ; target is a fan-in of three
    got = enumerate_embeddings([0, 1, 2], [(0, 2), (1, 2)], 2, [0, 1, 2, 3], [(0, 3), (1, 3), (2, 3)], 3, lambda p, t: True)
    assert len(got) == 6
    assert all(len(set(m.values())) == 3 for m in got)


@given(st.integers(0, 4))
def test_no_embedding_when_pattern_is_larger(extra):
    nodes = list(range(extra + 2))
    edges = [(i, extra + 1) for i in range(extra + 1)]
    got = enumerate_embeddings(nodes, edges, extra + 1, [0, 1], [(0, 1)], 1, lambda p, t: True)
    assert (got != []) == (extra == 0)


COLLIDING = """import android.content.Context;
import android.content.res.Resources;
class T {
    int tint(Context ctx, Resources r, String theme) {
        int c = r.getColor(R.color.tint);
        return c;
    }
}
"""


def test_new_name_is_fresh_on_collision(catalog):
    patterns = learn_from(FIXTURES / "migration_types" / "expose_implementation" / "example", catalog)
    (outcome,), new = run(patterns, catalog, COLLIDING)
    assert outcome.kind is OutcomeKind.APPLIED
    assert "Resources.Theme theme_m1 = ctx.getTheme();" in new
    assert "r.getColor(R.color.tint, theme_m1)" in new
    # scope oracle: the suffixed name was not visible before the rewrite
    original = parse(COLLIDING)
    site = next(c for c in original.invocations if c.name == "getColor")
    assert "theme_m1" not in {name for name, _, _ in visible_variables(original, site)}
    assert "theme" in {name for name, _, _ in visible_variables(original, site)}


def is_monomorphism(candidate) -> bool:
    pattern = candidate.pattern.before_pattern
    target = candidate.target_slice
    emb = candidate.embedding
    if set(emb) != set(pattern.kept) or len(set(emb.values())) != len(emb):
        return False
    if emb[pattern.focal] != target.focal or not set(emb.values()) <= set(target.kept):
        return False
    t_edges = target.edges_within()
    return all((emb[a], emb[b]) in t_edges for a, b in pattern.edges_within())


def test_applied_embeddings_verify(catalog):
    checked = 0
    for root in sorted((FIXTURES / "migration_types").iterdir()):
        patterns = learn_from(root / "example", catalog)
        for target in (root / "target").glob("*.java"):
            for pattern in patterns:
                for cand in find_candidates(parse(target.read_text()), pattern, catalog):
                    assert is_monomorphism(cand)
                    checked += 1
    assert checked >= 8


def test_self_application_token_count(catalog):
    for root in sorted((FIXTURES / "migration_types").iterdir()):
        for pattern in learn_from(root / "example", catalog):
            outcome = replay_on_example(pattern, catalog)
            before = pattern.before.enclosing(pattern.before_call, METHOD_DECL)
            after = pattern.after.enclosing(pattern.after_call, METHOD_DECL)
            own = count_token_changes(pattern.before.text(before), pattern.after.text(after))
            assert outcome.tokens_changed == own


def test_degenerate_pattern_changes_nothing(getcolor, catalog):
    pattern = dataclasses.replace(
        getcolor[0], pairings=tuple(dataclasses.replace(p, edits=()) for p in getcolor[0].pairings)
    )
    (outcome,), new = run([pattern], catalog, TARGET)
    assert outcome.kind is OutcomeKind.APPLIED
    assert outcome.tokens_changed == 0
    assert new == TARGET
