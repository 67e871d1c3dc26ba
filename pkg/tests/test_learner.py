from __future__ import annotations

from collections import Counter

import pytest
from conftest import FIXTURES, learn_from
from hypothesis import given
from hypothesis import strategies as st

from exmig.dataflow import slice_for_call
from exmig.learner import (
    EmptyPattern,
    LearnerConfig,
    TokenEdit,
    learn_all,
    learn_mapping,
    node_similarity,
    prune_identical,
)
from exmig.miner import MigrationExample, Provenance, discover_sources, load_example_source, mine_examples
from exmig.source_model import parse


def slice_nodes(source: str, name: str):
    result = parse(source)
    call = next(c for c in result.invocations if c.name == name)
    return result, call, slice_for_call(result, call)


PAIR = """class A {
    void f(Res res) {
        int x = 1;
        String y = "a";
        res.use(x, y);
    }
}
"""


def test_similarity_boundary_is_exactly_half():
    _, _, sliced = slice_nodes(PAIR, "use")
    a, b = sliced.base.nodes[0], sliced.base.nodes[1]
    # same kind 0.4, no shared identifiers, different types, same side 0.1
    assert node_similarity(a, b, -2, -1) == 0.5
    assert node_similarity(a, b, -2, -1) >= LearnerConfig().threshold
    # crossing sides of the focal drops it below the threshold
    assert node_similarity(a, b, -2, 1) == 0.4


def test_similarity_of_identical_nodes_is_one():
    _, _, sliced = slice_nodes(PAIR, "use")
    n = sliced.base.nodes[0]
    assert node_similarity(n, n, -1, -1) == 1.0


@given(
    st.lists(st.sampled_from("abcd"), max_size=6),
    st.lists(st.sampled_from("abcd"), max_size=6),
    st.integers(-3, 3),
    st.integers(-3, 3),
)
def test_similarity_arithmetic(ids_a, ids_b, pa, pb):
    src = "class A {\n    void f() {\n        g(%s);\n        h(%s);\n    }\n}\n" % (", ".join(ids_a), ", ".join(ids_b))
    result = parse(src)
    sliced = slice_for_call(result, next(c for c in result.invocations if c.name == "h"))
    a, b = sliced.base.nodes
    ca, cb = Counter(["g", *ids_a]), Counter(["h", *ids_b])
    jaccard = sum((ca & cb).values()) / sum((ca | cb).values())
    same_side = (pa > 0) - (pa < 0) == (pb > 0) - (pb < 0)
    want = 0.4 + 0.3 * jaccard + 0.2 + 0.1 * same_side
    assert node_similarity(a, b, pa, pb) == pytest.approx(want)


def all_examples(catalog):
    examples = []
    for root in sorted((FIXTURES / "migration_types").iterdir()):
        examples += mine_examples(load_example_source(root / "example"), catalog)
    for source in discover_sources(FIXTURES / "corpus"):
        examples += mine_examples(source, catalog)
    return [e for e in examples if e.after_slice is not None]


def brute_prune(sliced, other):
    """Drop a node iff it is not focal, its text occurs on the other side,
    and so does the text of every node it shares a data edge with."""
    other_texts = {" ".join(n.text.split()) for n in other.kept_nodes()}

    def same(i):
        return " ".join(sliced.base.nodes[i].text.split()) in other_texts

    keep = set()
    for i in sliced.kept:
        touching = {a for a, b, _ in sliced.base.edges if b == i} | {b for a, b, _ in sliced.base.edges if a == i}
        touching &= set(sliced.kept)
        if i == sliced.focal or not same(i) or not all(same(j) for j in touching):
            keep.add(i)
    return keep


def test_prune_matches_brute_force(catalog):
    examples = all_examples(catalog)
    assert len(examples) >= 10
    for e in examples:
        b_keep, a_keep = prune_identical(e)
        assert b_keep == brute_prune(e.before_slice, e.after_slice)
        assert a_keep == brute_prune(e.after_slice, e.before_slice)
        assert e.before_slice.focal in b_keep and e.after_slice.focal in a_keep


def test_getcolor_pattern(catalog):
    (m,) = learn_from(FIXTURES / "getcolor" / "example", catalog)
    focal = m.focal_pairing
    assert focal.edits == (TokenEdit("insert-token", focal.edits[0].at, 0, ", null"),)
    assert not m.new_nodes and not m.removes_call
    assert m.provenance == "UserProvided"


def test_new_node_is_recorded(catalog):
    (m,) = learn_from(FIXTURES / "migration_types" / "expose_implementation" / "example", catalog)
    assert len(m.new_nodes) == 1
    assert "getTheme()" in m.new_nodes[0].text
    assert m.new_nodes[0].defines[0][0] == "theme"


def test_removal_pattern(catalog):
    (m,) = learn_from(FIXTURES / "removal" / "example", catalog)
    assert m.removes_call and m.after_pattern is None
    assert m.before_pattern.kept == {m.before_pattern.focal}


def test_no_change_is_empty(catalog):
    text = (FIXTURES / "getcolor" / "example" / "before" / "ColorUtil.java").read_text()
    before, call, sliced = slice_nodes(text, "getColor")
    after, a_call, a_sliced = slice_nodes(text, "getColor")
    api = catalog.by_name("getColor")[0]
    example = MigrationExample(api, "s", "C.java", 0, before, call, after, a_call, sliced, a_sliced, Provenance.MINED)
    with pytest.raises(EmptyPattern):
        learn_mapping(example)
    assert learn_all([example]) == ([], [example.id])


def test_token_edit_json_round_trip():
    e = TokenEdit("replace-argument", 4, 3, "x, y")
    assert TokenEdit.from_json(e.to_json()) == e
