from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exmig.dataflow import UnknownNode, backward_slice, build_dfg, slice_for_call
from exmig.source_model import parse
from exmig.source_model.nodes import METHOD_DECL

METHOD = """class A {
    void draw(Canvas canvas, Resources res) {
        int id = R.color.x;
        Paint p = new Paint();
        p.setColor(res.getColor(id));
        int unused = 3;
        if (p != null) {
            canvas.drawPaint(p);
        }
    }
}
"""


def method_of(source: str):
    result = parse(source)
    return next(n for n in result.ast.walk() if n.kind == METHOD_DECL), result


def test_nodes_and_edges():
    method, result = method_of(METHOD)
    dfg = build_dfg(method, result)
    texts = [n.normalized for n in dfg.nodes]
    assert texts[0] == "int id = R . color . x ;"
    assert dfg.nodes[0].defines == {"id"}
    edges = {(a, b, v) for a, b, v in dfg.edges}
    assert (0, 2, "id") in edges
    assert (1, 2, "p") in edges
    assert (1, 4, "p") in edges
    # the if header is its own node, the call inside its body another
    assert dfg.nodes[4].kind == "IfStmt"
    assert dfg.nodes[4].text == "if (p != null)"


def test_backward_slice_keeps_only_suppliers():
    method, result = method_of(METHOD)
    call = next(c for c in result.invocations if c.name == "getColor")
    sliced = slice_for_call(result, call)
    assert sliced.focal == 2
    assert sliced.kept == {0, 1, 2}
    assert sliced.focal_node.is_focal


def test_unknown_node():
    method, result = method_of(METHOD)
    with pytest.raises(UnknownNode):
        backward_slice(build_dfg(method, result), 99)


def test_export_lists_nodes_and_edges():
    method, result = method_of(METHOD)
    out = build_dfg(method, result).with_focal(2).export()
    assert "*2: ExprStmt" in out
    assert "0 -> 2 [id]" in out


VARS = ["a", "b", "c", "d"]


@st.composite
def straight_line(draw):
    """Random assignments ``x = f(y, z);`` with known def/use sets."""
    n = draw(st.integers(1, 8))
    stmts = []
    for _ in range(n):
        target = draw(st.sampled_from(VARS))
        uses = draw(st.lists(st.sampled_from(VARS), max_size=3))
        stmts.append((target, uses))
    return stmts


@settings(max_examples=150, deadline=None)
@given(straight_line())
def test_edges_match_reaching_rule(stmts):
    body = "\n".join(f"        {t} = f({', '.join(u)});" for t, u in stmts)
    method, result = method_of(f"class A {{\n    void m() {{\n{body}\n    }}\n}}\n")
    dfg = build_dfg(method, result)
    want = {(i, j, t) for i, (t, _) in enumerate(stmts) for j, (_, uses) in enumerate(stmts) if i < j and t in uses}
    assert set(dfg.edges) == want
    # slice of the last node is plain reachability over those edges
    reach, frontier = {len(stmts) - 1}, [len(stmts) - 1]
    while frontier:
        j = frontier.pop()
        for i, k, _ in want:
            if k == j and i not in reach:
                reach.add(i)
                frontier.append(i)
    assert backward_slice(dfg, len(stmts) - 1).kept == reach
