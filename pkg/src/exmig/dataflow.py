"""Statement-level data-flow graphs and backward slices.

One node per statement of a method body, nested blocks flattened in
textual order. A compound statement (if/for/while/try) contributes a node
for its header only. An edge ``(a, b, v)`` exists whenever ``a`` defines
``v``, ``b`` uses ``v`` and ``a`` precedes ``b``: every earlier definition
is assumed to reach, regardless of branches.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .source_model.lexer import IDENTIFIER
from .source_model.nodes import (
    ARRAY_ACCESS,
    BINARY_EXPR,
    BLOCK,
    COMPOUND_KINDS,
    FIELD_ACCESS,
    LOCAL_VAR_DECL,
    METHOD_DECL,
    METHOD_INVOCATION,
    NAME,
    OPAQUE_EXPR,
    STATEMENT_KINDS,
    UNARY_EXPR,
    AstNode,
    ParseResult,
    header_parts,
)
from .source_model.parser import ASSIGN_OPS
from .source_model.types import dotted_name, qualify
from .source_model.lexer import tokenize


class UnknownNode(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class DfgNode:
    id: int
    stmt: AstNode
    span: tuple[int, int]
    text: str
    defines: frozenset[str]
    uses: frozenset[str]
    calls: tuple[str, ...]
    declared_type: str | None
    is_focal: bool = False

    @property
    def kind(self) -> str:
        return self.stmt.kind

    @property
    def label(self) -> tuple[str, str | None, str | None]:
        return (self.stmt.kind, self.calls[0] if self.calls else None, self.declared_type)

    @property
    def normalized(self) -> str:
        return " ".join(t.text for t in tokenize(self.text) if not t.is_trivia)

    @property
    def identifiers(self) -> list[str]:
        return [t.text for t in tokenize(self.text) if t.kind == IDENTIFIER]


@dataclass(frozen=True)
class DataFlowGraph:
    nodes: tuple[DfgNode, ...]
    edges: frozenset[tuple[int, int, str]]
    method: AstNode | None = None

    def node(self, node_id: int) -> DfgNode:
        if not 0 <= node_id < len(self.nodes):
            raise UnknownNode(node_id)
        return self.nodes[node_id]

    def predecessors(self, node_id: int) -> set[int]:
        return {a for a, b, _ in self.edges if b == node_id}

    def successors(self, node_id: int) -> set[int]:
        return {b for a, b, _ in self.edges if a == node_id}

    def node_for(self, expr: AstNode) -> DfgNode | None:
        """The statement node whose own region contains ``expr``."""
        best = None
        for node in self.nodes:
            if node.span[0] <= expr.start and expr.end <= node.span[1]:
                if _owns(node, expr):
                    if best is None or node.span[1] - node.span[0] <= best.span[1] - best.span[0]:
                        best = node
        return best

    def with_focal(self, focal: int) -> "DataFlowGraph":
        nodes = tuple(
            DfgNode(**{**n.__dict__, "is_focal": n.id == focal}) for n in self.nodes
        )
        return DataFlowGraph(nodes, self.edges, self.method)

    def export(self) -> str:
        """Debug text: node table, then ``defId -> useId [var]`` lines."""
        lines = []
        for n in self.nodes:
            mark = "*" if n.is_focal else " "
            lines.append(f"{mark}{n.id}: {n.kind} {n.normalized}")
        for a, b, v in sorted(self.edges):
            lines.append(f"{a} -> {b} [{v}]")
        return "\n".join(lines) + "\n"


def _owns(node: DfgNode, expr: AstNode) -> bool:
    stmt = node.stmt
    if stmt.kind not in COMPOUND_KINDS:
        return True
    return any(part.start <= expr.start and expr.end <= part.end for part in header_parts(stmt))


@dataclass(frozen=True)
class SlicedGraph:
    base: DataFlowGraph
    kept: frozenset[int]
    focal: int

    @property
    def focal_node(self) -> DfgNode:
        return self.base.nodes[self.focal]

    def kept_nodes(self) -> list[DfgNode]:
        return [n for n in self.base.nodes if n.id in self.kept]

    def edges_within(self, ids: Iterable[int] | None = None) -> set[tuple[int, int]]:
        keep = self.kept if ids is None else set(ids)
        return {(a, b) for a, b, _ in self.base.edges if a in keep and b in keep}


# -- def/use extraction -----------------------------------------------------


def _variable(expr: AstNode) -> str | None:
    if expr.kind == NAME:
        return expr.name
    if expr.kind == FIELD_ACCESS:
        return dotted_name(expr)
    return None


def _collect(expr: AstNode, source: str, defines: set[str], uses: set[str], calls: list[str]) -> None:
    kind = expr.kind
    if kind == NAME:
        if expr.role != "type" and expr.name:
            uses.add(expr.name)
        return
    if kind == FIELD_ACCESS:
        dotted = dotted_name(expr)
        if dotted is not None:
            uses.add(dotted)
            return
    if kind == OPAQUE_EXPR:
        for tok in tokenize(source[expr.start:expr.end]):
            if tok.kind == IDENTIFIER:
                uses.add(tok.text)
        return
    if kind == METHOD_INVOCATION and expr.name:
        calls.append(expr.name)
    if kind == BINARY_EXPR and expr.name in ASSIGN_OPS:
        target, value = expr.children
        var = _variable(target)
        if var is not None:
            defines.add(var)
            if expr.name != "=":
                uses.add(var)
        elif target.kind == ARRAY_ACCESS:
            base = _variable(target.children[0])
            if base is not None:
                defines.add(base)
            _collect(target, source, defines, uses, calls)
        else:
            _collect(target, source, defines, uses, calls)
        _collect(value, source, defines, uses, calls)
        return
    if kind == UNARY_EXPR and expr.name in ("++", "--"):
        var = _variable(expr.children[0])
        if var is not None:
            defines.add(var)
            uses.add(var)
            return
    for child in expr.children:
        _collect(child, source, defines, uses, calls)


def _flatten(stmt: AstNode) -> Iterable[AstNode]:
    """Statements in textual order, nested blocks flattened."""
    if stmt.kind == BLOCK:
        for child in stmt.children:
            yield from _flatten(child)
        return
    if stmt.kind not in STATEMENT_KINDS:
        return
    yield stmt
    if stmt.kind in COMPOUND_KINDS:
        header = {id(p) for p in header_parts(stmt)}
        for child in stmt.children:
            if id(child) in header:
                continue
            yield from _flatten(child)


def _own_span(stmt: AstNode, source: str) -> tuple[int, int]:
    if stmt.kind not in COMPOUND_KINDS:
        return stmt.span
    parts = header_parts(stmt)
    if not parts:
        return stmt.span
    end = max(p.end for p in parts)
    # take the header's closing parenthesis along
    rest = source[end:stmt.end]
    stripped = rest.lstrip()
    if stripped.startswith(")"):
        end += len(rest) - len(stripped) + 1
    return (stmt.start, end)


def _statement_node(idx: int, stmt: AstNode, source: str, result: ParseResult | None) -> DfgNode:
    defines: set[str] = set()
    uses: set[str] = set()
    calls: list[str] = []
    declared = None
    if stmt.kind in COMPOUND_KINDS:
        parts = header_parts(stmt)
    else:
        parts = stmt.children
    for part in parts:
        if part.kind == LOCAL_VAR_DECL:
            defines.update(part.names)
            declared = part.declared_type
            for child in part.children:
                _collect(child, source, defines, uses, calls)
        else:
            _collect(part, source, defines, uses, calls)
    if stmt.kind == LOCAL_VAR_DECL:
        defines.update(stmt.names)
        declared = stmt.declared_type
    if declared is not None and result is not None:
        declared = qualify(result, declared)
    if declared == "var":
        declared = None
    span = _own_span(stmt, source)
    return DfgNode(
        id=idx,
        stmt=stmt,
        span=span,
        text=source[span[0]:span[1]],
        defines=frozenset(defines),
        uses=frozenset(uses),
        calls=tuple(calls),
        declared_type=declared,
    )


def build_dfg(method: AstNode, result: ParseResult | str) -> DataFlowGraph:
    """Data-flow graph of ``method``'s body.

    ``result`` supplies the source text (and imports, to qualify declared
    types when a ParseResult is given).
    """
    if method.kind != METHOD_DECL:
        raise ValueError(f"expected MethodDecl, got {method.kind}")
    source = result.source if isinstance(result, ParseResult) else result
    parse_result = result if isinstance(result, ParseResult) else None
    stmts: list[AstNode] = []
    for child in method.children:
        stmts.extend(_flatten(child))
    stmts.sort(key=lambda s: s.start)
    nodes = tuple(_statement_node(i, s, source, parse_result) for i, s in enumerate(stmts))
    edges = set()
    for b in nodes:
        for a in nodes[: b.id]:
            for var in a.defines & b.uses:
                edges.add((a.id, b.id, var))
    return DataFlowGraph(nodes, frozenset(edges), method)


def backward_slice(dfg: DataFlowGraph, focal: int) -> SlicedGraph:
    """Focal node plus every node that reaches it through data edges."""
    dfg.node(focal)
    preds: dict[int, set[int]] = {}
    for a, b, _ in dfg.edges:
        preds.setdefault(b, set()).add(a)
    kept = {focal}
    stack = [focal]
    while stack:
        current = stack.pop()
        for p in preds.get(current, ()):
            if p not in kept:
                kept.add(p)
                stack.append(p)
    return SlicedGraph(dfg.with_focal(focal), frozenset(kept), focal)


def slice_for_call(result: ParseResult, call: AstNode) -> SlicedGraph | None:
    """Backward slice anchored at the statement holding ``call``."""
    method = result.enclosing(call, METHOD_DECL)
    if method is None:
        return None
    dfg = build_dfg(method, result)
    node = dfg.node_for(call)
    if node is None:
        return None
    return backward_slice(dfg, node.id)
