"""Turn one migration example into a replayable mapping.

Nodes that are textually identical on both sides, and whose data-flow
neighbours are too, are pruned. The remaining before-nodes are paired
greedily with after-nodes by a weighted similarity; each pairing carries the
token edits that rewrite the before statement into the after statement.
After-nodes left unpaired become new statements to insert.
"""
from __future__ import annotations

import difflib
import logging
from collections import Counter
from dataclasses import dataclass, field

from .catalog import ApiDeclaration
from .dataflow import DfgNode, SlicedGraph
from .miner import MigrationExample
from .source_model.lexer import IDENTIFIER, Token
from .source_model.nodes import COMPOUND_KINDS, AstNode, ParseResult

log = logging.getLogger(__name__)

RENAME = "rename"
INSERT_TOKEN = "insert-token"
DELETE_TOKEN = "delete-token"
REPLACE_ARGUMENT = "replace-argument"
EDIT_KINDS = (RENAME, INSERT_TOKEN, DELETE_TOKEN, REPLACE_ARGUMENT)


class EmptyPattern(ValueError):
    """The example changes nothing that a mapping could replay."""


@dataclass(frozen=True)
class LearnerConfig:
    threshold: float = 0.5
    kind_weight: float = 0.4
    identifier_weight: float = 0.3
    type_weight: float = 0.2
    side_weight: float = 0.1


DEFAULT_CONFIG = LearnerConfig()


@dataclass(frozen=True)
class TokenEdit:
    """Replace ``length`` characters at ``at`` (relative to the node start) with ``text``."""

    kind: str
    at: int
    length: int
    text: str

    def to_json(self) -> dict:
        return {"kind": self.kind, "at": self.at, "length": self.length, "text": self.text}

    @classmethod
    def from_json(cls, obj: dict) -> "TokenEdit":
        return cls(obj["kind"], int(obj["at"]), int(obj.get("length", 0)), obj.get("text", ""))


@dataclass(frozen=True)
class NodePairing:
    before_id: int
    after_id: int
    similarity: float
    edits: tuple[TokenEdit, ...] = ()


@dataclass(frozen=True)
class NewNode:
    after_id: int
    text: str
    defines: tuple[tuple[str, str | None], ...] = ()


@dataclass(frozen=True, eq=False)
class MigrationMapping:
    api: ApiDeclaration
    pairings: tuple[NodePairing, ...]
    new_nodes: tuple[NewNode, ...]
    before_pattern: SlicedGraph = field(repr=False)
    after_pattern: SlicedGraph | None = field(repr=False)
    removes_call: bool
    before: ParseResult = field(repr=False)
    before_call: AstNode
    after: ParseResult | None = field(default=None, repr=False)
    after_call: AstNode | None = None
    unmatched_before: tuple[int, ...] = ()
    source_id: str = ""
    pattern_id: str = ""
    provenance: str = "Mined"

    @property
    def focal_pairing(self) -> NodePairing | None:
        for p in self.pairings:
            if p.before_id == self.before_pattern.focal:
                return p
        return None


# -- pruning and similarity -------------------------------------------------


def _neighbours(sliced: SlicedGraph) -> dict[int, set[int]]:
    adj: dict[int, set[int]] = {n: set() for n in sliced.kept}
    for a, b in sliced.edges_within():
        adj[a].add(b)
        adj[b].add(a)
    return adj


def _prune_side(sliced: SlicedGraph, other_texts: set[str]) -> frozenset[int]:
    identical = {n.id for n in sliced.kept_nodes() if n.normalized in other_texts}
    adj = _neighbours(sliced)
    kept = set()
    for node_id in sliced.kept:
        if node_id == sliced.focal or node_id not in identical:
            kept.add(node_id)
        elif any(m not in identical for m in adj[node_id]):
            kept.add(node_id)
    return frozenset(kept)


def prune_identical(example: MigrationExample) -> tuple[frozenset[int], frozenset[int]]:
    """Ids of the before and after slice nodes that survive pruning."""
    if example.after_slice is None:
        raise ValueError("pruning needs both slices")
    before, after = example.before_slice, example.after_slice
    b_texts = {n.normalized for n in before.kept_nodes()}
    a_texts = {n.normalized for n in after.kept_nodes()}
    return _prune_side(before, a_texts), _prune_side(after, b_texts)


def _sign(x: int) -> int:
    return (x > 0) - (x < 0)


def _multiset_jaccard(a: list[str], b: list[str]) -> float:
    ca, cb = Counter(a), Counter(b)
    union = sum((ca | cb).values())
    if union == 0:
        return 1.0
    return sum((ca & cb).values()) / union


def node_similarity(
    a: DfgNode,
    b: DfgNode,
    a_position: int = 0,
    b_position: int = 0,
    config: LearnerConfig = DEFAULT_CONFIG,
) -> float:
    """Weighted similarity in [0, 1].

    ``a_position``/``b_position`` give each node's offset relative to its
    focal node; only their signs matter.
    """
    score = 0.0
    if a.kind == b.kind:
        score += config.kind_weight
    score += config.identifier_weight * _multiset_jaccard(a.identifiers, b.identifiers)
    if a.declared_type == b.declared_type:
        score += config.type_weight
    if _sign(a_position) == _sign(b_position):
        score += config.side_weight
    return round(score, 10)


# -- token edits -------------------------------------------------------------

_CALL = "\x00call"


def _significant(result: ParseResult, start: int, end: int) -> list[Token]:
    return list(result.significant_tokens(start, end))


def _diff_edits(b_toks: list[Token], a_toks: list[Token], a_src: str) -> list[tuple[str, int, int, str]]:
    """Token-diff edits as ``(kind, start, end, text)`` in before coordinates."""
    matcher = difflib.SequenceMatcher(
        None, [t.text for t in b_toks], [t.text for t in a_toks], autojunk=False
    )
    edits = []
    for op, i1, i2, j1, j2 in matcher.get_opcodes():
        if op == "equal":
            continue
        if _CALL in (t.text for t in b_toks[i1:i2]) or _CALL in (t.text for t in a_toks[j1:j2]):
            raise _Unaligned("call moved")
        if op == "replace":
            if i2 - i1 == 1 and j2 - j1 == 1 and b_toks[i1].kind == IDENTIFIER and a_toks[j1].kind == IDENTIFIER:
                edits.append((RENAME, b_toks[i1].start, b_toks[i1].end, a_toks[j1].text))
            else:
                text = a_src[a_toks[j1].start:a_toks[j2 - 1].end]
                edits.append((INSERT_TOKEN, b_toks[i1].start, b_toks[i1].start, text))
                edits.append((DELETE_TOKEN, b_toks[i1].start, b_toks[i2 - 1].end, ""))
        elif op == "insert":
            if i1 < len(b_toks):
                text = a_src[a_toks[j1].start:a_toks[j2].start] if j2 < len(a_toks) else a_src[a_toks[j1].start:a_toks[j2 - 1].end]
                edits.append((INSERT_TOKEN, b_toks[i1].start, b_toks[i1].start, text))
            elif b_toks:
                text = a_src[a_toks[j1 - 1].end:a_toks[j2 - 1].end]
                edits.append((INSERT_TOKEN, b_toks[-1].end, b_toks[-1].end, text))
            else:
                raise _Unaligned("nothing to anchor an insertion")
        else:
            if i2 < len(b_toks):
                edits.append((DELETE_TOKEN, b_toks[i1].start, b_toks[i2].start, ""))
            elif i1 > 0:
                edits.append((DELETE_TOKEN, b_toks[i1 - 1].end, b_toks[i2 - 1].end, ""))
            else:
                edits.append((DELETE_TOKEN, b_toks[i1].start, b_toks[i2 - 1].end, ""))
    return edits


class _Unaligned(Exception):
    pass


def _is_subsequence_run(inner: list[str], outer: list[str]) -> int:
    n = len(inner)
    for k in range(len(outer) - n + 1):
        if outer[k:k + n] == inner:
            return k
    return -1


def _argument_edits(before: ParseResult, bc: AstNode, after: ParseResult, ac: AstNode) -> list:
    b_args, a_args = list(bc.args), list(ac.args)
    b_text = [_norm(before, a) for a in b_args]
    a_text = [_norm(after, a) for a in a_args]
    n, m = len(b_args), len(a_args)
    p = 0
    while p < min(n, m) and b_text[p] == a_text[p]:
        p += 1
    s = 0
    while s < min(n, m) - p and b_text[n - 1 - s] == a_text[m - 1 - s]:
        s += 1
    b_mid = list(range(p, n - s))
    a_mid = list(range(p, m - s))
    k = min(len(b_mid), len(a_mid))
    edits = []
    for bi, ai in zip(b_mid[:k], a_mid[:k]):
        if b_text[bi] == a_text[ai]:
            continue
        barg, aarg = b_args[bi], a_args[ai]
        b_toks = _significant(before, barg.start, barg.end)
        a_toks = _significant(after, aarg.start, aarg.end)
        at = _is_subsequence_run([t.text for t in b_toks], [t.text for t in a_toks])
        if at >= 0 and b_toks:
            head = after.source[aarg.start:a_toks[at].start]
            tail = after.source[a_toks[at + len(b_toks) - 1].end:aarg.end]
            if head:
                edits.append((INSERT_TOKEN, barg.start, barg.start, head))
            if tail:
                edits.append((INSERT_TOKEN, barg.end, barg.end, tail))
        else:
            edits.append((REPLACE_ARGUMENT, barg.start, barg.end, after.text(aarg)))
    extra_a = a_mid[k:]
    extra_b = b_mid[k:]
    if extra_a:
        first, last = a_args[extra_a[0]], a_args[extra_a[-1]]
        if n - s < n:
            anchor = b_args[n - s].start
            text = after.source[first.start:a_args[m - s].start]
        elif p + k > 0:
            anchor = b_args[p + k - 1].end
            text = after.source[a_args[extra_a[0] - 1].end:last.end]
        else:
            anchor = bc.paren_span[1] - 1
            text = after.source[first.start:last.end]
        edits.append((INSERT_TOKEN, anchor, anchor, text))
    if extra_b:
        first, last = b_args[extra_b[0]], b_args[extra_b[-1]]
        if extra_b[0] > 0:
            edits.append((DELETE_TOKEN, b_args[extra_b[0] - 1].end, last.end, ""))
        elif extra_b[-1] + 1 < n:
            edits.append((DELETE_TOKEN, first.start, b_args[extra_b[-1] + 1].start, ""))
        else:
            edits.append((DELETE_TOKEN, first.start, last.end, ""))
    return edits


def _norm(result: ParseResult, node: AstNode) -> str:
    return " ".join(t.text for t in result.significant_tokens(node.start, node.end))


def _call_edits(before: ParseResult, bc: AstNode, after: ParseResult, ac: AstNode) -> list:
    edits = []
    br, ar = bc.receiver, ac.receiver
    if br is not None and ar is not None:
        if _norm(before, br) != _norm(after, ar):
            edits.extend(
                _diff_edits(_significant(before, br.start, br.end), _significant(after, ar.start, ar.end), after.source)
            )
    elif br is not None:
        edits.append((DELETE_TOKEN, br.start, bc.name_span[0], ""))
    elif ar is not None:
        edits.append((INSERT_TOKEN, bc.name_span[0], bc.name_span[0], after.source[ar.start:ac.name_span[0]]))
    if bc.name != ac.name:
        edits.append((RENAME, bc.name_span[0], bc.name_span[1], ac.name))
    edits.extend(_argument_edits(before, bc, after, ac))
    return edits


def _with_placeholder(toks: list[Token], call: AstNode) -> list[Token]:
    out, placed = [], False
    for t in toks:
        if call.start <= t.start and t.end <= call.end:
            if not placed:
                out.append(Token("call", _CALL, call.start, call.end))
                placed = True
            continue
        out.append(t)
    return out


def _focal_edits(before, bnode: DfgNode, bc, after, anode: DfgNode, ac) -> list:
    try:
        edits = _call_edits(before, bc, after, ac)
        outer_b = _with_placeholder(_significant(before, *bnode.span), bc)
        outer_a = _with_placeholder(_significant(after, *anode.span), ac)
        edits.extend(_diff_edits(outer_b, outer_a, after.source))
        return edits
    except _Unaligned:
        return _diff_edits(_significant(before, *bnode.span), _significant(after, *anode.span), after.source)


def _relative(node: DfgNode, edits: list) -> tuple[TokenEdit, ...]:
    base = node.span[0]
    ordered = sorted(edits, key=lambda e: (e[1], e[2]))
    return tuple(TokenEdit(kind, start - base, end - start, text) for kind, start, end, text in ordered)


def pairing_edits(example: MigrationExample, before_id: int, after_id: int) -> tuple[TokenEdit, ...]:
    bs, as_ = example.before_slice, example.after_slice
    bnode, anode = bs.base.node(before_id), as_.base.node(after_id)
    if before_id == bs.focal and after_id == as_.focal:
        edits = _focal_edits(example.before, bnode, example.before_call, example.after, anode, example.after_call)
    else:
        try:
            edits = _diff_edits(
                _significant(example.before, *bnode.span),
                _significant(example.after, *anode.span),
                example.after.source,
            )
        except _Unaligned:
            edits = []
    return _relative(bnode, edits)


# -- mapping -----------------------------------------------------------------


def _defines_with_types(node: DfgNode) -> tuple[tuple[str, str | None], ...]:
    return tuple((name, node.declared_type) for name in sorted(node.defines))


def learn_mapping(example: MigrationExample, config: LearnerConfig = DEFAULT_CONFIG) -> MigrationMapping:
    common = dict(
        api=example.api,
        before=example.before,
        before_call=example.before_call,
        after=example.after,
        after_call=example.after_call,
        source_id=example.source_id,
        pattern_id=example.id,
        provenance=example.provenance.value,
    )
    bs = example.before_slice
    if example.after_call is None or example.after_slice is None:
        # A removal is never replayed; anchoring on the focal alone lets the
        # pattern reach every call it could warn about.
        pattern = SlicedGraph(bs.base, frozenset({bs.focal}), bs.focal)
        return MigrationMapping(
            pairings=(), new_nodes=(), before_pattern=pattern, after_pattern=None, removes_call=True, **common
        )

    as_ = example.after_slice
    b_keep, a_keep = prune_identical(example)
    bf, af = bs.focal, as_.focal

    def sim(b: int, a: int) -> float:
        return node_similarity(bs.base.node(b), as_.base.node(a), b - bf, a - af, config)

    chosen = [(bf, af, sim(bf, af))]
    scored = sorted(
        (-sim(b, a), b, a)
        for b in b_keep - {bf}
        for a in a_keep - {af}
        if sim(b, a) >= config.threshold
    )
    used_b, used_a = {bf}, {af}
    for neg, b, a in scored:
        if b in used_b or a in used_a:
            continue
        chosen.append((b, a, -neg))
        used_b.add(b)
        used_a.add(a)

    pairings = tuple(
        NodePairing(b, a, s, pairing_edits(example, b, a)) for b, a, s in sorted(chosen)
    )
    new_nodes = tuple(
        NewNode(a, example.after.source[as_.base.node(a).stmt.start:as_.base.node(a).stmt.end],
                _defines_with_types(as_.base.node(a)))
        for a in sorted(a_keep - used_a)
    )
    unmatched = tuple(sorted(b_keep - used_b))
    if not any(p.edits for p in pairings) and not new_nodes:
        log.info("EmptyPattern: %s changes nothing replayable", example.id)
        raise EmptyPattern(example.id)
    return MigrationMapping(
        pairings=pairings,
        new_nodes=new_nodes,
        before_pattern=SlicedGraph(bs.base, b_keep, bf),
        after_pattern=SlicedGraph(as_.base, a_keep, af),
        removes_call=False,
        unmatched_before=unmatched,
        **common,
    )


def is_compound(node: DfgNode) -> bool:
    return node.kind in COMPOUND_KINDS


def learn_all(examples, config: LearnerConfig = DEFAULT_CONFIG) -> tuple[list[MigrationMapping], list[str]]:
    """Mappings for every example, plus ids of examples discarded as empty."""
    mappings, empty = [], []
    for example in examples:
        try:
            mappings.append(learn_mapping(example, config))
        except EmptyPattern:
            empty.append(example.id)
    return mappings, empty


__all__ = [
    "DEFAULT_CONFIG",
    "EDIT_KINDS",
    "EmptyPattern",
    "LearnerConfig",
    "MigrationMapping",
    "NewNode",
    "NodePairing",
    "TokenEdit",
    "learn_all",
    "learn_mapping",
    "node_similarity",
    "pairing_edits",
    "prune_identical",
]
