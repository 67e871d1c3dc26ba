"""Find migration candidates in target code and replay learned mappings onto them.

A target call is a candidate for a mapping when the mapping's pruned
before-slice embeds into the call's backward slice: every pattern node maps
to a distinct target node of compatible label, every pattern edge to a
target edge, and focal to focal. Supported candidates are rewritten by
replaying the pairing edits at the corresponding target positions; anything
that cannot be placed safely becomes guidance instead of a partial rewrite.
"""
from __future__ import annotations

import difflib
import enum
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

from .catalog import AmbiguousMatch, ApiCatalog, Strength, call_return_type, match_invocation
from .dataflow import DfgNode, SlicedGraph, slice_for_call
from .diffs import count_token_changes, unified_diff
from .learner import MigrationMapping, TokenEdit
from .source_model import OverlappingEdits, render
from .source_model.lexer import IDENTIFIER, LITERAL, Token, tokenize
from .source_model.nodes import (
    BLOCK,
    COMPOUND_KINDS,
    FOR_STMT,
    IF_STMT,
    METHOD_DECL,
    METHOD_INVOCATION,
    NAME,
    TRY_STMT,
    WHILE_STMT,
    AstNode,
    ParseResult,
)
from .source_model.types import expression_type, is_primitive, qualify, types_equal, visible_variables

log = logging.getLogger(__name__)


class OutcomeKind(enum.Enum):
    APPLIED = "Applied"
    GUIDANCE = "Guidance"
    UNSUPPORTED = "Unsupported"


class Reason(enum.Enum):
    MATCHED = "Matched"
    UNMATCHED_DATAFLOW = "UnmatchedDataflow"
    REMOVES_CALL = "RemovesCall"
    TRY_CATCH_SPAN = "TryCatchSpan"
    LOOP_HEADER = "LoopHeader"
    CONDITION_HEADER = "ConditionHeader"
    AMBIGUOUS_MATCH = "AmbiguousMatch"
    OVERLAP_CONFLICT = "OverlapConflict"


UNSUPPORTED_REASONS = frozenset(
    {Reason.REMOVES_CALL, Reason.TRY_CATCH_SPAN, Reason.LOOP_HEADER, Reason.CONDITION_HEADER}
)


@dataclass(frozen=True, eq=False)
class MigrationCandidate:
    file: str
    target: ParseResult = field(repr=False)
    focal: AstNode
    target_slice: SlicedGraph = field(repr=False)
    embedding: Mapping[int, int]
    pattern: MigrationMapping = field(repr=False)


@dataclass
class MigrationOutcome:
    kind: OutcomeKind
    reason: Reason
    file: str
    offset: int
    api: str
    pattern_id: str | None = None
    source: str | None = None
    suggested_examples: tuple[str, ...] = ()
    edits: str | None = None
    tokens_changed: int = 0
    unresolved_names: tuple[str, ...] = ()
    span_edits: tuple = field(default=(), repr=False)

    def to_record(self) -> dict:
        return {
            "file": self.file,
            "offset": self.offset,
            "api": self.api,
            "patternId": self.pattern_id,
            "source": self.source,
            "outcome": self.kind.value,
            "reason": self.reason.value,
            "tokensChanged": self.tokens_changed,
            "unresolvedNames": list(self.unresolved_names),
            "suggestedExamples": list(self.suggested_examples),
        }


# -- embedding search ----------------------------------------------------------


def enumerate_embeddings(
    pattern_nodes: Iterable[int],
    pattern_edges: Iterable[tuple[int, int]],
    pattern_focal: int,
    target_nodes: Iterable[int],
    target_edges: Iterable[tuple[int, int]],
    target_focal: int,
    compatible: Callable[[int, int], bool],
) -> list[dict[int, int]]:
    """All injective label-compatible maps sending pattern edges onto target edges.

    The focal node is pinned to the target focal. Results come out in a
    fixed order (pattern nodes assigned by ascending id, targets tried in
    ascending id).
    """
    p_nodes = sorted(set(pattern_nodes))
    t_nodes = sorted(set(target_nodes))
    t_edges = set(target_edges)
    out_edges: dict[int, list[int]] = {n: [] for n in p_nodes}
    in_edges: dict[int, list[int]] = {n: [] for n in p_nodes}
    for a, b in pattern_edges:
        out_edges[a].append(b)
        in_edges[b].append(a)
    if pattern_focal not in out_edges or target_focal not in t_nodes:
        return []
    order = [pattern_focal] + [n for n in p_nodes if n != pattern_focal]
    assign: dict[int, int] = {}
    used: set[int] = set()
    results: list[dict[int, int]] = []

    def consistent(p: int, t: int) -> bool:
        for b in out_edges[p]:
            if b in assign and (t, assign[b]) not in t_edges:
                return False
        for a in in_edges[p]:
            if a in assign and (assign[a], t) not in t_edges:
                return False
        return True

    def extend(i: int) -> None:
        if i == len(order):
            results.append(dict(assign))
            return
        p = order[i]
        options = [target_focal] if p == pattern_focal else t_nodes
        for t in options:
            if t in used or (p != pattern_focal and t == target_focal):
                continue
            if not compatible(p, t) or not consistent(p, t):
                continue
            assign[p] = t
            used.add(t)
            extend(i + 1)
            del assign[p]
            used.discard(t)

    extend(0)
    return results


def labels_compatible(p: DfgNode, t: DfgNode) -> bool:
    """Non-focal label rule: same statement kind; types must agree only when both are known."""
    if p.kind != t.kind:
        return False
    if p.declared_type is None or t.declared_type is None:
        return True
    return types_equal(p.declared_type, t.declared_type)


def slice_embeddings(pattern: SlicedGraph, target: SlicedGraph) -> list[dict[int, int]]:
    p_base, t_base = pattern.base, target.base

    def compatible(p: int, t: int) -> bool:
        if p == pattern.focal:
            return t == target.focal
        return labels_compatible(p_base.node(p), t_base.node(t))

    return enumerate_embeddings(
        pattern.kept,
        pattern.edges_within(),
        pattern.focal,
        target.kept,
        target.edges_within(),
        target.focal,
        compatible,
    )


@dataclass
class CandidateSearch:
    candidates: list[MigrationCandidate] = field(default_factory=list)
    unmatched: list[AstNode] = field(default_factory=list)
    ambiguous: list[AstNode] = field(default_factory=list)


def _nested_call_conflict(pattern: MigrationMapping, call: AstNode, target: ParseResult, catalog) -> bool:
    """A target argument that is a call of unknown type where the example had a plain value."""
    call_types = call_return_type(catalog, target)
    for p_arg, t_arg in zip(pattern.before_call.args, call.args):
        if t_arg.kind == METHOD_INVOCATION and p_arg.kind != METHOD_INVOCATION:
            if expression_type(target, t_arg, call_types) is None:
                return True
    return False


def search_candidates(
    target: ParseResult, pattern: MigrationMapping, catalog: ApiCatalog, path: str | None = None
) -> CandidateSearch:
    found = CandidateSearch()
    path = path or target.path or ""
    for call in target.invocations:
        if call.name != pattern.api.method:
            continue
        try:
            result = match_invocation(catalog, call, target)
        except AmbiguousMatch as exc:
            if any(c.key == pattern.api.key for c in exc.candidates):
                found.ambiguous.append(call)
            continue
        if result.strength is Strength.NONE or result.matched.key != pattern.api.key:
            continue
        sliced = slice_for_call(target, call)
        embeddings = []
        if sliced is not None and not _nested_call_conflict(pattern, call, target, catalog):
            embeddings = slice_embeddings(pattern.before_pattern, sliced)
        if not embeddings:
            found.unmatched.append(call)
            continue
        for emb in embeddings:
            found.candidates.append(MigrationCandidate(path, target, call, sliced, emb, pattern))
    return found


def find_candidates(
    target: ParseResult, pattern: MigrationMapping, catalog: ApiCatalog
) -> list[MigrationCandidate]:
    """One candidate per (matching call, embedding of the pattern slice)."""
    return search_candidates(target, pattern, catalog).candidates


# -- support check -------------------------------------------------------------


def _try_region(result: ParseResult, stmt: AstNode) -> int | None:
    for anc in result.ancestors(stmt):
        if anc.kind == BLOCK and anc.role in ("try", "catch", "finally"):
            return id(anc)
        if anc.kind == METHOD_DECL:
            return None
    return None


def touched_statements(candidate: MigrationCandidate) -> list[AstNode]:
    pattern, base = candidate.pattern, candidate.target_slice.base
    touched = [base.node(candidate.embedding[p.before_id]).stmt for p in pattern.pairings if p.edits]
    if pattern.new_nodes:
        touched.append(candidate.target_slice.focal_node.stmt)
    return touched


def check_supported(candidate: MigrationCandidate) -> Reason | None:
    """``None`` when the candidate can be rewritten, else the Unsupported reason."""
    if candidate.pattern.removes_call:
        return Reason.REMOVES_CALL
    stmt = candidate.target_slice.focal_node.stmt
    if stmt.kind in COMPOUND_KINDS:
        if stmt.kind == IF_STMT:
            return Reason.CONDITION_HEADER
        if stmt.kind in (FOR_STMT, WHILE_STMT):
            return Reason.LOOP_HEADER
        if stmt.kind == TRY_STMT:
            return Reason.TRY_CATCH_SPAN
    target = candidate.target
    regions = {_try_region(target, s) for s in touched_statements(candidate)}
    if len(regions) > 1:
        return Reason.TRY_CATCH_SPAN
    return None


# -- name inference ------------------------------------------------------------


@dataclass
class NameMap:
    mapping: dict[str, str]
    unresolved: tuple[str, ...] = ()
    skipped_new_nodes: frozenset[int] = frozenset()

    def get(self, name: str, default=None):
        return self.mapping.get(name, default)


def _is_member(tokens: list[Token], i: int) -> bool:
    j = i - 1
    while j >= 0 and tokens[j].is_trivia:
        j -= 1
    return j >= 0 and tokens[j].text == "."


def free_identifiers(text: str) -> list[str]:
    """Identifiers not written after a dot, in order of appearance."""
    toks = tokenize(text)
    return [t.text for i, t in enumerate(toks) if t.kind == IDENTIFIER and not _is_member(toks, i)]


def substitute(text: str, mapping: Mapping[str, str]) -> str:
    toks = tokenize(text)
    out = []
    for i, t in enumerate(toks):
        if t.kind == IDENTIFIER and t.text in mapping and not _is_member(toks, i):
            out.append(mapping[t.text])
        else:
            out.append(t.text)
    return "".join(out)


def _pattern_variables(pattern: MigrationMapping) -> dict[str, str | None]:
    found: dict[str, str | None] = {}
    sides = [(pattern.before, pattern.before_call)]
    if pattern.after is not None and pattern.after_call is not None:
        sides.append((pattern.after, pattern.after_call))
    for result, call in sides:
        for name, type_text, _ in visible_variables(result, call):
            if name not in found:
                found[name] = None if type_text in (None, "var") else qualify(result, type_text)
    for node in pattern.new_nodes:
        for name, type_text in node.defines:
            found[name] = type_text
    return found


def _structural_names(pattern: MigrationMapping, candidate: MigrationCandidate, variables) -> dict[str, str]:
    mapping: dict[str, str] = {}

    def bind(p: str, t: str) -> None:
        if p in variables and p not in mapping and "." not in p and "." not in t:
            mapping[p] = t

    p_base, t_base = pattern.before_pattern.base, candidate.target_slice.base
    for p_id, t_id in sorted(candidate.embedding.items()):
        pn, tn = p_base.node(p_id), t_base.node(t_id)
        if len(pn.defines) == 1 and len(tn.defines) == 1:
            bind(next(iter(pn.defines)), next(iter(tn.defines)))
    pc, tc = pattern.before_call, candidate.focal
    pr, tr = pc.receiver, tc.receiver
    if pr is not None and tr is not None and pr.kind == NAME and tr.kind == NAME:
        bind(pr.name, tr.name)
    for pa, ta in zip(pc.args, tc.args):
        if pa.kind == NAME and ta.kind == NAME:
            bind(pa.name, ta.name)
    return mapping


def _needed_names(pattern: MigrationMapping, variables) -> list[str]:
    texts = [e.text for p in pattern.pairings for e in p.edits] + [n.text for n in pattern.new_nodes]
    needed: list[str] = []
    for text in texts:
        for name in free_identifiers(text):
            if name in variables and name not in needed:
                needed.append(name)
    for node in pattern.new_nodes:
        for name, _ in node.defines:
            if name not in needed:
                needed.append(name)
    return needed


def infer_names(pattern: MigrationMapping, candidate: MigrationCandidate) -> NameMap:
    """Map pattern variables onto target variables.

    Structural correspondences from the embedding come first, then variables
    of an identical non-primitive type visible at the target call (nearest
    declaration wins). Anything left keeps its name, suffixed ``_m1``,
    ``_m2``, ... if that name is already taken in the target.
    """
    target = candidate.target
    variables = _pattern_variables(pattern)
    mapping = _structural_names(pattern, candidate, variables)
    visible = visible_variables(target, candidate.focal)
    visible_names = {name for name, _, _ in visible}
    method = target.enclosing(candidate.focal, METHOD_DECL)
    method_words = set(free_identifiers(target.text(method))) if method is not None else set()
    defined_by_new = {name: node.after_id for node in pattern.new_nodes for name, _ in node.defines}

    unresolved: list[str] = []
    kept_fresh: set[str] = set()
    for name in _needed_names(pattern, variables):
        if name in mapping:
            continue
        type_text = variables.get(name)
        if type_text is not None and not is_primitive(type_text):
            match = next(
                (
                    var
                    for var, t, _ in visible
                    if t not in (None, "var") and types_equal(type_text, qualify(target, t))
                ),
                None,
            )
            if match is not None:
                mapping[name] = match
                continue
        taken = visible_names | set(mapping.values()) | kept_fresh
        fresh = name
        n = 0
        while fresh in taken or (fresh != name and fresh in method_words):
            n += 1
            fresh = f"{name}_m{n}"
        mapping[name] = fresh
        kept_fresh.add(fresh)
        if name not in defined_by_new:
            unresolved.append(fresh)

    skipped = set()
    for node in pattern.new_nodes:
        names = [n for n, _ in node.defines]
        if names and all(mapping.get(n) in visible_names for n in names):
            skipped.add(node.after_id)
    return NameMap(mapping, tuple(unresolved), frozenset(skipped))


# -- position transfer ---------------------------------------------------------


def _key(tok: Token, names: Mapping[str, str] | None) -> str:
    if tok.kind == LITERAL:
        return "\x00lit"
    if tok.kind == IDENTIFIER and names is not None:
        return names.get(tok.text, tok.text)
    return tok.text


def _shape(tok: Token) -> str:
    if tok.kind in (IDENTIFIER, LITERAL):
        return tok.kind
    return tok.text


class PositionMap:
    """Pattern offsets to target offsets, keyed separately for token starts and ends."""

    def __init__(self):
        self.starts: dict[int, int] = {}
        self.ends: dict[int, int] = {}

    def add_span(self, a: tuple[int, int], b: tuple[int, int]) -> None:
        self.starts[a[0]] = b[0]
        self.ends[a[1]] = b[1]

    def align(self, a_toks: Sequence[Token], b_toks: Sequence[Token], names=None) -> None:
        matcher = difflib.SequenceMatcher(
            None, [_key(t, names) for t in a_toks], [_key(t, None) for t in b_toks], autojunk=False
        )
        for op, i1, i2, j1, j2 in matcher.get_opcodes():
            if op == "equal" or (
                op == "replace"
                and i2 - i1 == j2 - j1
                and [_shape(t) for t in a_toks[i1:i2]] == [_shape(t) for t in b_toks[j1:j2]]
            ):
                for a, b in zip(a_toks[i1:i2], b_toks[j1:j2]):
                    self.add_span(a.span, b.span)

    def start(self, offset: int) -> int | None:
        return self.starts.get(offset, self.ends.get(offset))

    def end(self, offset: int) -> int | None:
        return self.ends.get(offset, self.starts.get(offset))


def _placeholder(toks: list[Token], call: AstNode) -> list[Token]:
    out, placed = [], False
    for t in toks:
        if call.start <= t.start and t.end <= call.end:
            if not placed:
                out.append(Token("call", "\x00call", call.start, call.end))
                placed = True
            continue
        out.append(t)
    return out


def _between(result: ParseResult, start: int, end: int) -> list[Token]:
    return list(result.significant_tokens(start, end))


def focal_positions(
    pattern_src: ParseResult, pnode: DfgNode, pc: AstNode, target: ParseResult, tnode: DfgNode, tc: AstNode, names
) -> PositionMap:
    pm = PositionMap()
    pm.align(
        _placeholder(_between(pattern_src, *pnode.span), pc),
        _placeholder(_between(target, *tnode.span), tc),
        names,
    )
    pm.add_span(pnode.span, tnode.span)
    pm.add_span(pc.span, tc.span)
    pm.add_span(pc.name_span, tc.name_span)
    pm.add_span((pc.paren_span[0], pc.paren_span[0] + 1), (tc.paren_span[0], tc.paren_span[0] + 1))
    pm.add_span((pc.paren_span[1] - 1, pc.paren_span[1]), (tc.paren_span[1] - 1, tc.paren_span[1]))
    pr, tr = pc.receiver, tc.receiver
    if pr is not None and tr is not None:
        pm.align(_between(pattern_src, pr.start, pr.end), _between(target, tr.start, tr.end), names)
        pm.add_span(pr.span, tr.span)
        pm.align(_between(pattern_src, pr.end, pc.name_span[0]), _between(target, tr.end, tc.name_span[0]))
    pargs, targs = pc.args, tc.args
    if len(pargs) == len(targs):
        for i, (pa, ta) in enumerate(zip(pargs, targs)):
            pm.align(_between(pattern_src, pa.start, pa.end), _between(target, ta.start, ta.end), names)
            pm.add_span(pa.span, ta.span)
            if i + 1 < len(pargs):
                pm.align(
                    _between(pattern_src, pa.end, pargs[i + 1].start), _between(target, ta.end, targs[i + 1].start)
                )
    return pm


def node_positions(pattern_src: ParseResult, pnode: DfgNode, target: ParseResult, tnode: DfgNode, names) -> PositionMap:
    pm = PositionMap()
    pm.align(_between(pattern_src, *pnode.span), _between(target, *tnode.span), names)
    pm.add_span(pnode.span, tnode.span)
    return pm


class _Unplaceable(Exception):
    pass


def transfer_edit(edit: TokenEdit, pnode: DfgNode, pm: PositionMap, names: Mapping[str, str]):
    start = pnode.span[0] + edit.at
    t_start = pm.start(start)
    t_end = t_start if edit.length == 0 else pm.end(start + edit.length)
    if t_start is None or t_end is None or t_end < t_start:
        raise _Unplaceable(edit)
    return ((t_start, t_end), substitute(edit.text, names))


# -- application -----------------------------------------------------------------


def _indent_before(source: str, offset: int) -> str | None:
    line_start = source.rfind("\n", 0, offset) + 1
    prefix = source[line_start:offset]
    return prefix if prefix.strip() == "" else None


def changed_token_count(source: str, span_edits: Iterable) -> int:
    """Token changes of a set of span edits, touching edits counted as one region."""
    ordered = sorted(span_edits, key=lambda e: (e[0][0], e[0][1]))
    total = 0
    i = 0
    while i < len(ordered):
        start, end = ordered[i][0]
        texts = [ordered[i][1]]
        cursor = end
        j = i + 1
        while j < len(ordered) and ordered[j][0][0] <= cursor:
            (s, e), text = ordered[j]
            texts.append(source[cursor:s])
            texts.append(text)
            cursor = max(cursor, e)
            j += 1
        total += count_token_changes(source[start:cursor], "".join(texts))
        i = j
    return total


def _outcome(kind, reason, candidate_or_call, pattern: MigrationMapping, file: str, **extra) -> MigrationOutcome:
    call = candidate_or_call.focal if isinstance(candidate_or_call, MigrationCandidate) else candidate_or_call
    return MigrationOutcome(
        kind=kind,
        reason=reason,
        file=file,
        offset=call.start,
        api=pattern.api.signature,
        pattern_id=pattern.pattern_id,
        source=pattern.provenance,
        suggested_examples=(pattern.pattern_id,),
        **extra,
    )


def apply_mapping(candidate: MigrationCandidate, pattern: MigrationMapping | None = None) -> MigrationOutcome:
    """Replay ``pattern`` onto a supported candidate.

    Returns Applied with a unified diff, or Guidance when an edit cannot be
    placed or edits collide. The target text itself is never touched here.
    """
    pattern = pattern or candidate.pattern
    target = candidate.target
    names = infer_names(pattern, candidate)

    def guidance(reason: Reason) -> MigrationOutcome:
        return _outcome(OutcomeKind.GUIDANCE, reason, candidate, pattern, candidate.file)

    span_edits: list = []
    focal_stmt = candidate.target_slice.focal_node.stmt
    new_nodes = [n for n in pattern.new_nodes if n.after_id not in names.skipped_new_nodes]
    if new_nodes:
        parent = target.parent(focal_stmt)
        if parent is None or parent.kind != BLOCK:
            return guidance(Reason.UNMATCHED_DATAFLOW)
        indent = _indent_before(target.source, focal_stmt.start)
        separator = "\n" + indent if indent is not None else " "
        for node in new_nodes:
            if pattern.after_pattern is not None and pattern.after_pattern.base.node(node.after_id).kind in COMPOUND_KINDS:
                return guidance(Reason.UNMATCHED_DATAFLOW)
            text = substitute(node.text, names.mapping)
            span_edits.append(((focal_stmt.start, focal_stmt.start), text + separator))

    p_base, t_base = pattern.before_pattern.base, candidate.target_slice.base
    for pairing in pattern.pairings:
        if not pairing.edits:
            continue
        pnode = p_base.node(pairing.before_id)
        tnode = t_base.node(candidate.embedding[pairing.before_id])
        if pairing.before_id == pattern.before_pattern.focal:
            pm = focal_positions(pattern.before, pnode, pattern.before_call, target, tnode, candidate.focal, names.mapping)
        else:
            pm = node_positions(pattern.before, pnode, target, tnode, names.mapping)
        try:
            span_edits.extend(transfer_edit(e, pnode, pm, names.mapping) for e in pairing.edits)
        except _Unplaceable:
            return guidance(Reason.UNMATCHED_DATAFLOW)

    try:
        new_text = render(target, span_edits)
    except (OverlappingEdits, ValueError):
        return guidance(Reason.OVERLAP_CONFLICT)
    return _outcome(
        OutcomeKind.APPLIED,
        Reason.MATCHED,
        candidate,
        pattern,
        candidate.file,
        edits=unified_diff(target.source, new_text, candidate.file),
        tokens_changed=changed_token_count(target.source, span_edits),
        unresolved_names=names.unresolved,
        span_edits=tuple(span_edits),
    )


def migrate_candidate(candidate: MigrationCandidate) -> MigrationOutcome:
    reason = check_supported(candidate)
    if reason is not None:
        return _outcome(OutcomeKind.UNSUPPORTED, reason, candidate, candidate.pattern, candidate.file)
    return apply_mapping(candidate)


# -- per-file driver -------------------------------------------------------------


@dataclass
class CallAttempts:
    """Everything the patterns say about one target call."""

    call: AstNode
    outcomes: list[MigrationOutcome] = field(default_factory=list)

    @property
    def applied(self) -> list[MigrationOutcome]:
        return [o for o in self.outcomes if o.kind is OutcomeKind.APPLIED]

    def summary(self) -> MigrationOutcome:
        """First Applied; else first Unsupported; else first Guidance, with all examples attached."""
        examples = tuple(dict.fromkeys(e for o in self.outcomes for e in o.suggested_examples))
        for kind in (OutcomeKind.APPLIED, OutcomeKind.UNSUPPORTED, OutcomeKind.GUIDANCE):
            for o in self.outcomes:
                if o.kind is kind:
                    if kind is OutcomeKind.APPLIED:
                        return o
                    o.suggested_examples = examples
                    return o
        raise ValueError("no outcomes")


def collect_attempts(
    target: ParseResult, patterns: Sequence[MigrationMapping], catalog: ApiCatalog, path: str
) -> list[CallAttempts]:
    """Outcomes of every pattern on every matching call, calls in textual order."""
    by_call: dict[int, CallAttempts] = {}
    for pattern in patterns:
        search = search_candidates(target, pattern, catalog, path)
        for cand in search.candidates:
            entry = by_call.setdefault(cand.focal.start, CallAttempts(cand.focal))
            entry.outcomes.append(migrate_candidate(cand))
        for call in search.unmatched:
            entry = by_call.setdefault(call.start, CallAttempts(call))
            entry.outcomes.append(_outcome(OutcomeKind.GUIDANCE, Reason.UNMATCHED_DATAFLOW, call, pattern, path))
        for call in search.ambiguous:
            entry = by_call.setdefault(call.start, CallAttempts(call))
            entry.outcomes.append(_outcome(OutcomeKind.GUIDANCE, Reason.AMBIGUOUS_MATCH, call, pattern, path))
    return [by_call[k] for k in sorted(by_call)]


Chooser = Callable[[CallAttempts], "MigrationOutcome | None"]


def migrate_file(
    target: ParseResult,
    patterns: Sequence[MigrationMapping],
    catalog: ApiCatalog,
    path: str,
    choose: Chooser | None = None,
) -> tuple[list[MigrationOutcome], str]:
    """Outcomes per call and the rewritten text.

    Without ``choose`` the first Applied outcome per call wins. Applied
    outcomes whose edits collide with an earlier call's are downgraded to
    Guidance(OverlapConflict).
    """
    results: list[MigrationOutcome] = []
    accepted: list = []
    for attempts in collect_attempts(target, patterns, catalog, path):
        if choose is not None and attempts.applied:
            picked = choose(attempts)
            if picked is None:
                summary = attempts.summary()
                summary = MigrationOutcome(
                    OutcomeKind.GUIDANCE, Reason.MATCHED, summary.file, summary.offset, summary.api,
                    summary.pattern_id, summary.source, summary.suggested_examples,
                )
                results.append(summary)
                continue
        else:
            picked = attempts.summary()
        if picked.kind is OutcomeKind.APPLIED:
            try:
                render(target, accepted + list(picked.span_edits))
            except (OverlappingEdits, ValueError):
                picked = MigrationOutcome(
                    OutcomeKind.GUIDANCE, Reason.OVERLAP_CONFLICT, picked.file, picked.offset, picked.api,
                    picked.pattern_id, picked.source, picked.suggested_examples,
                )
            else:
                accepted.extend(picked.span_edits)
        results.append(picked)
    return results, render(target, accepted)


def replay_on_example(pattern: MigrationMapping, catalog: ApiCatalog) -> MigrationOutcome | None:
    """Apply ``pattern`` to its own before-file at its own focal call.

    Prefers the identity embedding. Returns None when the focal is not even
    a candidate.
    """
    search = search_candidates(pattern.before, pattern, catalog, pattern.before.path or "")
    own = [c for c in search.candidates if c.focal.start == pattern.before_call.start]
    if not own:
        return None
    own.sort(key=lambda c: sum(p != t for p, t in c.embedding.items()))
    return migrate_candidate(own[0])
