"""Find catalog API calls in example sources and extract migration examples.

An example source on disk is a directory holding either ordered ``vNNN/``
snapshot directories or exactly ``before/`` and ``after/``. Consecutive
versions are compared; a call to a deprecated API whose statement or
backward slice changed becomes one :class:`MigrationExample`.
"""
from __future__ import annotations

import difflib
import enum
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .catalog import AmbiguousMatch, ApiCatalog, ApiDeclaration, MatchResult, Strength, match_invocation
from .dataflow import SlicedGraph, slice_for_call
from .source_model import parse
from .source_model.nodes import CLASS_DECL, METHOD_DECL, AstNode, ParseResult

log = logging.getLogger(__name__)

_SNAPSHOT_DIR = re.compile(r"^v\d+$")


class UnreadableSnapshot(OSError):
    def __init__(self, path: str | Path, reason: str = "unreadable"):
        super().__init__(f"{path}: {reason}")
        self.path = str(path)


class SourceKind(enum.Enum):
    SNAPSHOT_SEQUENCE = "SnapshotSequence"
    EXPLICIT_PAIR = "ExplicitPair"


class Provenance(enum.Enum):
    MINED = "Mined"
    USER_PROVIDED = "UserProvided"


@dataclass(frozen=True)
class ExampleSource:
    id: str
    versions: tuple[Mapping[str, str], ...]
    kind: SourceKind

    def __post_init__(self):
        if self.kind is SourceKind.EXPLICIT_PAIR and len(self.versions) != 2:
            raise ValueError("an explicit pair has exactly two versions")
        if self.kind is SourceKind.SNAPSHOT_SEQUENCE and len(self.versions) < 2:
            raise ValueError("a snapshot sequence needs at least two versions")

    @property
    def provenance(self) -> Provenance:
        if self.kind is SourceKind.EXPLICIT_PAIR:
            return Provenance.USER_PROVIDED
        return Provenance.MINED


@dataclass(frozen=True, eq=False)
class MigrationExample:
    api: ApiDeclaration
    source_id: str
    path: str
    version: int
    before: ParseResult = field(repr=False)
    before_call: AstNode
    after: ParseResult = field(repr=False)
    after_call: AstNode | None
    before_slice: SlicedGraph = field(repr=False)
    after_slice: SlicedGraph | None = field(repr=False)
    provenance: Provenance

    @property
    def id(self) -> str:
        return f"{self.source_id}@v{self.version}/{self.path}:{self.before_call.start}"


# -- loading ----------------------------------------------------------------


def _read_tree(root: Path) -> dict[str, str]:
    files: dict[str, str] = {}
    if not root.is_dir():
        raise UnreadableSnapshot(root, "not a directory")
    for path in sorted(root.rglob("*.java")):
        rel = path.relative_to(root).as_posix()
        try:
            files[rel] = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise UnreadableSnapshot(path, str(exc)) from exc
    return files


def is_example_source(root: Path) -> bool:
    if (root / "before").is_dir() and (root / "after").is_dir():
        return True
    return any(p.is_dir() and _SNAPSHOT_DIR.match(p.name) for p in root.iterdir())


def load_example_source(root: str | Path, source_id: str | None = None) -> ExampleSource:
    root = Path(root)
    sid = source_id or root.name
    try:
        if (root / "before").is_dir() and (root / "after").is_dir():
            versions = (_read_tree(root / "before"), _read_tree(root / "after"))
            return ExampleSource(sid, versions, SourceKind.EXPLICIT_PAIR)
        snaps = sorted(
            (p for p in root.iterdir() if p.is_dir() and _SNAPSHOT_DIR.match(p.name)),
            key=lambda p: int(p.name[1:]),
        )
    except OSError as exc:
        if isinstance(exc, UnreadableSnapshot):
            raise
        raise UnreadableSnapshot(root, str(exc)) from exc
    if len(snaps) < 2:
        raise UnreadableSnapshot(root, "expected before/after or at least two vNNN snapshots")
    return ExampleSource(sid, tuple(_read_tree(p) for p in snaps), SourceKind.SNAPSHOT_SEQUENCE)


def discover_sources(examples_root: str | Path) -> list[ExampleSource]:
    """Example sources under ``examples_root`` (or the root itself), sorted by id."""
    root = Path(examples_root)
    if not root.is_dir():
        raise UnreadableSnapshot(root, "examples root is not a directory")
    if is_example_source(root):
        return [load_example_source(root)]
    sources = []
    for child in sorted(p for p in root.iterdir() if p.is_dir()):
        if is_example_source(child):
            sources.append(load_example_source(child))
    return sources


# -- mining --------------------------------------------------------------------


def _name_pattern(names: Iterable[str]) -> re.Pattern | None:
    names = sorted(set(names))
    if not names:
        return None
    alternatives = "|".join(re.escape(n) for n in names)
    return re.compile(rf"(?<![A-Za-z0-9_$])(?:{alternatives})(?![A-Za-z0-9_$])")


def lexical_prefilter(files: Mapping[str, str], catalog: ApiCatalog) -> set[str]:
    """Paths whose raw text mentions a catalog method name at identifier boundaries."""
    pattern = _name_pattern(catalog.method_names)
    if pattern is None:
        return set()
    return {path for path, text in files.items() if pattern.search(text)}


def find_api_calls(file: ParseResult, catalog: ApiCatalog) -> list[tuple[AstNode, MatchResult]]:
    """Every invocation matching a catalog entry, in textual order.

    Ambiguous invocations are left out; callers that need them use
    :func:`match_invocation` directly.
    """
    hits = []
    names = catalog.method_names
    for call in file.invocations:
        if call.name not in names:
            continue
        try:
            result = match_invocation(catalog, call, file)
        except AmbiguousMatch:
            continue
        if result.strength is not Strength.NONE:
            hits.append((call, result))
    return hits


def _method_key(result: ParseResult, node: AstNode) -> tuple | None:
    method = result.enclosing(node, METHOD_DECL)
    if method is None:
        return None
    classes = [c.name for c in result.ancestors(method) if c.kind == CLASS_DECL]
    return (tuple(reversed(classes)), method.name, tuple(t for t, _ in method.params))


def _methods_by_key(result: ParseResult) -> dict[tuple, AstNode]:
    table = {}
    for node in result.ast.walk():
        if node.kind == METHOD_DECL:
            key = _method_key(result, node.children[0]) if node.children else None
            if key is None:
                classes = [c.name for c in result.ancestors(node) if c.kind == CLASS_DECL]
                key = (tuple(reversed(classes)), node.name, tuple(t for t, _ in node.params))
            table[key] = node
    return table


def _levenshtein(a: list, b: list) -> int:
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[-1]


def _slice_labels(sliced: SlicedGraph | None) -> list:
    if sliced is None:
        return []
    return [n.label for n in sliced.kept_nodes()]


def _slice_texts(sliced: SlicedGraph | None) -> list[str]:
    if sliced is None:
        return []
    return [n.normalized for n in sliced.kept_nodes()]


class _PositionMap:
    """Maps token positions of a before-method onto the after-method via a token diff."""

    def __init__(self, before: ParseResult, bm: AstNode, after: ParseResult, am: AstNode):
        self.b_toks = before.significant_tokens(bm.start, bm.end)
        self.a_toks = after.significant_tokens(am.start, am.end)
        matcher = difflib.SequenceMatcher(
            None, [t.text for t in self.b_toks], [t.text for t in self.a_toks], autojunk=False
        )
        self.blocks = matcher.get_matching_blocks()

    def index_of(self, toks, offset: int) -> int:
        for i, t in enumerate(toks):
            if t.start >= offset:
                return i
        return len(toks)

    def mapped(self, offset: int) -> int:
        i = self.index_of(self.b_toks, offset)
        best = 0
        for a, b, size in self.blocks:
            if a <= i < a + size:
                return b + (i - a)
            if a + size <= i:
                best = b + size + (i - a - size)
        return best

    def distance(self, b_offset: int, a_offset: int) -> int:
        return abs(self.mapped(b_offset) - self.index_of(self.a_toks, a_offset))


def _changed_files(before: Mapping[str, str], after: Mapping[str, str]) -> list[str]:
    changed = []
    for path in sorted(set(before) & set(after)):
        diff = difflib.unified_diff(
            before[path].splitlines(keepends=True), after[path].splitlines(keepends=True), n=0
        )
        if any(True for _ in diff):
            changed.append(path)
    return changed


def _successor_names(api: ApiDeclaration) -> set[str]:
    names = {api.method}
    if api.replacement is not None:
        names.add(api.replacement.method)
    return names


def mine_pair(
    source_id: str,
    version: int,
    before_files: Mapping[str, str],
    after_files: Mapping[str, str],
    catalog: ApiCatalog,
    provenance: Provenance,
) -> list[MigrationExample]:
    examples: list[MigrationExample] = []
    changed = _changed_files(before_files, after_files)
    candidates = lexical_prefilter({p: before_files[p] for p in changed}, catalog)
    for path in changed:
        if path not in candidates:
            continue
        before = parse(before_files[path], path=path)
        after = parse(after_files[path], path=path)
        examples.extend(_mine_file(source_id, version, path, before, after, catalog, provenance))
    return examples


def _mine_file(source_id, version, path, before, after, catalog, provenance) -> list[MigrationExample]:
    after_methods = _methods_by_key(after)
    by_method: dict[tuple, list[tuple[AstNode, ApiDeclaration]]] = {}
    for call, result in find_api_calls(before, catalog):
        if not result.matched.deprecated:
            continue
        key = _method_key(before, call)
        if key is None or key not in after_methods:
            continue
        by_method.setdefault(key, []).append((call, result.matched))

    examples = []
    for key, calls in by_method.items():
        bm = before.enclosing(calls[0][0], METHOD_DECL)
        am = after_methods[key]
        if before.text(bm) == after.text(am):
            continue
        positions = _PositionMap(before, bm, after, am)
        after_calls = [c for c in after.invocations if am.contains(c)]
        slices_b = {id(c): slice_for_call(before, c) for c, _ in calls}
        slices_a = {id(c): slice_for_call(after, c) for c in after_calls}

        scored = []
        for bi, (bc, api) in enumerate(calls):
            names = _successor_names(api)
            for ai, ac in enumerate(after_calls):
                if ac.name not in names:
                    continue
                distance = positions.distance(bc.start, ac.start)
                label_dist = _levenshtein(_slice_labels(slices_b[id(bc)]), _slice_labels(slices_a[id(ac)]))
                scored.append((distance, label_dist, bi, ai))
        scored.sort()
        paired: dict[int, int] = {}
        used: set[int] = set()
        for _, _, bi, ai in scored:
            if bi in paired or ai in used:
                continue
            paired[bi] = ai
            used.add(ai)

        for bi, (bc, api) in enumerate(calls):
            b_slice = slices_b[id(bc)]
            if b_slice is None:
                continue
            ac = after_calls[paired[bi]] if bi in paired else None
            a_slice = slices_a[id(ac)] if ac is not None else None
            if ac is not None:
                same_stmt = b_slice.focal_node.normalized == a_slice.focal_node.normalized
                if same_stmt and _slice_texts(b_slice) == _slice_texts(a_slice):
                    continue
            examples.append(
                MigrationExample(
                    api=api,
                    source_id=source_id,
                    path=path,
                    version=version,
                    before=before,
                    before_call=bc,
                    after=after,
                    after_call=ac,
                    before_slice=b_slice,
                    after_slice=a_slice,
                    provenance=provenance,
                )
            )
    examples.sort(key=lambda e: e.before_call.start)
    return examples


def mine_examples(source: ExampleSource, catalog: ApiCatalog) -> list[MigrationExample]:
    """Migration examples across every consecutive version pair of ``source``."""
    examples = []
    for version in range(len(source.versions) - 1):
        examples.extend(
            mine_pair(
                source.id,
                version,
                source.versions[version],
                source.versions[version + 1],
                catalog,
                source.provenance,
            )
        )
    examples.sort(key=lambda e: (e.source_id, e.version, e.path, e.before_call.start))
    return examples


def is_non_migration(example: MigrationExample, catalog: ApiCatalog) -> bool:
    if example.after_call is None:
        return False
    try:
        result = match_invocation(catalog, example.after_call, example.after)
    except AmbiguousMatch:
        return False
    return result.matched is not None and result.matched.key == example.api.key


def partition_non_migrations(
    examples: Iterable[MigrationExample], catalog: ApiCatalog
) -> tuple[list[MigrationExample], list[MigrationExample]]:
    kept, dropped = [], []
    for example in examples:
        if is_non_migration(example, catalog):
            log.info("NonMigration: %s still calls %s", example.id, example.api.signature)
            dropped.append(example)
        else:
            kept.append(example)
    return kept, dropped


def filter_non_migrations(examples: Iterable[MigrationExample], catalog: ApiCatalog) -> list[MigrationExample]:
    """Drop examples whose after-call still resolves to the same deprecated entry."""
    return partition_non_migrations(examples, catalog)[0]
