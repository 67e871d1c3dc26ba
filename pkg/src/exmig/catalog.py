"""Versioned API catalog and invocation matching.

The catalog file is a JSON array of objects with exactly the keys ``owner``,
``method``, ``paramTypes``, ``returnType``, ``introducedIn``,
``deprecatedIn`` and ``replacement``.
"""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .source_model.nodes import CLASS_DECL, METHOD_INVOCATION, NAME, AstNode, ParseResult
from .source_model.types import expression_type, qualify, simple_name, types_equal

CATALOG_KEYS = frozenset(
    {"owner", "method", "paramTypes", "returnType", "introducedIn", "deprecatedIn", "replacement"}
)
REPLACEMENT_KEYS = frozenset({"owner", "method", "paramTypes"})


class MalformedCatalog(ValueError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class DuplicateEntry(ValueError):
    def __init__(self, key: tuple):
        super().__init__(f"duplicate catalog entry {key}")
        self.key = key


class AmbiguousMatch(LookupError):
    def __init__(self, candidates: list["ApiDeclaration"]):
        names = ", ".join(c.signature for c in candidates)
        super().__init__(f"ambiguous API match: {names}")
        self.candidates = candidates


@dataclass(frozen=True)
class ApiRef:
    owner: str
    method: str
    param_types: tuple[str, ...]


@dataclass(frozen=True)
class ApiDeclaration:
    owner: str
    method: str
    param_types: tuple[str, ...]
    return_type: str
    introduced_in: int
    deprecated_in: int | None = None
    replacement: ApiRef | None = None

    @property
    def key(self) -> tuple[str, str, tuple[str, ...]]:
        return (self.owner, self.method, self.param_types)

    @property
    def arity(self) -> int:
        return len(self.param_types)

    @property
    def deprecated(self) -> bool:
        return self.deprecated_in is not None

    @property
    def signature(self) -> str:
        params = ", ".join(simple_name(p) for p in self.param_types)
        return f"{simple_name(self.owner)}.{self.method}({params})"

    def to_json(self) -> dict:
        return {
            "owner": self.owner,
            "method": self.method,
            "paramTypes": list(self.param_types),
            "returnType": self.return_type,
            "introducedIn": self.introduced_in,
            "deprecatedIn": self.deprecated_in,
            "replacement": None
            if self.replacement is None
            else {
                "owner": self.replacement.owner,
                "method": self.replacement.method,
                "paramTypes": list(self.replacement.param_types),
            },
        }


class Strength(enum.Enum):
    PERFECT = "Perfect"
    PARTIAL = "Partial"
    NONE = "None"

    def __ge__(self, other: "Strength") -> bool:
        order = [Strength.NONE, Strength.PARTIAL, Strength.PERFECT]
        return order.index(self) >= order.index(other)


@dataclass(frozen=True)
class MatchResult:
    strength: Strength
    matched: ApiDeclaration | None = None

    def __post_init__(self):
        if (self.strength is Strength.NONE) != (self.matched is None):
            raise ValueError("strength None iff no matched declaration")


NO_MATCH = MatchResult(Strength.NONE)


@dataclass(frozen=True)
class ApiCatalog:
    entries: frozenset[ApiDeclaration] = frozenset()
    version_range: tuple[int, int] | None = None
    _by_name: dict = field(default_factory=dict, compare=False, repr=False)

    @classmethod
    def from_entries(cls, entries: Iterable[ApiDeclaration]) -> "ApiCatalog":
        entries = list(entries)
        seen: set = set()
        by_name: dict[str, list[ApiDeclaration]] = {}
        versions: list[int] = []
        for entry in entries:
            if entry.key in seen:
                raise DuplicateEntry(entry.key)
            seen.add(entry.key)
            by_name.setdefault(entry.method, []).append(entry)
            versions.append(entry.introduced_in)
            if entry.deprecated_in is not None:
                versions.append(entry.deprecated_in)
        for group in by_name.values():
            group.sort(key=lambda e: (e.owner, e.arity, e.param_types))
        version_range = (min(versions), max(versions)) if versions else None
        return cls(frozenset(entries), version_range, by_name)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def method_names(self) -> frozenset[str]:
        return frozenset(self._by_name)

    def by_name(self, method: str) -> list[ApiDeclaration]:
        return self._by_name.get(method, [])

    def lookup(self, ref: ApiRef) -> ApiDeclaration | None:
        for entry in self.by_name(ref.method):
            if entry.owner == ref.owner and entry.param_types == ref.param_types:
                return entry
        return None

    def sorted_entries(self) -> list[ApiDeclaration]:
        return sorted(self.entries, key=lambda e: e.key)


def _iter_array(text: str):
    """Yield ``(line, value)`` for each element of a top-level JSON array."""
    decoder = json.JSONDecoder()
    idx = _skip_ws(text, 0)
    if idx >= len(text):
        return
    if text[idx] != "[":
        raise MalformedCatalog(_line(text, idx), "catalog must be a JSON array")
    idx = _skip_ws(text, idx + 1)
    if idx < len(text) and text[idx] == "]":
        _expect_end(text, idx + 1)
        return
    while True:
        try:
            value, end = decoder.raw_decode(text, idx)
        except json.JSONDecodeError as exc:
            raise MalformedCatalog(exc.lineno, exc.msg) from None
        yield _line(text, idx), value
        idx = _skip_ws(text, end)
        if idx >= len(text):
            raise MalformedCatalog(_line(text, idx), "unterminated array")
        if text[idx] == ",":
            idx = _skip_ws(text, idx + 1)
            continue
        if text[idx] == "]":
            _expect_end(text, idx + 1)
            return
        raise MalformedCatalog(_line(text, idx), "expected ',' or ']'")


def _skip_ws(text: str, idx: int) -> int:
    while idx < len(text) and text[idx] in " \t\r\n﻿":
        idx += 1
    return idx


def _line(text: str, idx: int) -> int:
    return text.count("\n", 0, idx) + 1


def _expect_end(text: str, idx: int) -> None:
    idx = _skip_ws(text, idx)
    if idx != len(text):
        raise MalformedCatalog(_line(text, idx), "trailing data after array")


def _string_list(value, line: int, key: str) -> tuple[str, ...]:
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise MalformedCatalog(line, f"{key} must be an array of strings")
    return tuple(value)


def _string(value, line: int, key: str) -> str:
    if not isinstance(value, str) or not value:
        raise MalformedCatalog(line, f"{key} must be a non-empty string")
    return value


def _version(value, line: int, key: str, optional: bool = False) -> int | None:
    if value is None and optional:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise MalformedCatalog(line, f"{key} must be an integer")
    return value


def parse_entry(obj, line: int = 0) -> ApiDeclaration:
    if not isinstance(obj, dict):
        raise MalformedCatalog(line, "entry must be an object")
    keys = set(obj)
    if keys != CATALOG_KEYS:
        unknown = sorted(keys - CATALOG_KEYS)
        missing = sorted(CATALOG_KEYS - keys)
        detail = "; ".join(
            part
            for part in (
                f"unknown keys {unknown}" if unknown else "",
                f"missing keys {missing}" if missing else "",
            )
            if part
        )
        raise MalformedCatalog(line, detail)
    introduced = _version(obj["introducedIn"], line, "introducedIn")
    deprecated = _version(obj["deprecatedIn"], line, "deprecatedIn", optional=True)
    if deprecated is not None and deprecated < introduced:
        raise MalformedCatalog(line, "deprecatedIn precedes introducedIn")
    replacement = obj["replacement"]
    ref = None
    if replacement is not None:
        if not isinstance(replacement, dict) or set(replacement) != REPLACEMENT_KEYS:
            raise MalformedCatalog(line, "replacement must be null or {owner, method, paramTypes}")
        ref = ApiRef(
            _string(replacement["owner"], line, "replacement.owner"),
            _string(replacement["method"], line, "replacement.method"),
            _string_list(replacement["paramTypes"], line, "replacement.paramTypes"),
        )
    return ApiDeclaration(
        owner=_string(obj["owner"], line, "owner"),
        method=_string(obj["method"], line, "method"),
        param_types=_string_list(obj["paramTypes"], line, "paramTypes"),
        return_type=_string(obj["returnType"], line, "returnType"),
        introduced_in=introduced,
        deprecated_in=deprecated,
        replacement=ref,
    )


def loads_catalog(text: str) -> ApiCatalog:
    entries: list[ApiDeclaration] = []
    seen: set = set()
    for line, obj in _iter_array(text):
        entry = parse_entry(obj, line)
        if entry.key in seen:
            raise DuplicateEntry(entry.key)
        seen.add(entry.key)
        entries.append(entry)
    return ApiCatalog.from_entries(entries)


def load_catalog(path: str | Path) -> ApiCatalog:
    text = Path(path).read_text(encoding="utf-8")
    return loads_catalog(text)


def dump_catalog(catalog: ApiCatalog) -> str:
    return json.dumps([e.to_json() for e in catalog.sorted_entries()], indent=2) + "\n"


# -- matching ---------------------------------------------------------------


def has_import_evidence(context: ParseResult, owner: str) -> bool:
    """True when an import (plain, wildcard or static) brings ``owner`` into scope."""
    package = owner.rsplit(".", 1)[0] if "." in owner else ""
    for imp in context.imports:
        path = imp.name or ""
        if path == owner:
            return True
        if path.endswith(".*") and path[:-2] in (package, owner):
            return True
        # Importing an outer class exposes its nested types.
        if owner.startswith(path + "."):
            return True
        if imp.role == "static" and path.rsplit(".", 1)[0] == owner:
            return True
    if package and context.ast.name == package:
        return True
    return False


class _Matcher:
    """Match invocations in one file; caches call return types for nesting."""

    def __init__(self, catalog: ApiCatalog, context: ParseResult):
        self.catalog = catalog
        self.context = context
        self._cache: dict[int, MatchResult | AmbiguousMatch] = {}

    def call_type(self, call: AstNode) -> str | None:
        try:
            result = self.match(call)
        except AmbiguousMatch:
            return None
        if result.matched is None:
            return None
        return result.matched.return_type

    def arg_type(self, arg: AstNode) -> str | None:
        return expression_type(self.context, arg, self.call_type)

    def receiver_type(self, call: AstNode) -> str | None:
        receiver = call.receiver
        if receiver is None:
            return None
        if receiver.kind == NAME:
            known = expression_type(self.context, receiver, self.call_type)
            if known is not None:
                return known
            name = receiver.name or ""
            # Unknown capitalised name: a static call on a type.
            if name[:1].isupper():
                return qualify(self.context, name)
            return None
        return expression_type(self.context, receiver, self.call_type)

    def owner_evidence(self, call: AstNode, entry: ApiDeclaration, receiver_type: str | None) -> bool:
        if receiver_type is not None:
            return types_equal(receiver_type, entry.owner)
        if has_import_evidence(self.context, entry.owner):
            return True
        if call.receiver is None:
            cls = self.context.enclosing(call, CLASS_DECL)
            while cls is not None:
                if types_equal(qualify(self.context, cls.name), entry.owner):
                    return True
                if cls.declared_type and types_equal(qualify(self.context, cls.declared_type), entry.owner):
                    return True
                cls = self.context.enclosing(cls, CLASS_DECL)
        return False

    def match(self, call: AstNode) -> MatchResult:
        cached = self._cache.get(id(call))
        if cached is not None:
            if isinstance(cached, AmbiguousMatch):
                raise cached
            return cached
        # Guard against cycles through nested calls.
        self._cache[id(call)] = NO_MATCH
        try:
            result = self._match(call)
        except AmbiguousMatch as exc:
            self._cache[id(call)] = exc
            raise
        self._cache[id(call)] = result
        return result

    def _match(self, call: AstNode) -> MatchResult:
        if call.kind != METHOD_INVOCATION:
            return NO_MATCH
        candidates = [e for e in self.catalog.by_name(call.name or "") if e.arity == len(call.args)]
        if not candidates:
            return NO_MATCH
        receiver_type = self.receiver_type(call)
        arg_types = [self.arg_type(a) for a in call.args]
        perfect: list[ApiDeclaration] = []
        partial: list[ApiDeclaration] = []
        for entry in candidates:
            if not self.owner_evidence(call, entry, receiver_type):
                continue
            mismatch = False
            unresolved = False
            for actual, declared in zip(arg_types, entry.param_types):
                if actual is None:
                    unresolved = True
                elif not _assignable(actual, declared):
                    mismatch = True
                    break
            if mismatch:
                continue
            (partial if unresolved else perfect).append(entry)
        if len(perfect) > 1:
            raise AmbiguousMatch(perfect)
        if perfect:
            return MatchResult(Strength.PERFECT, perfect[0])
        if len(partial) > 1:
            raise AmbiguousMatch(partial)
        if partial:
            return MatchResult(Strength.PARTIAL, partial[0])
        return NO_MATCH


def _assignable(actual: str, declared: str) -> bool:
    return types_equal(actual, declared)


_MATCHERS: "dict[tuple[int, int], _Matcher]" = {}


def matcher_for(catalog: ApiCatalog, context: ParseResult) -> _Matcher:
    key = (id(catalog), id(context))
    matcher = _MATCHERS.get(key)
    if matcher is None or matcher.catalog is not catalog or matcher.context is not context:
        if len(_MATCHERS) > 256:
            _MATCHERS.clear()
        matcher = _Matcher(catalog, context)
        _MATCHERS[key] = matcher
    return matcher


def match_invocation(catalog: ApiCatalog, call: AstNode, context: ParseResult) -> MatchResult:
    """Match one MethodInvocation against the catalog.

    Perfect: owner evidence, name, arity and every argument type resolved
    and equal. Partial: owner evidence, name and arity, some argument type
    unresolvable. Raises :class:`AmbiguousMatch` when several entries tie at
    the best strength.
    """
    return matcher_for(catalog, context).match(call)


def call_return_type(catalog: ApiCatalog, context: ParseResult):
    """Callback for :func:`expression_type` resolving calls through the catalog."""
    return matcher_for(catalog, context).call_type
