"""Pattern store: a JSON array of learned mappings.

Each entry carries the documented keys (``api``, ``sourceId``,
``beforeSnippet``, ``afterSnippet``, ``pairings``, ``newNodes``,
``removesCall``) plus the example's file texts and call offsets, from which
the slices are rebuilt on load.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .catalog import MalformedCatalog, parse_entry
from .dataflow import SlicedGraph, slice_for_call
from .learner import MigrationMapping, NewNode, NodePairing, TokenEdit
from .source_model import parse


class CorruptPatternStore(ValueError):
    pass


def _file_json(result, call) -> dict | None:
    if result is None or call is None:
        return None
    return {"path": result.path, "text": result.source, "focalOffset": call.start, "focalEnd": call.end}


def mapping_to_json(m: MigrationMapping) -> dict:
    after_snippet = None
    if m.after_pattern is not None:
        after_snippet = m.after_pattern.focal_node.text
    return {
        "api": m.api.to_json(),
        "sourceId": m.source_id,
        "patternId": m.pattern_id,
        "provenance": m.provenance,
        "beforeSnippet": m.before_pattern.focal_node.text,
        "afterSnippet": after_snippet,
        "pairings": [
            {
                "beforeIdx": p.before_id,
                "afterIdx": p.after_id,
                "similarity": p.similarity,
                "edits": [e.to_json() for e in p.edits],
            }
            for p in m.pairings
        ],
        "newNodes": [
            {"afterIdx": n.after_id, "text": n.text, "defines": [{"name": a, "type": t} for a, t in n.defines]}
            for n in m.new_nodes
        ],
        "removesCall": m.removes_call,
        "unmatchedBefore": list(m.unmatched_before),
        "beforeKept": sorted(m.before_pattern.kept),
        "afterKept": sorted(m.after_pattern.kept) if m.after_pattern is not None else None,
        "before": _file_json(m.before, m.before_call),
        "after": _file_json(m.after, m.after_call),
    }


def _rebuild(side: dict | None):
    if side is None:
        return None, None, None
    result = parse(side["text"], path=side.get("path"))
    start, end = int(side["focalOffset"]), side.get("focalEnd")
    call = next(
        (c for c in result.invocations if c.start == start and (end is None or c.end == int(end))),
        None,
    )
    if call is None:
        raise CorruptPatternStore(f"no call at offset {side['focalOffset']} in {side.get('path')}")
    sliced = slice_for_call(result, call)
    if sliced is None:
        raise CorruptPatternStore(f"call at {side['focalOffset']} is not inside a method")
    return result, call, sliced


def mapping_from_json(obj: dict) -> MigrationMapping:
    try:
        api = parse_entry(obj["api"])
        before, before_call, b_slice = _rebuild(obj["before"])
        after, after_call, a_slice = _rebuild(obj.get("after"))
        before_pattern = SlicedGraph(b_slice.base, frozenset(obj["beforeKept"]), b_slice.focal)
        after_pattern = None
        if a_slice is not None and obj.get("afterKept") is not None:
            after_pattern = SlicedGraph(a_slice.base, frozenset(obj["afterKept"]), a_slice.focal)
        pairings = tuple(
            NodePairing(
                int(p["beforeIdx"]),
                int(p["afterIdx"]),
                float(p.get("similarity", 1.0)),
                tuple(TokenEdit.from_json(e) for e in p["edits"]),
            )
            for p in obj["pairings"]
        )
        new_nodes = tuple(
            NewNode(int(n["afterIdx"]), n["text"], tuple((d["name"], d.get("type")) for d in n.get("defines", ())))
            for n in obj["newNodes"]
        )
        return MigrationMapping(
            api=api,
            pairings=pairings,
            new_nodes=new_nodes,
            before_pattern=before_pattern,
            after_pattern=after_pattern,
            removes_call=bool(obj["removesCall"]),
            before=before,
            before_call=before_call,
            after=after,
            after_call=after_call,
            unmatched_before=tuple(obj.get("unmatchedBefore", ())),
            source_id=obj.get("sourceId", ""),
            pattern_id=obj.get("patternId", ""),
            provenance=obj.get("provenance", "Mined"),
        )
    except (KeyError, TypeError, ValueError, MalformedCatalog) as exc:
        if isinstance(exc, CorruptPatternStore):
            raise
        raise CorruptPatternStore(f"bad pattern entry: {exc}") from exc


def dumps_patterns(mappings: Iterable[MigrationMapping]) -> str:
    return json.dumps([mapping_to_json(m) for m in mappings], indent=2, ensure_ascii=False) + "\n"


def loads_patterns(text: str) -> list[MigrationMapping]:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptPatternStore(str(exc)) from exc
    if not isinstance(data, list):
        raise CorruptPatternStore("pattern store must be a JSON array")
    return [mapping_from_json(obj) for obj in data]


def save_patterns(mappings: Iterable[MigrationMapping], path: str | Path) -> None:
    Path(path).write_text(dumps_patterns(mappings), encoding="utf-8")


def load_patterns(path: str | Path) -> list[MigrationMapping]:
    return loads_patterns(Path(path).read_text(encoding="utf-8"))
