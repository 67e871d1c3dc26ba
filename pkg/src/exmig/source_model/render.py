from __future__ import annotations

from typing import Iterable

from .nodes import ParseResult

Edit = tuple[tuple[int, int], str]


class OverlappingEdits(ValueError):
    """Two span edits touch the same bytes; the mapping that produced them is faulty."""

    def __init__(self, first: Edit, second: Edit):
        super().__init__(f"edit {first[0]} overlaps edit {second[0]}")
        self.first = first
        self.second = second


def _overlaps(a: tuple[int, int], b: tuple[int, int]) -> bool:
    if a[0] == a[1] and b[0] == b[1]:
        return False
    if a[0] == a[1]:
        return b[0] < a[0] < b[1]
    if b[0] == b[1]:
        return a[0] < b[0] < a[1]
    return a[0] < b[1] and b[0] < a[1]


def check_edits(edits: Iterable[Edit], length: int) -> list[Edit]:
    """Validate and order edits; insertions sort before a span starting at the same offset."""
    ordered = sorted(edits, key=lambda e: (e[0][0], e[0][1]))
    for (start, end), _ in ordered:
        if not 0 <= start <= end <= length:
            raise ValueError(f"edit span {(start, end)} outside text of length {length}")
    for prev, cur in zip(ordered, ordered[1:]):
        if _overlaps(prev[0], cur[0]):
            raise OverlappingEdits(prev, cur)
    return ordered


def render(original: ParseResult | str, edits: Iterable[Edit] = ()) -> str:
    """Splice replacement texts into the original source.

    Bytes outside the edit spans are copied unchanged. Several insertions at
    the same offset keep their given order.
    """
    source = original.source if isinstance(original, ParseResult) else original
    ordered = check_edits(list(edits), len(source))
    out: list[str] = []
    pos = 0
    for (start, end), text in ordered:
        out.append(source[pos:start])
        out.append(text)
        pos = end
    out.append(source[pos:])
    return "".join(out)
