"""Unified diffs, token-change counting and atomic file replacement."""
from __future__ import annotations

import difflib
import os
import tempfile
from pathlib import Path

from .source_model.lexer import tokenize


def significant_texts(text: str) -> list[str]:
    return [t.text for t in tokenize(text) if not t.is_trivia]


def count_token_changes(old: str, new: str) -> int:
    """Tokens replaced, inserted or deleted between two fragments.

    A replaced run of ``a`` old tokens by ``b`` new ones counts ``max(a, b)``.
    """
    a, b = significant_texts(old), significant_texts(new)
    total = 0
    for op, i1, i2, j1, j2 in difflib.SequenceMatcher(None, a, b, autojunk=False).get_opcodes():
        if op == "replace":
            total += max(i2 - i1, j2 - j1)
        elif op == "insert":
            total += j2 - j1
        elif op == "delete":
            total += i2 - i1
    return total


def unified_diff(old: str, new: str, path: str) -> str:
    lines = difflib.unified_diff(
        old.splitlines(keepends=True),
        new.splitlines(keepends=True),
        fromfile=f"a/{path}",
        tofile=f"b/{path}",
    )
    out = []
    for line in lines:
        out.append(line if line.endswith("\n") else line + "\n\\ No newline at end of file\n")
    return "".join(out)


def atomic_write(path: str | Path, text: str) -> None:
    """Replace ``path`` in one step; on failure the original stays intact."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        mode = path.stat().st_mode & 0o777 if path.exists() else None
        if mode is not None:
            os.chmod(tmp, mode)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
