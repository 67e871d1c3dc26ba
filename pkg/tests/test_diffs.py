from __future__ import annotations

import os

import pytest
from hypothesis import given
from hypothesis import strategies as st

from exmig.diffs import atomic_write, count_token_changes, unified_diff


@pytest.mark.parametrize(
    "old,new,count",
    [
        ("f(a);", "f(a);", 0),
        ("f(a);", "f(a, null);", 2),
        ("f(a);", "g(a);", 1),
        ("x.f(a);", "f(a);", 2),
        ("f(a /* c */);", "f(a);", 0),
        ("a b c", "x y", 3),
    ],
)
def test_count_token_changes(old, new, count):
    assert count_token_changes(old, new) == count


words = st.lists(st.sampled_from(["a", "b", "(", ")", ";", "1"]), max_size=12).map(" ".join)


@given(words, words)
def test_count_is_bounded(old, new):
    n = count_token_changes(old, new)
    la, lb = len(old.split()), len(new.split())
    assert abs(la - lb) <= n <= la + lb
    assert (n == 0) == (old.split() == new.split())


def test_unified_diff_headers():
    d = unified_diff("a\nb\n", "a\nc\n", "x/Y.java")
    assert d.splitlines()[:2] == ["--- a/x/Y.java", "+++ b/x/Y.java"]
    assert "-b" in d and "+c" in d
    assert unified_diff("same\n", "same\n", "f") == ""


def test_atomic_write_keeps_mode(tmp_path):
    target = tmp_path / "A.java"
    target.write_text("old")
    target.chmod(0o640)
    atomic_write(target, "new")
    assert target.read_text() == "new"
    assert target.stat().st_mode & 0o777 == 0o640
    assert os.listdir(tmp_path) == ["A.java"]
