from __future__ import annotations

import hashlib
import shutil

import pytest
from conftest import FIXTURES

from exmig.cli import main

CATALOG = str(FIXTURES / "catalog.json")


def tree_digest(root):
    h = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            h.update(p.relative_to(root).as_posix().encode())
            h.update(p.read_bytes())
    return h.hexdigest()


@pytest.fixture
def workspace(tmp_path):
    shutil.copytree(FIXTURES / "getcolor" / "example", tmp_path / "examples")
    shutil.copytree(FIXTURES / "getcolor" / "target", tmp_path / "target")
    shutil.copytree(FIXTURES / "unsupported" / "if_condition", tmp_path / "target" / "more")
    return tmp_path


def mine(ws, capsys):
    store = ws / "patterns.json"
    code = main(["mine", "--catalog", CATALOG, "--examples", str(ws / "examples"), "--patterns", str(store)])
    return code, store, capsys.readouterr().out


def test_mine_prints_counts(workspace, capsys):
    code, store, out = mine(workspace, capsys)
    assert code == 0 and store.exists()
    assert "patterns found: 1" in out
    assert "non-migrations filtered: 0" in out
    assert "empty patterns discarded: 0" in out


def test_mine_writes_non_migration_records(tmp_path, capsys):
    report = tmp_path / "nm.jsonl"
    code = main([
        "mine", "--catalog", CATALOG, "--examples", str(FIXTURES / "rename_only"),
        "--patterns", str(tmp_path / "p.json"), "--report", str(report),
    ])
    assert code == 0
    assert "non-migrations filtered: 1" in capsys.readouterr().out
    assert main(["report", "--report", str(report)]) == 0
    line = next(l for l in capsys.readouterr().out.splitlines() if l.startswith("Ex. was not a migration"))
    assert line.split()[-1] == "1"


def test_bad_catalog_exits_2(tmp_path, capsys):
    bad = tmp_path / "c.json"
    bad.write_text('[{"owner": 1}]')
    assert main(["mine", "--catalog", str(bad), "--examples", str(FIXTURES / "corpus"), "--patterns", str(tmp_path / "p")]) == 2
    assert "error" in capsys.readouterr().err


def test_unreadable_examples_exit_3(tmp_path):
    assert main(["mine", "--catalog", CATALOG, "--examples", str(tmp_path / "gone"), "--patterns", str(tmp_path / "p")]) == 3


def test_dry_run_changes_nothing(workspace, capsys):
    _, store, _ = mine(workspace, capsys)
    before = tree_digest(workspace / "target")
    code = main(["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target")])
    out = capsys.readouterr().out
    assert tree_digest(workspace / "target") == before
    # the if-condition call is Unsupported, so the run needs attention
    assert code == 1
    assert "+            badgeColor = resources.getColor(R.color.badge_highlight, null);" in out
    assert "\x1b[" not in out


def test_in_place_writes_and_reports(workspace, capsys):
    _, store, _ = mine(workspace, capsys)
    report = workspace / "out.jsonl"
    args = ["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target")]
    assert main(args + ["--in-place", "--report", str(report)]) == 1
    migrated = (workspace / "target" / "BadgeView.java").read_text()
    assert migrated == (FIXTURES / "getcolor" / "expected" / "BadgeView.java").read_text()
    capsys.readouterr()
    assert main(["report", "--report", str(report)]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[1].split()[-1] == "1"  # Faultless migration
    assert out.splitlines()[6].split()[-1] == "1"  # Unsupported cases


def test_interactive_needs_a_terminal(workspace, capsys):
    _, store, _ = mine(workspace, capsys)
    args = ["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target"), "--interactive"]
    assert main(args) == 2


def test_corrupt_store_exits_2(workspace, tmp_path):
    store = tmp_path / "bad.json"
    store.write_text("{")
    assert main(["scan", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target")]) == 2


def test_missing_report_exits_2(tmp_path):
    assert main(["report", "--report", str(tmp_path / "none.jsonl")]) == 2


def test_scan_lists_candidates(workspace, capsys):
    _, store, _ = mine(workspace, capsys)
    assert main(["scan", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target")]) == 0
    out = capsys.readouterr().out
    assert "BadgeView.java:12:" in out and "[supported]" in out
    assert "[unsupported (ConditionHeader)]" in out
    assert "candidates: 2" in out


def test_write_failure_exits_4(workspace, capsys, monkeypatch):
    _, store, _ = mine(workspace, capsys)
    before = tree_digest(workspace / "target")

    def refuse(path, text):
        raise PermissionError(13, "read-only", str(path))

    monkeypatch.setattr("exmig.cli.atomic_write", refuse)
    code = main(["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target"), "--in-place"])
    assert code == 4
    assert tree_digest(workspace / "target") == before
    assert "error: writing" in capsys.readouterr().err


def test_report_bytes_are_deterministic(workspace, capsys):
    _, store, _ = mine(workspace, capsys)
    args = ["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(workspace / "target")]
    main(args + ["--report", str(workspace / "one.jsonl")])
    main(args + ["--report", str(workspace / "two.jsonl")])
    assert (workspace / "one.jsonl").read_bytes() == (workspace / "two.jsonl").read_bytes()


def test_empty_examples_give_empty_store(tmp_path, capsys):
    (tmp_path / "ex").mkdir()
    store = tmp_path / "p.json"
    assert main(["mine", "--catalog", CATALOG, "--examples", str(tmp_path / "ex"), "--patterns", str(store)]) == 0
    assert store.read_text().strip() == "[]"
    assert "patterns found: 0" in capsys.readouterr().out


def test_no_matching_calls_is_clean(workspace, tmp_path, capsys):
    _, store, _ = mine(workspace, capsys)
    quiet = tmp_path / "quiet"
    quiet.mkdir()
    (quiet / "Plain.java").write_text("class Plain { int f() { return 1; } }\n")
    report = tmp_path / "r.jsonl"
    assert main(["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(quiet), "--report", str(report)]) == 0
    assert report.read_text() == ""


def test_interactive_selection(workspace, capsys, monkeypatch):
    _, store, _ = mine(workspace, capsys)
    monkeypatch.setattr("sys.stdin.isatty", lambda: True)
    answers = iter(["7", "1"])
    monkeypatch.setattr("builtins.input", lambda prompt="": next(answers))
    target = workspace / "target" / "BadgeView.java"
    args = ["apply", "--catalog", CATALOG, "--patterns", str(store), "--target", str(target), "--interactive"]
    assert main(args) == 0
    out = capsys.readouterr().out
    assert "[1] pattern examples@v0/ColorUtil.java:" in out and "(source: UserProvided)" in out
    assert target.read_text() == (FIXTURES / "getcolor" / "expected" / "BadgeView.java").read_text()


def test_corpus_pattern_count_matches_hand_count(tmp_path, capsys):
    # weather-app 3, music-player 3, net-probe 2; the Units.java edit has no API call
    store = tmp_path / "p.json"
    assert main(["mine", "--catalog", CATALOG, "--examples", str(FIXTURES / "corpus"), "--patterns", str(store)]) == 0
    assert "patterns found: 8" in capsys.readouterr().out
