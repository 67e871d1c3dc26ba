"""Command-line entry point: mine, scan, apply, report."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .catalog import DuplicateEntry, MalformedCatalog, load_catalog
from .diffs import atomic_write, unified_diff
from .learner import LearnerConfig, learn_all
from .migrator import OutcomeKind, check_supported, migrate_file, search_candidates
from .miner import UnreadableSnapshot, discover_sources, mine_examples, partition_non_migrations
from .report import NON_MIGRATION, CorruptReport, classify_outcome, dump_records, load_records, render_table
from .source_model import parse
from .store import CorruptPatternStore, load_patterns, save_patterns

log = logging.getLogger("exmig")

EXIT_OK = 0
EXIT_ATTENTION = 1
EXIT_BAD_INPUT = 2
EXIT_UNREADABLE = 3
EXIT_WRITE_FAILED = 4


@dataclass
class RunConfig:
    command: str
    catalog_path: Path | None = None
    examples_root: Path | None = None
    patterns_path: Path | None = None
    target_root: Path | None = None
    mode: str = "dry-run"
    similarity_threshold: float = 0.5
    output_path: Path | None = None

    def __post_init__(self):
        if self.mode not in ("dry-run", "in-place", "interactive"):
            raise ValueError(f"unknown mode {self.mode}")


def _color_enabled() -> bool:
    return not os.environ.get("A4_NO_COLOR") and sys.stdout.isatty()


def _colorize(diff: str) -> str:
    if not _color_enabled():
        return diff
    out = []
    for line in diff.splitlines(keepends=True):
        if line.startswith("+") and not line.startswith("+++"):
            out.append(f"\x1b[32m{line.rstrip(chr(10))}\x1b[0m\n")
        elif line.startswith("-") and not line.startswith("---"):
            out.append(f"\x1b[31m{line.rstrip(chr(10))}\x1b[0m\n")
        elif line.startswith("@@"):
            out.append(f"\x1b[36m{line.rstrip(chr(10))}\x1b[0m\n")
        else:
            out.append(line)
    return "".join(out)


def target_files(root: Path) -> list[tuple[str, Path]]:
    """``(report path, file path)`` for every Java file under ``root``."""
    if root.is_file():
        return [(root.name, root)]
    return [(p.relative_to(root).as_posix(), p) for p in sorted(root.rglob("*.java"))]


def _line_col(text: str, offset: int) -> tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    col = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, col


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


# -- commands ------------------------------------------------------------------


def cmd_mine(config: RunConfig) -> int:
    try:
        catalog = load_catalog(config.catalog_path)
    except (MalformedCatalog, DuplicateEntry, OSError) as exc:
        _err(f"catalog: {exc}")
        return EXIT_BAD_INPUT
    try:
        sources = discover_sources(config.examples_root)
        examples = [e for s in sources for e in mine_examples(s, catalog)]
    except UnreadableSnapshot as exc:
        _err(str(exc))
        return EXIT_UNREADABLE
    kept, dropped = partition_non_migrations(examples, catalog)
    mappings, empty = learn_all(kept, LearnerConfig(threshold=config.similarity_threshold))
    save_patterns(mappings, config.patterns_path)
    if config.output_path is not None:
        records = [
            {
                "file": e.path,
                "offset": e.before_call.start,
                "api": e.api.signature,
                "patternId": e.id,
                "source": e.provenance.value,
                "outcome": NON_MIGRATION,
                "reason": NON_MIGRATION,
                "tokensChanged": 0,
                "unresolvedNames": [],
            }
            for e in dropped
        ]
        Path(config.output_path).write_text(dump_records(records), encoding="utf-8")
    print(f"patterns found: {len(mappings)}")
    print(f"non-migrations filtered: {len(dropped)}")
    print(f"empty patterns discarded: {len(empty)}")
    return EXIT_OK


def _load_apply_inputs(config: RunConfig):
    catalog = load_catalog(config.catalog_path)
    patterns = load_patterns(config.patterns_path)
    if config.target_root is None or not config.target_root.exists():
        raise FileNotFoundError(f"target {config.target_root} does not exist")
    return catalog, patterns


def cmd_scan(config: RunConfig) -> int:
    try:
        catalog, patterns = _load_apply_inputs(config)
    except (MalformedCatalog, DuplicateEntry, CorruptPatternStore, OSError) as exc:
        _err(str(exc))
        return EXIT_BAD_INPUT
    count = 0
    for rel, path in target_files(config.target_root):
        text = path.read_text(encoding="utf-8")
        result = parse(text, path=rel)
        for pattern in patterns:
            search = search_candidates(result, pattern, catalog, rel)
            for cand in search.candidates:
                line, col = _line_col(text, cand.focal.start)
                reason = check_supported(cand)
                status = "supported" if reason is None else f"unsupported ({reason.value})"
                print(f"{rel}:{line}:{col}: {pattern.api.signature} via {pattern.pattern_id} [{status}]")
                count += 1
            for call in search.unmatched:
                line, col = _line_col(text, call.start)
                print(f"{rel}:{line}:{col}: {pattern.api.signature} via {pattern.pattern_id} [no data-flow match]")
    print(f"candidates: {count}")
    return EXIT_OK


def _interactive_chooser(text: str, rel: str):
    def choose(attempts):
        options = attempts.applied
        line, col = _line_col(text, attempts.call.start)
        print(f"\n{rel}:{line}:{col}: {options[0].api}")
        for i, o in enumerate(options, 1):
            print(f"[{i}] pattern {o.pattern_id} (source: {o.source})")
            print(_colorize(o.edits or ""))
        while True:
            answer = input(f"choose 1-{len(options)} or s to skip: ").strip().lower()
            if answer == "s":
                return None
            if answer.isdigit() and 1 <= int(answer) <= len(options):
                return options[int(answer) - 1]

    return choose


def cmd_apply(config: RunConfig) -> int:
    if config.mode == "interactive" and not sys.stdin.isatty():
        _err("--interactive needs a terminal")
        return EXIT_BAD_INPUT
    try:
        catalog, patterns = _load_apply_inputs(config)
    except (MalformedCatalog, DuplicateEntry, CorruptPatternStore, OSError) as exc:
        _err(str(exc))
        return EXIT_BAD_INPUT

    records: list[dict] = []
    rewrites: list[tuple[Path, str]] = []
    for rel, path in target_files(config.target_root):
        text = path.read_text(encoding="utf-8")
        result = parse(text, path=rel)
        chooser = _interactive_chooser(text, rel) if config.mode == "interactive" else None
        outcomes, new_text = migrate_file(result, patterns, catalog, rel, chooser)
        records.extend(o.to_record() for o in outcomes)
        if new_text != text:
            if config.mode == "dry-run":
                print(_colorize(unified_diff(text, new_text, rel)), end="")
            rewrites.append((path, new_text))

    if config.mode != "dry-run":
        for path, new_text in rewrites:
            try:
                atomic_write(path, new_text)
            except OSError as exc:
                _err(f"writing {path}: {exc}")
                return EXIT_WRITE_FAILED
    if config.output_path is not None:
        try:
            atomic_write(config.output_path, dump_records(records))
        except OSError as exc:
            _err(f"writing report: {exc}")
            return EXIT_WRITE_FAILED
    print(render_table(classify_outcome(records)), end="")
    print(f"candidates: {len(records)}")
    if any(r["outcome"] != OutcomeKind.APPLIED.value for r in records):
        return EXIT_ATTENTION
    return EXIT_OK


def cmd_report(config: RunConfig) -> int:
    try:
        records = load_records(config.output_path)
    except CorruptReport as exc:
        _err(str(exc))
        return EXIT_BAD_INPUT
    print(render_table(classify_outcome(records)), end="")
    return EXIT_OK


# -- argument parsing ------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="exmig", description="Learn API migrations from examples and apply them.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    mine = sub.add_parser("mine", help="learn migration patterns from example sources")
    mine.add_argument("--catalog", required=True, type=Path)
    mine.add_argument("--examples", required=True, type=Path)
    mine.add_argument("--patterns", default=Path("patterns.json"), type=Path, help="pattern store to write")
    mine.add_argument("--threshold", default=0.5, type=float, help="node pairing similarity threshold")
    mine.add_argument("--report", type=Path, help="write filtered non-migrations as report records")

    for name, help_text in (("scan", "list migration candidates"), ("apply", "rewrite migration candidates")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--catalog", required=True, type=Path)
        p.add_argument("--patterns", required=True, type=Path)
        p.add_argument("--target", required=True, type=Path)
        if name == "apply":
            mode = p.add_mutually_exclusive_group()
            mode.add_argument("--dry-run", dest="mode", action="store_const", const="dry-run")
            mode.add_argument("--in-place", dest="mode", action="store_const", const="in-place")
            mode.add_argument("--interactive", dest="mode", action="store_const", const="interactive")
            p.add_argument("--report", type=Path, help="JSON lines report to write")
            p.set_defaults(mode="dry-run")

    report = sub.add_parser("report", help="summarize an apply report")
    report.add_argument("--report", required=True, type=Path)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        catalog_path=getattr(args, "catalog", None),
        examples_root=getattr(args, "examples", None),
        patterns_path=getattr(args, "patterns", None),
        target_root=getattr(args, "target", None),
        mode=getattr(args, "mode", "dry-run") or "dry-run",
        similarity_threshold=getattr(args, "threshold", 0.5),
        output_path=getattr(args, "report", None),
    )


COMMANDS = {"mine": cmd_mine, "scan": cmd_scan, "apply": cmd_apply, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    config = config_from_args(args)
    return COMMANDS[config.command](config)


if __name__ == "__main__":
    sys.exit(main())
