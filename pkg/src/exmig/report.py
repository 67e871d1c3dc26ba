"""Outcome records (JSON lines) and the summary table built from them."""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

ROWS = (
    "Faultless migration",
    "Migrated with minor mod.",
    "Unmatched guidance",
    "False positive",
    "Ex. was not a migration",
    "Unsupported cases",
)

NON_MIGRATION = "NonMigration"


class CorruptReport(ValueError):
    pass


def row_of(record: dict) -> int:
    outcome = record.get("outcome")
    if outcome == "Applied":
        return 1 if record.get("unresolvedNames") else 0
    if outcome == "Guidance":
        return 2
    if outcome == NON_MIGRATION:
        return 4
    if outcome == "Unsupported":
        return 5
    raise CorruptReport(f"unknown outcome {outcome!r}")


@dataclass
class Summary:
    sources: list[str]
    counts: dict[str, list[int]]
    tokens: list[int]

    def totals(self) -> tuple[int, ...]:
        return tuple(sum(self.counts[s][i] for s in self.sources) for i in range(len(ROWS)))

    @property
    def token_stats(self) -> tuple[int, float, int] | None:
        if not self.tokens:
            return None
        return min(self.tokens), sum(self.tokens) / len(self.tokens), max(self.tokens)


def classify_outcome(records: Iterable[dict]) -> Summary:
    """Count records into the row taxonomy, one column per pattern source."""
    counts: dict[str, list[int]] = {}
    tokens: list[int] = []
    for record in records:
        source = record.get("source") or "Unknown"
        column = counts.setdefault(source, [0] * len(ROWS))
        column[row_of(record)] += 1
        if record.get("outcome") == "Applied":
            tokens.append(int(record.get("tokensChanged", 0)))
    return Summary(sorted(counts), counts, tokens)


def render_table(summary: Summary) -> str:
    sources = summary.sources or ["Total"]
    width = max(len(r) for r in ROWS)
    header = "".ljust(width) + "".join(f"  {s:>12}" for s in sources)
    if summary.sources:
        header += f"  {'Total':>12}"
    lines = [header]
    totals = summary.totals() if summary.sources else (0,) * len(ROWS)
    for i, row in enumerate(ROWS):
        cells = [summary.counts[s][i] for s in summary.sources] if summary.sources else []
        line = row.ljust(width) + "".join(f"  {c:>12}" for c in cells) + f"  {totals[i]:>12}"
        lines.append(line)
    stats = summary.token_stats
    if stats is None:
        lines.append("tokens changed: n/a")
    else:
        lines.append(f"tokens changed: min {stats[0]}  avg {stats[1]:.2f}  max {stats[2]}")
    return "\n".join(lines) + "\n"


def dump_records(records: Iterable[dict]) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in records)


def load_records(path: str | Path) -> list[dict]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise CorruptReport(f"cannot read report {path}: {exc}") from exc
    records = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorruptReport(f"line {lineno}: {exc}") from exc
        if not isinstance(record, dict) or "outcome" not in record:
            raise CorruptReport(f"line {lineno}: not an outcome record")
        row_of(record)
        records.append(record)
    return records
