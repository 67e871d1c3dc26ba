from __future__ import annotations

from pathlib import Path

import pytest

from exmig.catalog import load_catalog
from exmig.learner import learn_all
from exmig.miner import load_example_source, mine_examples, partition_non_migrations

FIXTURES = Path(__file__).parent / "fixtures"

# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(FIXTURES / "catalog.json")


def learn_from(path: Path, catalog):
    """Mine, filter and learn patterns from one example source directory."""
    source = load_example_source(path)
    kept, _ = partition_non_migrations(mine_examples(source, catalog), catalog)
    mappings, _ = learn_all(kept)
    return mappings


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
