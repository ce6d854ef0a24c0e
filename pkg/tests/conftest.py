import random

import pytest

from phyloconsensus.tree import TreeSet, parse_newick

ACCEPTANCE_LINES: list[str] = []


def ts_of(*texts: str) -> TreeSet:
    return TreeSet(parse_newick(t) for t in texts)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
