from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from qlocal.catalog import alternating_group, symmetric_group  # noqa: E402
from qlocal.group import PermGroup  # noqa: E402
from qlocal.selftest import corpus_group  # noqa: E402


def G(*cycles: str, n: int) -> PermGroup:
    return PermGroup.from_cycles(list(cycles), n)


@pytest.fixture(scope="session")
def corpus():
    """Corpus groups, built once per session."""
    return corpus_group


@pytest.fixture(scope="session")
def s3():
    return symmetric_group(3)


@pytest.fixture(scope="session")
def a5():
    return alternating_group(5)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[number])
