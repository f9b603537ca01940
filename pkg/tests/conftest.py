import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from subposet.core_family import Family  # noqa: E402

ACCEPTANCE_LINES = []


def random_family(rng, n, max_size):
    words = rng.sample(range(1 << n), rng.randint(0, min(max_size, 1 << n)))
    return Family.from_sets(n, words)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def acceptance_line():
    def record(name, ok, detail=""):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
