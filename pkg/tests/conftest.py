import random
import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

from rangersat.cnf import Formula, make_clause  # noqa: E402

DATA = TESTS / "data"


def random_formula(rng, n, m, max_width=3, min_width=1):
    clauses = []
    for _ in range(m):
        width = rng.randint(min_width, min(max_width, n))
        vs = rng.sample(range(1, n + 1), width)
        clauses.append(make_clause(v if rng.random() < 0.5 else -v for v in vs))
    return Formula(clauses, n)


def random_3sat(rng, n, ratio):
    return random_formula(rng, n, max(1, round(ratio * n)), 3, 3)


@pytest.fixture
def rng():
    return random.Random(12345)


# EXAMPLE_1: every (x1, x2) probe forces x3.  EXAMPLE_2: x2 fails both ways.
EXAMPLE_1 = Formula([(1, 2, 3), (1, -2, 3), (-1, 3), (3, -4)], 4)
EXAMPLE_2 = Formula([(1, 2), (-1, 2), (-2, 3), (-2, -3)], 3)


# --- acceptance reporting ------------------------------------------------

_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    ok = report.passed if report.when == "call" else not report.failed
    prev = _criteria.get(marker, True)
    _criteria[marker] = prev and ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m is not None:
        report.criterion = m.args


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, title), ok in sorted(_criteria.items()):
        terminalreporter.write_line(f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}")
