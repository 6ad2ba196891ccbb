import random
from fractions import Fraction

import pytest

from mmdesign.tensor import as_matrix

_criteria: list[tuple[int, str, str, float]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark and rep.when == "call":
        num, title = mark.args
        _criteria.append((num, title, "PASS" if rep.passed else "FAIL", rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num, title, status, dur in sorted(_criteria):
        terminalreporter.write_line(f"criterion {num}: {status}  {title}  ({dur:.2f}s)")


def rational_matrix(rng: random.Random, n: int):
    return as_matrix([[Fraction(rng.randint(-9, 9), rng.choice((1, 2, 3))) for _ in range(n)] for _ in range(n)], exact=True)


@pytest.fixture
def rng():
    return random.Random(20190517)
