import random

import pytest
from hypothesis import settings

from roabp_order.ffield import PrimeField

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_criteria: dict[str, tuple[str, str]] = {}


@pytest.fixture
def big_field():
    return PrimeField()


@pytest.fixture
def small_field():
    return PrimeField(101)


@pytest.fixture
def rng():
    return random.Random(12345)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(num, title): acceptance criterion reported in the summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        num, title = mark.args
        _criteria[num] = (title, "PASS" if rep.passed else "FAIL")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_criteria, key=lambda s: (len(s), s)):
        title, status = _criteria[num]
        terminalreporter.write_line(f"[{status}] criterion {num}: {title}")
