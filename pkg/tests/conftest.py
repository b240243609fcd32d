import numpy as np
import pytest

from foakit import MonoBuffer

SR = 48000


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def noise(rng):
    """One second of seeded white noise at 48 kHz."""
    return MonoBuffer(rng.uniform(-0.5, 0.5, SR), SR)


# ---- acceptance summary: one PASS/FAIL line per criterion -------------------

_CRITERIA: dict[int, tuple[str, bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    previous = _CRITERIA.get(number, (title, True))[1]
    if rep.when == "call" or rep.failed:
        _CRITERIA[number] = (title, previous and not rep.failed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, ok = _CRITERIA[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}")
