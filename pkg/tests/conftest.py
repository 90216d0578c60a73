"""Collects acceptance-criterion outcomes and prints one PASS/FAIL line each."""

import time

import pytest

_RESULTS: dict[int, dict] = {}


def _criterion(item):
    marker = item.get_closest_marker("criterion")
    return None if marker is None else marker.args


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    args = _criterion(item)
    if args is None or report.when != "call" and report.passed:
        return
    number, title = args
    entry = _RESULTS.setdefault(number, {"title": title, "passed": True, "seconds": 0.0})
    if report.failed:
        entry["passed"] = False
    if report.when == "call":
        entry["seconds"] += report.duration


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        entry = _RESULTS[number]
        status = "PASS" if entry["passed"] else "FAIL"
        terminalreporter.write_line(
            f"{status}  criterion {number}: {entry['title']} ({entry['seconds']:.2f} s)")


@pytest.fixture
def budget():
    """Context-free stopwatch: ``with budget(seconds): ...`` fails if exceeded."""

    class _Budget:
        def __init__(self, seconds):
            self.seconds = seconds

        def __enter__(self):
            self.start = time.perf_counter()
            return self

        def __exit__(self, *exc):
            self.elapsed = time.perf_counter() - self.start
            if exc[0] is None:
                assert self.elapsed < self.seconds, (
                    f"runtime {self.elapsed:.2f} s exceeds budget {self.seconds} s")
            return False

    return _Budget
