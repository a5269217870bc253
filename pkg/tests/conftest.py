import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_outcomes = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


def pytest_runtest_logreport(report):
    num = getattr(report, "criterion", None)
    if num is None:
        return
    key = num
    failed = report.failed or (report.when == "call" and report.skipped)
    prev = _outcomes.get(key)
    ok = prev is None or prev[1]
    _outcomes[key] = (report.criterion_title, ok and not failed)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = mark.args[0]
        report.criterion_title = mark.args[1]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        title, ok = _outcomes[num]
        terminalreporter.write_line(f"criterion {num:>2}: {'PASS' if ok else 'FAIL'}  {title}")
