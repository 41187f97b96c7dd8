"""Collects acceptance-criterion outcomes and prints one line per criterion."""

from __future__ import annotations

import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item: pytest.Item, call: pytest.CallInfo):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, text = marker.args
    results = item.config.stash[_RESULTS]
    if report.when == "call" or (report.when == "setup" and report.failed):
        detail = ""
        if report.failed and call.excinfo is not None:
            detail = str(call.excinfo.value).splitlines()[0] if str(call.excinfo.value) else call.excinfo.typename
        results[number] = ("PASS" if report.passed else "FAIL", text, detail)


def pytest_terminal_summary(terminalreporter, exitstatus, config: pytest.Config) -> None:
    results = config.stash[_RESULTS]
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        status, text, detail = results[number]
        line = f"criterion {number:2d}: {status}  {text}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
