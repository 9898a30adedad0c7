from __future__ import annotations

import re

_CRITERION = re.compile(r"test_criterion_(\d+)_(\w+)")
_results: dict = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m[1]), m[2])
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _results[key] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (n, name), outcome in sorted(_results.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n} [{name.replace('_', ' ')}]: {status}")
