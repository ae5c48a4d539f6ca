"""Collects results of ``@pytest.mark.acceptance(n, title)`` tests into one line per criterion."""

import pytest

_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _results.setdefault(number, {"title": title, "passed": True, "tests": 0, "seconds": 0.0})
    if report.when == "call":
        entry["tests"] += 1
        entry["seconds"] += report.duration
    if report.failed or (report.when == "setup" and report.skipped):
        entry["passed"] = False


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        r = _results[number]
        status = "PASS" if r["passed"] and r["tests"] else "FAIL"
        terminalreporter.write_line(
            f"{status} criterion {number}: {r['title']} ({r['tests']} tests, {r['seconds']:.2f}s)"
        )
