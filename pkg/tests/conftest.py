import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

_criteria: dict[str, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    label = getattr(getattr(item, "function", None), "criterion", None)
    if label is None:
        return
    key, title = label
    failed = report.failed
    if report.when == "call" or failed:
        previous = _criteria.get(key, (title, "PASS"))[1]
        _criteria[key] = (title, "FAIL" if failed or previous == "FAIL" else "PASS")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=lambda k: int(k[2:])):
        title, status = _criteria[key]
        terminalreporter.write_line(f"{key:<5} {status}  {title}")
