"""Acceptance bookkeeping: tests marked ``acceptance(number, title)`` get a pass/fail line in the summary."""
from __future__ import annotations

import pytest
from hypothesis import settings

# some examples bisect or sample thousands of plans; wall-clock deadlines only add flakiness
settings.register_profile("nomamec", deadline=None)
settings.load_profile("nomamec")

_RESULTS: dict[int, tuple[str, bool, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or report.when != "call":
        return
    number, title = marker.args
    detail = dict(item.user_properties).get("detail", "")
    _RESULTS[number] = (title, report.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, passed, detail = _RESULTS[number]
        line = f"[{'PASS' if passed else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(f"{line}: {detail}" if detail else line)
