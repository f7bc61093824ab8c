"""Collects the outcome of every acceptance criterion and prints a
PASS/FAIL line per criterion at the end of the session."""

import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or rep.when not in ("setup", "call"):
        return
    number, title = marker.args
    if rep.when == "setup" and rep.passed:
        return
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _RESULTS[number] = (title, rep.passed, detail)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, detail = _RESULTS[number]
        line = f"{'PASS' if ok else 'FAIL'} {number}. {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
