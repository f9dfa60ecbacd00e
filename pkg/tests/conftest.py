from collections import defaultdict

import pytest

_criteria: dict[str, int] = {}
_outcomes: dict[int, list[bool]] = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark:
            _criteria[item.nodeid] = mark.args[0]


@pytest.hookimpl(trylast=True)
def pytest_runtest_logreport(report):
    n = _criteria.get(report.nodeid)
    if n is None:
        return
    if report.when == "call" or report.failed:
        _outcomes[n].append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_outcomes):
        ok = all(_outcomes[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}")
