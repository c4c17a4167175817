import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

_criteria: list[tuple[str, bool, float]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or not marker.args:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        _criteria.append((marker.args[0], rep.passed, rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, secs in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  [{secs:.2f}s]")
