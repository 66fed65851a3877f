"""Collects acceptance-criterion outcomes and prints one line per criterion."""

from __future__ import annotations

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

_outcomes: dict[str, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): test belongs to a named acceptance criterion")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("acceptance")
        if mark:
            item.user_properties.append(("acceptance", mark.args[0]))


def pytest_runtest_logreport(report):
    name = dict(report.user_properties).get("acceptance")
    if name is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _outcomes.setdefault(name, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for name, results in _outcomes.items():
        verdict = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"ACCEPTANCE {verdict}: {name} ({sum(results)}/{len(results)} checks)")
