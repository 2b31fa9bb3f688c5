"""Acceptance reporting: one PASS/FAIL line per numbered criterion."""

from __future__ import annotations

import pytest

CRITERIA = {
    1: "axiom/differential suite (d o d = 0, graded Leibniz)",
    2: "Bianchi identity under random connections",
    3: "classification round trip over FIX-AB2 with kernel Q",
    4: "torsor laws on FIX-HEIS(c)",
    5: "Chern-Weil cocycles and connection independence",
    6: "classifying map: coalgebra morphism and closedness",
    7: "FIX-HEIS invariant tower and weight-1 class",
    8: "FIX-SPLIT-SL2 invariants against a brute-force oracle",
    9: "known cohomology against a dense rank oracle",
    10: "weight-1 two-path agreement",
    11: "CLI determinism and golden reports",
}

_results: dict[int, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    n = mark.args[0]
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _results.setdefault(n, []).append(rep.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, title in CRITERIA.items():
        got = _results.get(n)
        if not got:
            status = "NOT RUN"
        elif all(o == "passed" for o in got):
            status = "PASS"
        else:
            status = "FAIL"
        tr.write_line(f"[PRIMARY] criterion {n:2d}: {status:7s} {title}")
