from __future__ import annotations

import re

_results: dict = {}

TITLES = {
    1: "promotion golden test",
    2: "Irr golden test",
    3: "mutation cross-check",
    4: "sign definiteness",
    5: "tiling verification",
    6: "dimension and injectivity",
    7: "cluster adjacency",
    8: "compatibility",
    9: "quiver rules",
    10: "structural counts",
}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)", report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        num = int(m.group(1))
        ok = report.outcome == "passed"
        prev = _results.get(num, (True, []))
        failed = prev[1] + ([report.nodeid.split("::")[-1]] if not ok else [])
        _results[num] = (prev[0] and ok, failed)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_results):
        ok, failed = _results[num]
        line = f"criterion {num:2d} ({TITLES.get(num, '')}): {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "  failing: " + ", ".join(failed)
        terminalreporter.write_line(line)
