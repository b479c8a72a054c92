import re

import pytest

from disclosure_game import ModelParams, Uniform


def make_params(p, q, dist=None):
    return ModelParams(p=p, q=q, dist=dist if dist is not None else Uniform(0.0, 1.0))


@pytest.fixture
def params_factory():
    return make_params


# ---------------------------------------------------------------------------
# acceptance summary: one pass/fail line per criterion at the end of the run

_CRITERION = re.compile(r"test_criterion_(\d+)")
_outcomes: dict[int, set] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    num = int(m.group(1))
    bucket = _outcomes.setdefault(num, set())
    if report.when == "call":
        if hasattr(report, "wasxfail"):
            bucket.add("xfail" if report.skipped else "xpass")
        elif report.failed:
            bucket.add("fail")
        elif report.passed:
            bucket.add("pass")
    elif report.failed:
        bucket.add("fail")


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_outcomes):
        kinds = _outcomes[num]
        if "fail" in kinds or "xpass" in kinds:
            verdict = "FAIL"
        elif "xfail" in kinds:
            verdict = "PASS (with documented expected-failure clause)"
        else:
            verdict = "PASS"
        tr.write_line(f"criterion {num:2d}: {verdict}")
