import time

import pytest

_CRITERIA: dict[int, list] = {}
_SESSION = {}
SUITE_BUDGET = 120.0


def pytest_sessionstart(session):
    _SESSION["start"] = time.perf_counter()


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    number = dict(report.user_properties).get("criterion")
    if number is None:
        return
    if report.passed and not hasattr(report, "wasxfail"):
        status = "PASS"
    else:
        status = "FAIL"
    detail = dict(report.user_properties).get("detail", "")
    _CRITERIA.setdefault(number, []).append((report.nodeid.split("::")[-1], status, detail))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    elapsed = time.perf_counter() - _SESSION.get("start", time.perf_counter())
    if 12 in _CRITERIA:
        # criterion 12 also bounds the whole session
        status = "PASS" if elapsed < SUITE_BUDGET else "FAIL"
        _CRITERIA[12].append(("full_suite_runtime", status, f"{elapsed:.1f} s (budget {SUITE_BUDGET:.0f} s)"))
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        parts = _CRITERIA[number]
        status = "PASS" if all(s == "PASS" for _, s, _ in parts) else "FAIL"
        tr.write_line(f"criterion {number:2d}: {status}")
        for name, s, detail in parts:
            tr.write_line(f"    {s}  {name}  {detail}")
    tr.write_line(f"session runtime: {elapsed:.1f} s")


@pytest.fixture
def criterion(record_property):
    """``criterion(n, detail)`` tags the running test with an acceptance number."""

    def tag(number: int, detail: str = ""):
        record_property("criterion", number)
        if detail:
            record_property("detail", detail)

    return tag
