import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "qmac",
    max_examples=100,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile(os.environ.get("QMAC_HYPOTHESIS_PROFILE", "qmac"))

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        props = dict(report.user_properties)
        if "criterion" in props:
            _ACCEPTANCE.append((props["criterion"], report.outcome, props.get("detail", "")))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for crit, outcome, detail in sorted(_ACCEPTANCE, key=lambda r: r[0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        tr.write_line(f"[{status}] criterion {crit:>2}: {detail}")


@pytest.fixture
def criterion(record_property):
    """Tag an acceptance test with its criterion number and a one-line result."""

    def tag(number, detail=""):
        record_property("criterion", number)
        record_property("detail", detail)

    return tag
