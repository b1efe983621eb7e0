import re

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    doc = (getattr(item, "function", None) and item.function.__doc__) or ""
    title = doc.strip().splitlines()[0] if doc.strip() else ""
    report.criterion_title = title


def pytest_runtest_logreport(report):
    """One terminal line per acceptance criterion, outside output capture."""
    if report.when != "call":
        return
    m = re.match(r"test_criterion_(\d+)", report.nodeid.split("::")[-1])
    if not m:
        return
    status = "PASS" if report.passed else "FAIL"
    title = getattr(report, "criterion_title", "")
    suffix = " - %s" % title if title else ""
    print("\nACCEPTANCE %s: %s%s" % (m.group(1), status, suffix), flush=True)
