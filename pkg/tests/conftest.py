import pytest

from vvmf import catalog as cat
from vvmf.golden import SCOPE_CMAX
from vvmf.scan import ScanConfig, scan

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    n, title = marker.args
    entry = _CRITERIA.setdefault(n, {"title": title, "ok": True, "details": []})
    if report.failed:
        entry["ok"] = False
        message = str(call.excinfo.value).strip().splitlines() if call.excinfo else []
        entry["details"].append(f"{item.name}: {message[0][:240] if message else 'failed'}")
    elif report.when == "call" and getattr(item, "criterion_detail", None):
        entry["details"].append(item.criterion_detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        entry = _CRITERIA[n]
        verdict = "PASS" if entry["ok"] else "FAIL"
        line = f"criterion {n:2d} [{entry['title']}]: {verdict}"
        if entry["details"]:
            line += " - " + "; ".join(entry["details"])
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def config():
    return ScanConfig()


@pytest.fixture(scope="session")
def theorem_scan(config):
    """Every extremal candidate of every family in the range the tables cover."""
    rows = []
    for datum in cat.catalog():
        rows.extend(scan(datum.label, SCOPE_CMAX[datum.rank], config))
    return rows
