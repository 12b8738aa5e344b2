import pytest

from plumbcalc.cli import load_example
from plumbcalc.graph import parse_graph

_CRITERIA = {}
_TITLES = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number")


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m:
            _TITLES[m.args[0]] = m.args[1]


def pytest_runtest_logreport(report):
    if report.when != "call" and not report.failed:
        return
    crit = getattr(report, "criterion", None)
    if crit is None:
        return
    ok = _CRITERIA.get(crit, True) and report.passed
    _CRITERIA[crit] = ok


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("criterion")
    if m:
        rep.criterion = m.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        status = "PASS" if _CRITERIA[n] else "FAIL"
        terminalreporter.write_line(f"criterion {n} [{_TITLES.get(n, '')}]: {status}")


@pytest.fixture
def cusp():
    return load_example("cusp")


@pytest.fixture
def sup():
    return load_example("sup")


def graph(text):
    return parse_graph(text)
