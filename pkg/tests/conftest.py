from __future__ import annotations

import pytest

from focalner import default_lexicons, default_schema
from focalner.corpus import load_schema
from focalner.resources import data_path


@pytest.fixture(scope="session")
def lex():
    return default_lexicons()


@pytest.fixture(scope="session")
def schema():
    return default_schema()


@pytest.fixture(scope="session")
def org_schema():
    return load_schema(data_path("schema_org.txt"))


# -- acceptance reporting -------------------------------------------------

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(name): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or not (report.when == "call" or report.failed):
        return
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _CRITERIA[marker.args[0]] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in _CRITERIA.items():
        terminalreporter.write_line(f"{status}  {name}" + (f"  [{detail}]" if detail else ""))
