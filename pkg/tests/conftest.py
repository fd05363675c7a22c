import os
from pathlib import Path

import pytest

from carp_aco import load_instance, prepare

DATA = Path(__file__).parent / "data"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call" and not (rep.when == "setup" and rep.failed):
        return
    number, title = mark.args
    detail = ""
    if rep.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).strip().splitlines()[0][:160] if str(call.excinfo.value).strip() else call.excinfo.typename
    _CRITERIA[number] = (title, "PASS" if rep.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        title, status, detail = _CRITERIA[number]
        line = f"criterion {number} {status}: {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


def instance_dir() -> Path | None:
    d = os.environ.get("CARP_INSTANCE_DIR")
    return Path(d) if d else None


@pytest.fixture(scope="session")
def triangle():
    inst = load_instance(DATA / "triangle.dat")
    net, dist = prepare(inst)
    return inst, net, dist


@pytest.fixture(scope="session")
def gdb1():
    inst = load_instance(DATA / "gdb1.dat")
    net, dist = prepare(inst)
    return inst, net, dist
