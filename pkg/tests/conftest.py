import pytest

from rfcool.config import load_config
from rfcool.coupling import derive_pair, report_from_derived


class Case:
    def __init__(self, name):
        self.config = load_config(name)
        self.cant, self.tank = derive_pair(self.config.cantilever, self.config.circuit)
        self.report = report_from_derived(self.cant, self.tank)


@pytest.fixture(scope="session")
def ex1():
    return Case("example1-silicon")


@pytest.fixture(scope="session")
def ex2():
    return Case("example2-stripline")


@pytest.fixture(scope="session")
def scaled():
    return Case("scaled-fullscale")


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
