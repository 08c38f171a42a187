import pytest

from mcmopt.backend import solver_available
from mcmopt.graph import MINUS, PLUS, AdderNode
from mcmopt.models import attach_outputs
from mcmopt.pipeline import default_profile

HAVE_SOLVER = solver_available("highs") or solver_available("cbc")


def pytest_collection_modifyitems(config, items):
    if HAVE_SOLVER:
        return
    skip = pytest.mark.skip(reason="no MILP solver available")
    for item in items:
        if "solver" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def profile():
    return default_profile()


@pytest.fixture
def chain_graph():
    """49 and 51 through the 1, 7, 49, 51 chain (depth 3)."""
    nodes = [
        AdderNode(1, 0, 0, 3, 0, PLUS, MINUS, 7),
        AdderNode(2, 1, 1, 3, 0, PLUS, MINUS, 49),
        AdderNode(3, 0, 2, 1, 0, PLUS, PLUS, 51),
    ]
    return attach_outputs(nodes, [49, 51], 3)


@pytest.fixture
def two_level_graph():
    """49 = 16*3 + 1, 51 = 16*3 + 3 (depth 2)."""
    nodes = [
        AdderNode(1, 0, 0, 1, 0, PLUS, PLUS, 3),
        AdderNode(2, 1, 0, 4, 0, PLUS, PLUS, 49),
        AdderNode(3, 1, 1, 4, 0, PLUS, PLUS, 51),
    ]
    return attach_outputs(nodes, [49, 51], 3)


@pytest.fixture
def neg_shift_graph():
    """7 = 8 - 1, 31 = 32 - 1, 19 = (7 + 31) / 2."""
    nodes = [
        AdderNode(1, 0, 0, 3, 0, PLUS, MINUS, 7),
        AdderNode(2, 0, 0, 5, 0, PLUS, MINUS, 31),
        AdderNode(3, 1, 2, 0, 1, PLUS, PLUS, 19),
    ]
    return attach_outputs(nodes, [7, 19, 31], 8)


@pytest.fixture
def seventeen_graph():
    """49 = 32 + 17 and 51 = 2*17 + 17 with low bits truncated, w_in = 3."""
    nodes = [
        AdderNode(1, 0, 0, 4, 0, PLUS, PLUS, 17),
        AdderNode(2, 0, 1, 5, 0, PLUS, PLUS, 49, 0, 4),
        AdderNode(3, 1, 1, 1, 0, PLUS, PLUS, 51, 4, 4),
    ]
    return attach_outputs(nodes, [49, 51], 3)


class AcceptanceLog:
    def __init__(self):
        self.lines: dict[int, str] = {}

    def record(self, number: int, ok: bool, title: str, detail: str) -> None:
        self.lines[number] = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"


@pytest.fixture(scope="session")
def acceptance(request):
    log = getattr(request.config, "_acceptance_log", None)
    if log is None:
        log = request.config._acceptance_log = AcceptanceLog()
    return log


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = getattr(config, "_acceptance_log", None)
    if log is None or not log.lines:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(log.lines):
        terminalreporter.write_line(log.lines[k])
