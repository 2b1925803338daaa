import sys
from pathlib import Path

import pytest

from helpers import t1

SOLVER_SCRIPT = Path(__file__).parent / "solvers" / "scip_cbf_solver.py"


@pytest.fixture
def inst_t1():
    return t1()


@pytest.fixture(scope="session")
def scip_command():
    pytest.importorskip("pyscipopt")
    return f"{sys.executable} {SOLVER_SCRIPT} {{model}} {{solution}}"


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.LINES:
        terminalreporter.write_line(line)
