from fractions import Fraction

import pytest

from rspbound.graph_model import DegradationGraph, figure1_graph
from rspbound.spath import lp_from_graph
from rspbound.weibull import WeibullParams

# filled by tests/test_acceptance.py, printed in the terminal summary
ACCEPTANCE_LINES: dict[str, str] = {}

# incidence matrix of the 5-state example, as printed (rows = nodes, columns = edges)
FIG1_A0 = [
    [-1, -1, -1, 0, 0, 0, 0],
    [1, 0, 0, -1, 0, 0, 0],
    [0, 1, 0, 1, -1, -1, 0],
    [0, 0, 1, 0, 1, 0, -1],
    [0, 0, 0, 0, 0, 1, 1],
]
FIG1_A = [row + [1] for row in FIG1_A0]


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: int(k.split()[0][1:])):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def fig1() -> DegradationGraph:
    return figure1_graph(1.0, 1.5)


@pytest.fixture
def fig1_lp(fig1):
    return lp_from_graph(fig1)


@pytest.fixture
def single_edge() -> DegradationGraph:
    return DegradationGraph(2, ((1, 2),), (WeibullParams(1.0, 1.0),))


def frac_costs(rng, m):
    return [Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 10))) for _ in range(m)]
