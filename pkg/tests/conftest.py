import pathlib
import sys

import pytest

from agentplan.topology import build, load_topology

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent))

# Links of the 10-node sample network; weights are the differences of consecutive cumulative
# route times in the worked example (H -> H0 = 30, H0 -> H1 = 80 - 30, ...).
FIG_EDGES = [
    ("H", "H0", 30),
    ("H0", "H1", 50),
    ("H1", "H7", 30),
    ("H0", "H3", 90),
    ("H3", "H5", 30),
    ("H5", "H6", 70),
    ("H6", "H4", 60),
    ("H4", "H2", 90),
    ("H4", "H8", 70),
    ("H6", "H9", 20),
]


@pytest.fixture(scope="session")
def fig_path():
    return DATA / "fig3_1.topo"


@pytest.fixture(scope="session")
def fig(fig_path):
    return load_topology(fig_path)


@pytest.fixture
def single():
    return build("H", [("H", "A", 25)])


def star(k, w=10):
    return build("H", [("H", f"L{i}", w) for i in range(k)])


def path_graph(k, w=10):
    names = ["H"] + [f"P{i}" for i in range(k)]
    return build("H", [(a, b, w + i) for i, (a, b) in enumerate(zip(names, names[1:]))])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
