import itertools
import sys
from pathlib import Path

import pytest

from ecosysna.graph import EcosystemGraph

TESTS = Path(__file__).parent
ROOT = TESTS.parent
DATA = ROOT / "data"
TEST_DATA = TESTS / "data"
GOLDEN = TESTS / "golden"

sys.path.insert(0, str(TESTS))


def make_graph(n, edges, prefix="v"):
    """Graph with nodes ``v0.ir .. v{n-1}.ir`` whose ids equal their index."""
    g = EcosystemGraph()
    for i in range(n):
        g.add_node(f"{prefix}{i}.ir")
    for e in edges:
        u, v = e[0], e[1]
        g.add_edge(u, v, e[2] if len(e) > 2 else 1.0)
    return g.finalize()


def clique_arcs(nodes):
    return [(u, v, 1.0) for u, v in itertools.permutations(nodes, 2)]


def edge_list(graph):
    return [(e.src, e.dst, e.weight) for e in graph.edges()]


@pytest.fixture
def two_clique_barbell():
    return make_graph(8, clique_arcs(range(4)) + clique_arcs(range(4, 8)) + [(3, 4, 1.0)])


@pytest.fixture
def triangle_barbell():
    return make_graph(6, clique_arcs(range(3)) + clique_arcs(range(3, 6)) + [(2, 3, 1.0)])


# acceptance reporting: one PASS/FAIL line per criterion in the terminal summary

ACCEPTANCE_RESULTS = []


def record_criterion(number, title, ok, detail):
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"
    ACCEPTANCE_RESULTS.append((number, line))
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(line)
