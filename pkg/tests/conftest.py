import sys

import pytest

from overlay_heal.graph import OverlayGraph

# n loses its only two-hop route to s when f fails
LOST_ROUTE = dict(n=0, f=1, q=2, r=3, s=4, m=5)


@pytest.fixture
def lost_route():
    n, f, q, r, s, m = (LOST_ROUTE[k] for k in "nfqrsm")
    edges = [(n, f), (n, q), (n, r), (f, q), (f, r), (f, s), (f, m), (q, m)]
    return OverlayGraph.from_edges(6, edges)


@pytest.fixture
def square_chord():
    # 1-2-3-4-1 plus chord (1,3); slot 0 stays isolated and inactive
    g = OverlayGraph.from_edges(5, [(1, 2), (2, 3), (3, 4), (4, 1), (1, 3)])
    g.fail_node(0)
    return g


def star(leaves: int) -> OverlayGraph:
    return OverlayGraph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def path(k: int) -> OverlayGraph:
    return OverlayGraph.from_edges(k, [(i, i + 1) for i in range(k - 1)])


def complete(k: int) -> OverlayGraph:
    return OverlayGraph.from_edges(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
