import itertools

import networkx as nx
import numpy as np
import pytest

from recomscale.graph import grid_graph


def nx_grid(rows, cols):
    """Independent networkx copy of a grid with the same node numbering."""
    g = nx.Graph()
    g.add_nodes_from(range(rows * cols))
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                g.add_edge(i, i + 1)
            if r + 1 < rows:
                g.add_edge(i, i + cols)
    return g


def enumerate_equal_splits(g: nx.Graph) -> set:
    """All unordered splits of an even-sized unit-population graph into two
    connected halves, by brute force over subsets containing node 0."""
    nodes = sorted(g.nodes)
    n = len(nodes)
    rest = nodes[1:]
    out = set()
    for combo in itertools.combinations(rest, n // 2 - 1):
        a = frozenset((nodes[0],) + combo)
        b = frozenset(nodes) - a
        if nx.is_connected(g.subgraph(a)) and nx.is_connected(g.subgraph(b)):
            out.add(frozenset([a, b]))
    return out


def brute_force_cuts(edges, pops, lo, hi):
    """Tree edges whose removal leaves both components' populations in [lo, hi]."""
    t = nx.Graph()
    t.add_nodes_from(pops)
    t.add_edges_from(edges)
    good = set()
    for u, v in edges:
        t.remove_edge(u, v)
        sides = [sum(pops[x] for x in comp) for comp in nx.connected_components(t)]
        t.add_edge(u, v)
        if all(lo <= s <= hi for s in sides):
            good.add(frozenset((u, v)))
    return good


@pytest.fixture(scope="session")
def grid4():
    return grid_graph(4, 4)


@pytest.fixture(scope="session")
def grid6():
    return grid_graph(6, 6)


@pytest.fixture(scope="session")
def splits_4x4():
    return enumerate_equal_splits(nx_grid(4, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance_lines", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
