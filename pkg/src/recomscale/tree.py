"""Spanning trees, balanced cuts and seed plans."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BalanceUnreachable, DisconnectedSubset, SeedFailure
from .graph import Assignment, DualGraph, as_fraction, make_assignment

TREE_METHODS = ("mst", "uniform")


@dataclass(frozen=True)
class BalanceWindow:
    """Acceptable district population ``target * (1 ± epsilon)``.

    Populations are integers, so the window is stored as exact integer bounds
    ``lo``/``hi`` derived with rational arithmetic (``epsilon`` is read as the
    decimal it prints as).
    """

    target: Fraction
    epsilon: Fraction

    def __init__(self, target, epsilon):
        target = as_fraction(target)
        epsilon = as_fraction(epsilon)
        if epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "epsilon", epsilon)

    @classmethod
    def for_plan(cls, total_population: int, k: int, epsilon) -> "BalanceWindow":
        return cls(Fraction(total_population, k), epsilon)

    @property
    def lo(self) -> int:
        return math.ceil(self.target * (1 - self.epsilon))

    @property
    def hi(self) -> int:
        return math.floor(self.target * (1 + self.epsilon))

    def contains(self, population) -> bool:
        return self.lo <= population <= self.hi


@dataclass
class SpanningTree:
    """Rooted spanning tree over ``members``.

    Everything is indexed locally: ``members[i]`` is the graph node of local
    vertex i, ``parent[i]`` its parent's local index (-1 at the root) and
    ``order`` a breadth-first order starting at the root, so parents always
    precede children.
    """

    members: np.ndarray
    parent: list[int]
    order: list[int]
    subtree_pop: list[int]

    @property
    def total_population(self) -> int:
        return self.subtree_pop[self.order[0]] if self.order else 0

    def edges(self) -> list[tuple[int, int]]:
        """Tree edges as global (child, parent) node pairs."""
        m = self.members
        return [(int(m[i]), int(m[p])) for i, p in enumerate(self.parent) if p >= 0]

    def subtree_nodes(self, child: int) -> np.ndarray:
        """Global ids of the subtree hanging below local vertex ``child``."""
        inside = [False] * len(self.parent)
        inside[child] = True
        for i in self.order:
            p = self.parent[i]
            if p >= 0 and inside[p]:
                inside[i] = True
        return self.members[np.array(inside, dtype=bool)]


def _induced_local_edges(graph: DualGraph, members: np.ndarray):
    local = np.full(len(graph), -1, dtype=np.int64)
    local[members] = np.arange(members.size)
    lu = local[graph.edge_u]
    lv = local[graph.edge_v]
    keep = (lu >= 0) & (lv >= 0)
    return lu[keep], lv[keep]


def _root_tree(members: np.ndarray, tree_adj: list[list[int]], pops: list[int]) -> SpanningTree:
    m = len(tree_adj)
    parent = [-1] * m
    order = [0]
    seen = [False] * m
    seen[0] = True
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        for v in tree_adj[u]:
            if not seen[v]:
                seen[v] = True
                parent[v] = u
                order.append(v)
    sub = list(pops)
    for u in reversed(order):
        p = parent[u]
        if p >= 0:
            sub[p] += sub[u]
    return SpanningTree(members, parent, order, sub)


def _mst_adjacency(m: int, lu: list[int], lv: list[int], rng: np.random.Generator) -> list[list[int]]:
    # Kruskal over i.i.d. uniform weights
    weights = rng.random(len(lu))
    uf = list(range(m))
    tree_adj: list[list[int]] = [[] for _ in range(m)]
    added = 0
    for e in np.argsort(weights, kind="stable").tolist():
        a, b = lu[e], lv[e]
        while uf[a] != a:
            uf[a] = uf[uf[a]]
            a = uf[a]
        while uf[b] != b:
            uf[b] = uf[uf[b]]
            b = uf[b]
        if a == b:
            continue
        uf[a] = b
        u, v = lu[e], lv[e]
        tree_adj[u].append(v)
        tree_adj[v].append(u)
        added += 1
        if added == m - 1:
            break
    if added != m - 1:
        raise DisconnectedSubset(f"members induce a disconnected subgraph ({m - added} components)")
    return tree_adj


def _wilson_adjacency(m: int, lu: list[int], lv: list[int], rng: np.random.Generator) -> list[list[int]]:
    # loop-erased random walks; uniform over spanning trees
    nbrs: list[list[int]] = [[] for _ in range(m)]
    for a, b in zip(lu, lv):
        nbrs[a].append(b)
        nbrs[b].append(a)
    in_tree = [False] * m
    nxt = [-1] * m
    root = int(rng.integers(m))
    in_tree[root] = True
    tree_adj: list[list[int]] = [[] for _ in range(m)]
    for start in range(m):
        u = start
        steps = 0
        while not in_tree[u]:
            if not nbrs[u]:
                raise DisconnectedSubset("members induce a disconnected subgraph")
            nxt[u] = nbrs[u][int(rng.integers(len(nbrs[u])))]
            u = nxt[u]
            steps += 1
            if steps > 50 * m * m + 1000:
                raise DisconnectedSubset("members induce a disconnected subgraph")
        u = start
        while not in_tree[u]:
            in_tree[u] = True
            tree_adj[u].append(nxt[u])
            tree_adj[nxt[u]].append(u)
            u = nxt[u]
    return tree_adj


def random_spanning_tree(
    graph: DualGraph, members: Sequence[int], rng: np.random.Generator, method: str = "mst"
) -> SpanningTree:
    """Random spanning tree of the subgraph induced by ``members``.

    ``method="mst"`` (default) takes the minimum spanning tree under
    independent uniform edge weights; ``"uniform"`` samples uniformly among
    spanning trees with Wilson's algorithm.
    """
    members = np.asarray(members, dtype=np.int64)
    m = members.size
    if m == 0:
        raise DisconnectedSubset("empty member set")
    lu, lv = _induced_local_edges(graph, members)
    lu, lv = lu.tolist(), lv.tolist()
    if method == "mst":
        tree_adj = _mst_adjacency(m, lu, lv, rng)
    elif method == "uniform":
        tree_adj = _wilson_adjacency(m, lu, lv, rng)
    else:
        raise ValueError(f"unknown tree method {method!r}; expected one of {TREE_METHODS}")
    return _root_tree(members, tree_adj, graph.population[members].tolist())


def _cut_candidates(tree: SpanningTree, lo: int, hi: int, rest_lo: int, rest_hi: int) -> list[tuple[int, bool]]:
    """(local child, subtree_is_piece) for every cut leaving one piece in
    [lo, hi] and the remainder in [rest_lo, rest_hi]."""
    total = tree.total_population
    sub = tree.subtree_pop
    out = []
    for v, p in enumerate(tree.parent):
        if p < 0:
            continue
        s = sub[v]
        c = total - s
        if lo <= s <= hi and rest_lo <= c <= rest_hi:
            out.append((v, True))
        if lo <= c <= hi and rest_lo <= s <= rest_hi:
            out.append((v, False))
    return out


def find_balanced_cuts(tree: SpanningTree, window: BalanceWindow) -> list[tuple[int, int]]:
    """Tree edges (global ``(child, parent)``) whose removal leaves both sides in the window."""
    lo, hi = window.lo, window.hi
    total = tree.total_population
    m = tree.members
    out = []
    for v, p in enumerate(tree.parent):
        if p < 0:
            continue
        s = tree.subtree_pop[v]
        if lo <= s <= hi and lo <= total - s <= hi:
            out.append((int(m[v]), int(m[p])))
    return out


def bipartition(
    graph: DualGraph,
    members: Sequence[int],
    window: BalanceWindow,
    rng: np.random.Generator,
    max_tree_attempts: int = 1000,
    method: str = "mst",
) -> tuple[np.ndarray, np.ndarray]:
    """Split ``members`` into two contiguous pieces, both inside ``window``.

    Draws spanning trees until one has a balanced edge, then cuts an edge
    chosen uniformly among the balanced ones.  Returns sorted node arrays
    ``(A, B)`` with ``A`` the side below the cut edge.
    """
    if max_tree_attempts < 1:
        raise ValueError("max_tree_attempts must be >= 1")
    members = np.asarray(members, dtype=np.int64)
    if members.size < 2:
        raise BalanceUnreachable("fewer than two members; nothing to cut")
    lo, hi = window.lo, window.hi
    for _ in range(max_tree_attempts):
        tree = random_spanning_tree(graph, members, rng, method)
        cuts = [v for v, side in _cut_candidates(tree, lo, hi, lo, hi) if side]
        if not cuts:
            continue
        v = cuts[int(rng.integers(len(cuts)))]
        a = np.sort(tree.subtree_nodes(v))
        b = np.setdiff1d(members, a)
        return a, b
    raise BalanceUnreachable(
        f"no balanced cut in {max_tree_attempts} trees (window [{lo}, {hi}], {members.size} nodes)"
    )


def _peel(graph, members, lo, hi, rest_lo, rest_hi, rng, max_tree_attempts, method):
    for _ in range(max_tree_attempts):
        tree = random_spanning_tree(graph, members, rng, method)
        cands = _cut_candidates(tree, lo, hi, rest_lo, rest_hi)
        if not cands:
            continue
        v, subtree_is_piece = cands[int(rng.integers(len(cands)))]
        below = tree.subtree_nodes(v)
        if subtree_is_piece:
            return below
        return np.setdiff1d(members, below)
    raise BalanceUnreachable(f"could not peel a district in [{lo}, {hi}] from {len(members)} nodes")


def recursive_seed(
    graph: DualGraph,
    k: int,
    window: BalanceWindow,
    rng: np.random.Generator,
    max_attempts: int = 10,
    max_tree_attempts: int = 1000,
    method: str = "mst",
) -> Assignment:
    """Random k-district seed plan built by peeling one district at a time.

    Each peel aims at ``remaining_pop / remaining_k`` with the same fractional
    tolerance, intersected with the global window so the finished plan always
    satisfies it; the remainder must stay within reach of the rest.  A failed peel restarts the whole plan, up to
    ``max_attempts`` times.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n = len(graph)
    if k == 1:
        if not window.contains(graph.total_population):
            raise SeedFailure("k=1 but total population lies outside the window")
        return make_assignment(graph, np.zeros(n, dtype=np.int64), 1, check_contiguity=False)
    if k > n:
        raise SeedFailure(f"cannot draw {k} districts from {n} units")
    eps = window.epsilon
    for _ in range(max_attempts):
        labels = np.full(n, k - 1, dtype=np.int64)
        remaining = np.arange(n, dtype=np.int64)
        try:
            for d in range(k - 1):
                rem_k = k - d
                rem_pop = int(graph.population[remaining].sum())
                local = BalanceWindow(Fraction(rem_pop, rem_k), eps)
                lo, hi = max(local.lo, window.lo), min(local.hi, window.hi)
                # the remainder must still fit rem_k - 1 districts of the global window
                rest_lo, rest_hi = (rem_k - 1) * window.lo, (rem_k - 1) * window.hi
                piece = _peel(graph, remaining, lo, hi, rest_lo, rest_hi, rng, max_tree_attempts, method)
                labels[piece] = d
                remaining = np.setdiff1d(remaining, piece)
        except BalanceUnreachable:
            continue
        return make_assignment(graph, labels, k, check_contiguity=False)
    raise SeedFailure(f"no {k}-district seed plan within [{window.lo}, {window.hi}] after {max_attempts} attempts")
