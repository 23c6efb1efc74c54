"""Dual graph of geographic units and districting plans."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    DisconnectedGraph,
    DuplicateEdge,
    InvalidAssignment,
    InvalidEdge,
    NegativeAttribute,
    SchemaMismatch,
    UnknownDistrict,
)


def as_fraction(x) -> Fraction:
    """Exact conversion; floats go through their shortest decimal repr."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


@dataclass(frozen=True)
class NodeRecord:
    id: int
    population: int
    vap: int = 0
    county: str = ""
    # contest name -> (dem, rep); fractional values come from proration
    votes: Mapping[str, tuple[Fraction, Fraction]] = field(default_factory=dict)


class DualGraph:
    """Immutable unit-adjacency graph.

    Node ids are dense integers ``0..n-1``; ``keys`` holds the external string
    key of each node when the graph came from a file.
    """

    def __init__(
        self,
        nodes: Sequence[NodeRecord],
        edges: Iterable[tuple[int, int]],
        contest_names: Sequence[str] | None = None,
        keys: Sequence[str] | None = None,
        unit_level: str = "precinct",
    ):
        nodes = tuple(nodes)
        n = len(nodes)
        if n == 0:
            raise DisconnectedGraph("graph has no nodes")
        for i, rec in enumerate(nodes):
            if rec.id != i:
                raise InvalidEdge(f"node at position {i} has id {rec.id}; ids must be dense 0..n-1")
            if rec.population < 0:
                raise NegativeAttribute(f"node {i}: population {rec.population} < 0")
            if rec.vap < 0:
                raise NegativeAttribute(f"node {i}: vap {rec.vap} < 0")
            for name, (dem, rep) in rec.votes.items():
                if dem < 0 or rep < 0:
                    raise NegativeAttribute(f"node {i}: negative vote count in contest {name}")
        if contest_names is None:
            contest_names = sorted({c for rec in nodes for c in rec.votes})
        contest_names = tuple(contest_names)
        for rec in nodes:
            missing = [c for c in contest_names if c not in rec.votes]
            if missing:
                raise SchemaMismatch(f"node {rec.id}: missing vote columns for {missing}")

        seen = set()
        norm = []
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise InvalidEdge(f"edge ({u}, {v}) references an unknown node")
            if u == v:
                raise InvalidEdge(f"self-loop on node {u}")
            e = (u, v) if u < v else (v, u)
            if e in seen:
                raise DuplicateEdge(f"duplicate edge {e}")
            seen.add(e)
            norm.append(e)

        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)

        population = np.array([rec.population for rec in nodes], dtype=np.int64)
        if population.sum() <= 0:
            raise NegativeAttribute("total population must be positive")

        self.nodes = nodes
        self.edges = tuple(norm)
        self.contest_names = contest_names
        self.keys = tuple(str(k) for k in keys) if keys is not None else tuple(str(i) for i in range(n))
        if len(self.keys) != n:
            raise InvalidEdge("keys must have one entry per node")
        self.unit_level = unit_level
        self.adjacency = tuple(tuple(a) for a in adj)
        self.population = population
        self.population.setflags(write=False)
        self.total_population = int(population.sum())
        self.edge_u = np.array([e[0] for e in norm], dtype=np.int64)
        self.edge_v = np.array([e[1] for e in norm], dtype=np.int64)
        self.edge_u.setflags(write=False)
        self.edge_v.setflags(write=False)
        self._vote_cache: dict[str, tuple[np.ndarray, np.ndarray]] = {}

        unreached = _unreached(self.adjacency, range(n))
        if unreached:
            raise DisconnectedGraph(f"graph is disconnected; node {unreached[0]} unreachable from node 0")

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"DualGraph(n={len(self.nodes)}, edges={len(self.edges)}, contests={list(self.contest_names)})"

    def __getstate__(self):
        state = self.__dict__.copy()
        state["_vote_cache"] = {}
        return state

    @property
    def counties(self) -> list[str]:
        return [rec.county for rec in self.nodes]

    def vote_arrays(self, contest: str) -> tuple[np.ndarray, np.ndarray]:
        """Float (dem, rep) columns for fast tallying."""
        if contest not in self._vote_cache:
            if contest not in self.contest_names:
                raise KeyError(contest)
            dem = np.array([float(rec.votes[contest][0]) for rec in self.nodes])
            rep = np.array([float(rec.votes[contest][1]) for rec in self.nodes])
            self._vote_cache[contest] = (dem, rep)
        return self._vote_cache[contest]

    def induced_subgraph(self, node_ids: Iterable[int]) -> "DualGraph":
        """New graph on ``node_ids`` with dense renumbering (in sorted order)."""
        ids = sorted(set(int(i) for i in node_ids))
        local = {g: i for i, g in enumerate(ids)}
        nodes = [
            NodeRecord(i, self.nodes[g].population, self.nodes[g].vap, self.nodes[g].county, self.nodes[g].votes)
            for i, g in enumerate(ids)
        ]
        edges = [(local[u], local[v]) for u, v in self.edges if u in local and v in local]
        return DualGraph(nodes, edges, self.contest_names, [self.keys[g] for g in ids], self.unit_level)


def _unreached(adjacency, members) -> list[int]:
    """Members not reachable from the first member inside the induced subgraph."""
    members = list(members)
    if not members:
        return []
    inside = set(members)
    seen = {members[0]}
    queue = deque([members[0]])
    while queue:
        u = queue.popleft()
        for v in adjacency[u]:
            if v in inside and v not in seen:
                seen.add(v)
                queue.append(v)
    return [m for m in members if m not in seen]


def is_connected_subset(graph: DualGraph, members: Iterable[int]) -> bool:
    return not _unreached(graph.adjacency, members)


def build_graph(nodes, edges, contest_names=None, keys=None, unit_level="precinct") -> DualGraph:
    """Validate and build a :class:`DualGraph`.

    ``nodes`` may be :class:`NodeRecord` instances or plain mappings with
    ``population`` and optionally ``vap``, ``county`` and ``votes``.
    """
    records = []
    for i, nd in enumerate(nodes):
        if isinstance(nd, NodeRecord):
            records.append(nd)
            continue
        if isinstance(nd, (int, np.integer)):
            nd = {"population": int(nd)}
        votes = {
            c: (as_fraction(dr[0]), as_fraction(dr[1])) for c, dr in dict(nd.get("votes", {})).items()
        }
        records.append(
            NodeRecord(
                id=int(nd.get("id", i)),
                population=int(nd["population"]),
                vap=int(nd.get("vap", 0)),
                county=str(nd.get("county", "")),
                votes=votes,
            )
        )
    return DualGraph(records, edges, contest_names, keys, unit_level)


def grid_graph(rows: int, cols: int, population=1, county=None, votes=None) -> DualGraph:
    """Rectangular lattice; node ``r * cols + c`` sits at row r, column c.

    ``population``/``county``/``votes`` may be constants or callables of
    ``(r, c)``.
    """
    def pick(v, r, c):
        return v(r, c) if callable(v) else v

    nodes = []
    for r in range(rows):
        for c in range(cols):
            nodes.append(
                {
                    "population": pick(population, r, c),
                    "county": pick(county, r, c) if county is not None else "",
                    "votes": pick(votes, r, c) if votes is not None else {},
                }
            )
    edges = []
    for r in range(rows):
        for c in range(cols):
            i = r * cols + c
            if c + 1 < cols:
                edges.append((i, i + 1))
            if r + 1 < rows:
                edges.append((i, i + cols))
    return build_graph(nodes, edges)


class Assignment:
    """A districting plan: node -> district in ``0..k-1`` with cached populations.

    Instances are treated as values; the chain produces new ones instead of
    mutating.
    """

    __slots__ = ("district_of", "k", "district_pops")

    def __init__(self, district_of: np.ndarray, k: int, district_pops: np.ndarray):
        self.district_of = district_of
        self.k = k
        self.district_pops = district_pops

    def members(self, district: int) -> np.ndarray:
        return np.flatnonzero(self.district_of == district)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Assignment):
            return NotImplemented
        return self.k == other.k and np.array_equal(self.district_of, other.district_of)

    def __repr__(self) -> str:
        return f"Assignment(k={self.k}, pops={self.district_pops.tolist()})"

    def as_partition(self) -> frozenset:
        """Label-free view: the set of districts as frozensets of nodes."""
        return frozenset(frozenset(self.members(d).tolist()) for d in range(self.k))


def make_assignment(graph: DualGraph, district_of, k: int | None = None, check_contiguity: bool = True) -> Assignment:
    labels = np.asarray(district_of, dtype=np.int64).copy()
    if labels.shape != (len(graph),):
        raise InvalidAssignment(f"expected {len(graph)} labels, got shape {labels.shape}")
    if k is None:
        k = int(labels.max()) + 1
    if labels.min() < 0 or labels.max() >= k:
        raise InvalidAssignment(f"district ids must lie in 0..{k - 1}")
    pops = np.bincount(labels, weights=graph.population, minlength=k).astype(np.int64)
    sizes = np.bincount(labels, minlength=k)
    empty = np.flatnonzero(sizes == 0)
    if empty.size:
        raise InvalidAssignment(f"district {int(empty[0])} is empty")
    labels.setflags(write=False)
    a = Assignment(labels, k, pops)
    if check_contiguity:
        for d in range(k):
            if not contiguous(graph, a, d):
                raise InvalidAssignment(f"district {d} is not contiguous")
    return a


def _check_district(assignment: Assignment, district_id: int) -> None:
    if not 0 <= district_id < assignment.k:
        raise UnknownDistrict(f"district {district_id} not in 0..{assignment.k - 1}")


def contiguous(graph: DualGraph, assignment: Assignment, district_id: int) -> bool:
    _check_district(assignment, district_id)
    return is_connected_subset(graph, assignment.members(district_id).tolist())


def district_population(graph: DualGraph, assignment: Assignment, district_id: int) -> int:
    _check_district(assignment, district_id)
    return int(graph.population[assignment.district_of == district_id].sum())


def cut_edge_mask(graph: DualGraph, assignment: Assignment) -> np.ndarray:
    return assignment.district_of[graph.edge_u] != assignment.district_of[graph.edge_v]


def adjacent_district_pairs(graph: DualGraph, assignment: Assignment) -> set[tuple[int, int]]:
    du = assignment.district_of[graph.edge_u]
    dv = assignment.district_of[graph.edge_v]
    mask = du != dv
    lo = np.minimum(du[mask], dv[mask])
    hi = np.maximum(du[mask], dv[mask])
    return set(zip(lo.tolist(), hi.tolist()))


def validate_plan(graph: DualGraph, assignment: Assignment, window=None) -> list[str]:
    """Problems with a plan (empty list when valid).

    Checks non-empty districts, contiguity, the population cache and, when a
    :class:`~recomscale.tree.BalanceWindow` is given, population balance.
    """
    problems = []
    recomputed = np.bincount(assignment.district_of, weights=graph.population, minlength=assignment.k)
    if not np.array_equal(recomputed.astype(np.int64), assignment.district_pops):
        problems.append("district_pops cache out of date")
    for d in range(assignment.k):
        members = assignment.members(d)
        if members.size == 0:
            problems.append(f"district {d} empty")
            continue
        if not is_connected_subset(graph, members.tolist()):
            problems.append(f"district {d} not contiguous")
        if window is not None and not window.contains(int(recomputed[d])):
            problems.append(f"district {d} population {int(recomputed[d])} outside [{window.lo}, {window.hi}]")
    return problems
