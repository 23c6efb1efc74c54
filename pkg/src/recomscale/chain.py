"""Recombination (ReCom) Markov chain and multi-scale sweeps."""
from __future__ import annotations

import hashlib
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .elections import TIE_POLICIES, seats_won
from .errors import BalanceUnreachable, ChainStalled, RecomError
from .graph import Assignment, DualGraph, adjacent_district_pairs, cut_edge_mask
from .tree import TREE_METHODS, BalanceWindow, bipartition, recursive_seed

log = logging.getLogger(__name__)

PAIR_SELECTIONS = ("uniform", "cut_edge")

DERIVED_SEED_RULE = (
    "seed(key) = int.from_bytes(sha256(f'{base_seed}:{key}'.encode()).digest()[:8], 'big'); "
    "key is the district count k for multiscale runs and the region name for region runs"
)


def derive_seed(base_seed: int, key) -> int:
    digest = hashlib.sha256(f"{int(base_seed)}:{key}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class ChainParams:
    k: int
    epsilon: float
    steps: int
    rng_seed: int
    max_tree_attempts: int = 1000
    pair_retries: int = 50
    burn_in: int = 0
    thin: int = 1
    pair_selection: str = "uniform"
    tree_method: str = "mst"
    seed_attempts: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.max_tree_attempts < 1 or self.pair_retries < 1 or self.seed_attempts < 1:
            raise ValueError("retry bounds must be >= 1")
        if self.burn_in < 0 or self.thin < 1:
            raise ValueError("burn_in must be >= 0 and thin >= 1")
        if self.pair_selection not in PAIR_SELECTIONS:
            raise ValueError(f"pair_selection must be one of {PAIR_SELECTIONS}")
        if self.tree_method not in TREE_METHODS:
            raise ValueError(f"tree_method must be one of {TREE_METHODS}")

    def window(self, graph: DualGraph) -> BalanceWindow:
        return BalanceWindow.for_plan(graph.total_population, self.k, self.epsilon)

    def replace(self, **changes) -> "ChainParams":
        return ChainParams(**{**asdict(self), **changes})


class SeatRecorder:
    """Observer storing Democratic seats per contest for every plan it sees."""

    def __init__(self, graph: DualGraph, contests: Iterable[str], tie_policy: str = "count_rep"):
        if tie_policy not in TIE_POLICIES:
            raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
        self.graph = graph
        self.contests = tuple(contests)
        self.tie_policy = tie_policy
        self.seats: dict[str, list] = {c: [] for c in self.contests}

    def __call__(self, assignment: Assignment) -> None:
        for c in self.contests:
            self.seats[c].append(seats_won(self.graph, assignment, c, self.tie_policy).dem)


@dataclass
class EnsembleRun:
    params: ChainParams
    seed_plan: Assignment
    final_plan: Assignment
    n_observed: int
    seats: dict[str, list] = field(default_factory=dict)
    tie_policy: str = "count_rep"


def _choose_pair(graph, assignment, params, rng) -> tuple[int, int]:
    if params.pair_selection == "uniform":
        pairs = sorted(adjacent_district_pairs(graph, assignment))
        return pairs[int(rng.integers(len(pairs)))]
    # cut-edge weighted: pick a uniformly random cut edge
    cut = np.flatnonzero(cut_edge_mask(graph, assignment))
    e = int(cut[int(rng.integers(cut.size))])
    a = int(assignment.district_of[graph.edge_u[e]])
    b = int(assignment.district_of[graph.edge_v[e]])
    return (a, b) if a < b else (b, a)


def recom_step(
    graph: DualGraph,
    assignment: Assignment,
    params: ChainParams,
    rng: np.random.Generator,
    window: BalanceWindow | None = None,
) -> Assignment:
    """Merge two adjacent districts and redivide them along a random spanning tree.

    Only the two chosen districts change.  A pair whose union yields no
    balanced cut within ``max_tree_attempts`` trees is abandoned for a fresh
    pair; after ``pair_retries`` abandoned pairs the chain is stalled.
    """
    if assignment.k < 2:
        raise ValueError("recom_step needs at least two districts")
    if window is None:
        window = params.window(graph)
    labels = assignment.district_of
    for _ in range(params.pair_retries):
        a, b = _choose_pair(graph, assignment, params, rng)
        union = np.flatnonzero((labels == a) | (labels == b))
        try:
            side_a, side_b = bipartition(graph, union, window, rng, params.max_tree_attempts, params.tree_method)
        except BalanceUnreachable:
            log.debug("pair (%d, %d) rejected", a, b)
            continue
        new = labels.copy()
        new[side_a] = a
        new[side_b] = b
        new.setflags(write=False)
        pops = assignment.district_pops.copy()
        pops[a] = int(graph.population[side_a].sum())
        pops[b] = int(graph.population[side_b].sum())
        return Assignment(new, assignment.k, pops)
    raise ChainStalled(f"{params.pair_retries} consecutive district pairs admitted no balanced split")


def run_chain(
    graph: DualGraph,
    params: ChainParams,
    observers: Sequence[Callable[[Assignment], None]] = (),
    contests: Iterable[str] = (),
    tie_policy: str = "count_rep",
    initial: Assignment | None = None,
) -> EnsembleRun:
    """Seed a plan and record ``params.steps`` post-step states.

    The seed plan itself is not observed.  ``burn_in`` steps are taken
    silently first and then every ``thin``-th state is observed.  With
    ``contests`` given, Democratic seats per contest are recorded on the
    returned run.
    """
    rng = np.random.default_rng(params.rng_seed)
    window = params.window(graph)
    if initial is None:
        initial = recursive_seed(
            graph, params.k, window, rng, params.seed_attempts, params.max_tree_attempts, params.tree_method
        )
    recorder = SeatRecorder(graph, contests, tie_policy)
    sinks = list(observers)
    if recorder.contests:
        sinks.append(recorder)

    plan = initial
    for _ in range(params.burn_in):
        plan = _advance(graph, plan, params, rng, window)
    observed = 0
    while observed < params.steps:
        for _ in range(params.thin):
            plan = _advance(graph, plan, params, rng, window)
        for sink in sinks:
            sink(plan)
        observed += 1
    return EnsembleRun(params, initial, plan, observed, recorder.seats, tie_policy)


def _advance(graph, plan, params, rng, window):
    if plan.k == 1:
        return plan
    return recom_step(graph, plan, params, rng, window)


@dataclass
class RunFailure:
    k: int
    error: RecomError


def _run_for_k(args):
    graph, params, contests, tie_policy = args
    try:
        return run_chain(graph, params, contests=contests, tie_policy=tie_policy)
    except RecomError as exc:
        return RunFailure(params.k, exc)


def run_multiscale(
    graph: DualGraph,
    k_list: Sequence[int],
    base_params: ChainParams,
    contests: Iterable[str] = (),
    tie_policy: str = "count_rep",
    workers: int = 1,
) -> list[EnsembleRun | RunFailure]:
    """One independent chain per district count, in ``k_list`` order.

    Each run is seeded with ``derive_seed(base_params.rng_seed, k)``, so the
    output for a given k does not depend on the list order or on ``workers``.
    Failures come back as :class:`RunFailure` entries; the sweep continues.
    """
    contests = tuple(contests)
    jobs = [
        (graph, base_params.replace(k=int(k), rng_seed=derive_seed(base_params.rng_seed, int(k))), contests, tie_policy)
        for k in k_list
    ]
    if workers <= 1 or len(jobs) <= 1:
        return [_run_for_k(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(_run_for_k, jobs))
