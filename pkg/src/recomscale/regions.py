"""Two-region (West/East style) split of a state along county lines."""
from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .chain import ChainParams, EnsembleRun, derive_seed, run_chain
from .elections import column_totals, share
from .errors import CountyOverlap, RegionDisconnected, UncoveredCounty, ZeroTurnout
from .graph import DualGraph, is_connected_subset
from .stats import SeatHistogram, pair_convolution, seat_histogram

FULL = "Full"
PAIRS = "E-W pairs"


def _run_job(job) -> EnsembleRun:
    graph, params, contests, tie_policy = job
    return run_chain(graph, params, contests=contests, tie_policy=tie_policy)


@dataclass(frozen=True)
class RegionSpec:
    name: str
    counties: frozenset
    k_region: int = 0

    def __init__(self, name: str, counties: Iterable[str], k_region: int = 0):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "counties", frozenset(counties))
        object.__setattr__(self, "k_region", int(k_region))

    def node_ids(self, graph: DualGraph) -> np.ndarray:
        return np.array([i for i, rec in enumerate(graph.nodes) if rec.county in self.counties], dtype=np.int64)


@dataclass(frozen=True)
class SplitReport:
    pop_a: int
    pop_b: int
    ratio_target: tuple[int, int]
    deviation_from_ratio: Fraction

    @property
    def total(self) -> int:
        return self.pop_a + self.pop_b


def validate_split(
    graph: DualGraph, region_a: RegionSpec, region_b: RegionSpec, ratio_target: tuple[int, int] = (1, 2)
) -> SplitReport:
    """Check that two county sets partition the state into contiguous pieces.

    ``deviation_from_ratio`` is ``|pop_a - total * ra / (ra + rb)|`` in persons.
    """
    overlap = region_a.counties & region_b.counties
    if overlap:
        raise CountyOverlap(f"counties in both regions: {sorted(overlap)}")
    covered = region_a.counties | region_b.counties
    uncovered = sorted({rec.county for rec in graph.nodes} - covered)
    if uncovered:
        raise UncoveredCounty(f"counties in no region: {uncovered}")
    pops = []
    for region in (region_a, region_b):
        ids = region.node_ids(graph)
        if ids.size == 0 or not is_connected_subset(graph, ids.tolist()):
            raise RegionDisconnected(f"region {region.name} is empty or not contiguous")
        pops.append(int(graph.population[ids].sum()))
    ra, rb = ratio_target
    expected = Fraction(graph.total_population * ra, ra + rb)
    return SplitReport(pops[0], pops[1], (ra, rb), abs(pops[0] - expected))


@dataclass
class RegionEnsembles:
    """West, East and full-state runs plus per-contest histograms.

    ``histograms[panel][contest]`` with panels ``region_a.name``,
    ``region_b.name``, ``"Full"`` and ``"E-W pairs"``.
    """

    report: SplitReport
    runs: dict[str, EnsembleRun]
    histograms: dict[str, dict[str, SeatHistogram]] = field(default_factory=dict)


def run_region_ensembles(
    graph: DualGraph,
    region_a: RegionSpec,
    region_b: RegionSpec,
    params: ChainParams,
    k_full: int,
    contests: Sequence[str] = (),
    tie_policy: str = "count_rep",
    ratio_target: tuple[int, int] = (1, 2),
    workers: int = 1,
) -> RegionEnsembles:
    """Independent chains on each region (region-local ideal population)
    and on the whole state, then West x East pairings by convolution.

    ``params.k`` and ``params.rng_seed`` are overridden per run; seeds come
    from ``derive_seed(params.rng_seed, name)``.
    """
    report = validate_split(graph, region_a, region_b, ratio_target)
    contests = tuple(contests) or graph.contest_names
    jobs = {}
    for region in (region_a, region_b):
        sub = graph.induced_subgraph(region.node_ids(graph))
        p = params.replace(k=region.k_region, rng_seed=derive_seed(params.rng_seed, region.name))
        jobs[region.name] = (sub, p, contests, tie_policy)
    p = params.replace(k=k_full, rng_seed=derive_seed(params.rng_seed, FULL))
    jobs[FULL] = (graph, p, contests, tie_policy)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=min(workers, 3)) as pool:
            runs = dict(zip(jobs, pool.map(_run_job, jobs.values())))
    else:
        runs = {name: _run_job(job) for name, job in jobs.items()}

    hists: dict[str, dict[str, SeatHistogram]] = {}
    for name, run in runs.items():
        hists[name] = {c: seat_histogram(run.seats[c], run.params.k, c) for c in contests}
    hists[PAIRS] = {c: pair_convolution(hists[region_a.name][c], hists[region_b.name][c]) for c in contests}
    return RegionEnsembles(report, runs, hists)


def region_vote_table(graph: DualGraph, regions: Sequence[RegionSpec], contests: Sequence[str] = ()) -> dict:
    """``table[contest][region]`` -> exact Democratic share, plus a ``"Full"`` column.

    A region with no two-party votes gets a :class:`ZeroTurnout` instance in
    its cell instead of a number.
    """
    contests = tuple(contests) or graph.contest_names
    columns = [(r.name, r.node_ids(graph).tolist()) for r in regions] + [(FULL, None)]
    table = {}
    for c in contests:
        row = {}
        for name, ids in columns:
            dem, rep = column_totals(graph, c, ids)
            try:
                row[name] = share(dem, rep)
            except ZeroTurnout:
                row[name] = ZeroTurnout(f"contest {c}, region {name}: zero two-party turnout")
        table[c] = row
    return table
