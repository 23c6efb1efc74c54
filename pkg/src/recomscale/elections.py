"""Vote tallies, seat counts and the simplified efficiency gap.

Vote columns are exact rationals.  The hot path (``seats_won``) sums floats
and falls back to exact sums only for districts too close to call in floating
point, so win/loss decisions are always exact.
"""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple

import numpy as np

from .errors import OrphanBlock, ZeroTurnout
from .graph import Assignment, DualGraph, as_fraction

TIE_POLICIES = ("count_rep", "count_dem", "count_half")


@dataclass(frozen=True)
class ContestSpec:
    name: str
    dem_column: str
    rep_column: str


@dataclass(frozen=True)
class ElectionTally:
    contest: str
    per_district: tuple[tuple[Fraction, Fraction], ...]

    @property
    def k(self) -> int:
        return len(self.per_district)


class SeatCount(NamedTuple):
    """Seats after the tie policy is applied; ``ties`` counts exact ties."""

    dem: int | float
    rep: int | float
    ties: int


def _name(contest) -> str:
    return contest.name if isinstance(contest, ContestSpec) else contest


def tally(graph: DualGraph, assignment: Assignment, contest) -> ElectionTally:
    c = _name(contest)
    dem = [Fraction(0)] * assignment.k
    rep = [Fraction(0)] * assignment.k
    for rec, d in zip(graph.nodes, assignment.district_of.tolist()):
        dv, rv = rec.votes[c]
        dem[d] += dv
        rep[d] += rv
    return ElectionTally(c, tuple(zip(dem, rep)))


def share(dem, rep) -> Fraction:
    dem, rep = as_fraction(dem), as_fraction(rep)
    if dem + rep == 0:
        raise ZeroTurnout("no two-party votes cast")
    return dem / (dem + rep)


def column_totals(graph: DualGraph, contest, nodes=None) -> tuple[Fraction, Fraction]:
    c = _name(contest)
    recs = graph.nodes if nodes is None else (graph.nodes[i] for i in nodes)
    dem = rep = Fraction(0)
    for rec in recs:
        dv, rv = rec.votes[c]
        dem += dv
        rep += rv
    return dem, rep


def statewide_share(graph: DualGraph, contest, nodes=None) -> Fraction:
    """Two-party Democratic share, exact.  ``nodes`` restricts to a subset."""
    dem, rep = column_totals(graph, contest, nodes)
    try:
        return share(dem, rep)
    except ZeroTurnout:
        raise ZeroTurnout(f"contest {_name(contest)}: zero two-party turnout") from None


def seats_won(graph: DualGraph, assignment: Assignment, contest, tie_policy: str = "count_rep") -> SeatCount:
    c = _name(contest)
    if tie_policy not in TIE_POLICIES:
        raise ValueError(f"tie_policy must be one of {TIE_POLICIES}")
    dem_col, rep_col = graph.vote_arrays(c)
    labels = assignment.district_of
    k = assignment.k
    dsum = np.bincount(labels, weights=dem_col, minlength=k)
    rsum = np.bincount(labels, weights=rep_col, minlength=k)
    diff = dsum - rsum
    close = np.abs(diff) <= 1e-9 * (dsum + rsum) + 1e-9
    sign = np.sign(diff).astype(np.int64)
    for d in np.flatnonzero(close).tolist():
        dem = rep = Fraction(0)
        for i in np.flatnonzero(labels == d).tolist():
            dv, rv = graph.nodes[i].votes[c]
            dem += dv
            rep += rv
        sign[d] = (dem > rep) - (dem < rep)
    dem_wins = int((sign > 0).sum())
    rep_wins = int((sign < 0).sum())
    ties = k - dem_wins - rep_wins
    if tie_policy == "count_rep":
        return SeatCount(dem_wins, rep_wins + ties, ties)
    if tie_policy == "count_dem":
        return SeatCount(dem_wins + ties, rep_wins, ties)
    if ties % 2 == 0:
        return SeatCount(dem_wins + ties // 2, rep_wins + ties // 2, ties)
    return SeatCount(dem_wins + ties / 2, rep_wins + ties / 2, ties)


def seat_share(dem_seats, k: int) -> float:
    if not 0 <= dem_seats <= k:
        raise ValueError(f"dem_seats {dem_seats} outside [0, {k}]")
    return dem_seats / k


def efficiency_gap_simplified(seat_share, vote_share):
    """Equal-turnout efficiency gap, ``(S - 1/2) - 2 (V - 1/2)``.

    Zero on the line ``S = 2V - 1/2``; negative values mean the Democrats
    won fewer seats than that standard predicts.
    """
    half = Fraction(1, 2)
    return (seat_share - half) - 2 * (vote_share - half)


def prorate_to_blocks(
    precinct_votes: Mapping[object, Mapping[str, tuple]],
    block_membership: Mapping[object, object],
    block_vap: Mapping[object, int],
    block_pop: Mapping[object, int] | None = None,
) -> dict[object, dict[str, tuple[Fraction, Fraction]]]:
    """Distribute precinct vote totals to census blocks.

    Blocks receive precinct votes in proportion to voting-age population;
    precincts with zero VAP fall back to total population, then to an equal
    split.  Arithmetic is exact, so every precinct's columns are preserved.
    """
    by_precinct: dict[object, list] = defaultdict(list)
    for block in block_vap:
        if block not in block_membership:
            raise OrphanBlock(f"block {block!r} has no parent precinct")
        precinct = block_membership[block]
        if precinct not in precinct_votes:
            raise OrphanBlock(f"block {block!r} maps to unknown precinct {precinct!r}")
        if block_vap[block] < 0 or (block_pop is not None and block_pop.get(block, 0) < 0):
            raise ValueError(f"block {block!r}: negative population")
        by_precinct[precinct].append(block)

    out: dict[object, dict[str, tuple[Fraction, Fraction]]] = {}
    for precinct, blocks in by_precinct.items():
        weights = [Fraction(block_vap[b]) for b in blocks]
        if sum(weights) == 0 and block_pop is not None:
            weights = [Fraction(block_pop.get(b, 0)) for b in blocks]
        if sum(weights) == 0:
            weights = [Fraction(1)] * len(blocks)
        total_w = sum(weights)
        for b, w in zip(blocks, weights):
            frac = w / total_w
            out[b] = {
                contest: (as_fraction(dem) * frac, as_fraction(rep) * frac)
                for contest, (dem, rep) in precinct_votes[precinct].items()
            }
    return out
