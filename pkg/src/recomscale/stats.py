"""Seat histograms and the products built from them."""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ContestMismatch, EmptyHistogram, KeyMismatch, OutOfRangeSeats

# district counts of the three Pennsylvania legislative bodies
REFERENCE_SCALES = {18: "U.S. Congress", 50: "PA state Senate", 203: "PA state House"}

# (vote share, seat share) endpoints of the two reference lines
REFERENCE_LINES = {
    "proportionality": ((0.0, 0.0), (1.0, 1.0)),
    "efficiency_gap_zero": ((0.25, 0.0), (0.75, 1.0)),
}


def proportionality_line(v):
    return v


def efficiency_gap_zero_line(v):
    return 2 * v - 0.5


@dataclass
class SeatHistogram:
    """Plan counts by Democratic seats won, for one (k, contest).

    Seat keys are integers, or halves under the ``count_half`` tie policy.
    """

    k: int
    contest: str
    counts: dict = field(default_factory=dict)
    total: int = 0

    def frequencies(self) -> dict:
        return {s: c / self.total for s, c in sorted(self.counts.items())}

    def __eq__(self, other):
        if not isinstance(other, SeatHistogram):
            return NotImplemented
        return (
            self.k == other.k
            and self.contest == other.contest
            and self.total == other.total
            and {s: c for s, c in self.counts.items() if c} == {s: c for s, c in other.counts.items() if c}
        )


def _normalize_seat(s):
    if isinstance(s, float) and s.is_integer():
        return int(s)
    return s


def seat_histogram(observations: Iterable, k: int, contest: str) -> SeatHistogram:
    counts = Counter()
    total = 0
    for s in observations:
        if not 0 <= s <= k or (s * 2) != int(s * 2):
            raise OutOfRangeSeats(f"seat count {s} not in [0, {k}]")
        counts[_normalize_seat(s)] += 1
        total += 1
    return SeatHistogram(k, contest, dict(sorted(counts.items())), total)


def merge(a: SeatHistogram, b: SeatHistogram) -> SeatHistogram:
    if a.k != b.k or a.contest != b.contest:
        raise KeyMismatch(f"cannot merge ({a.k}, {a.contest}) with ({b.k}, {b.contest})")
    counts = Counter(a.counts)
    counts.update(b.counts)
    return SeatHistogram(a.k, a.contest, dict(sorted(counts.items())), a.total + b.total)


def pair_convolution(a: SeatHistogram, b: SeatHistogram) -> SeatHistogram:
    """Seat histogram of every (a-plan, b-plan) pairing.

    Districts in disjoint regions add, so pairing counts is a discrete
    convolution; totals multiply.
    """
    if a.contest != b.contest:
        raise ContestMismatch(f"{a.contest} vs {b.contest}")
    counts = Counter()
    for sa, ca in a.counts.items():
        for sb, cb in b.counts.items():
            counts[_normalize_seat(sa + sb)] += ca * cb
    return SeatHistogram(a.k + b.k, a.contest, dict(sorted(counts.items())), a.total * b.total)


def mean_seat_share(h: SeatHistogram) -> Fraction:
    """Exact mean Democratic seat share ``sum(seats * count) / (total * k)``."""
    if h.total <= 0:
        raise EmptyHistogram(f"histogram for ({h.k}, {h.contest}) is empty")
    num = sum(Fraction(s) * c for s, c in h.counts.items())
    return num / (h.total * h.k)


def seat_share_std(h: SeatHistogram) -> float:
    """Population standard deviation of seat share across the ensemble."""
    mean = mean_seat_share(h)
    var = sum((Fraction(s) / h.k - mean) ** 2 * c for s, c in h.counts.items()) / h.total
    return float(var) ** 0.5


@dataclass(frozen=True)
class ScaleGridCell:
    k: int
    seats: float
    seat_fraction: float
    frequency: float
    count: int
    total: int

    @property
    def is_reference_scale(self) -> bool:
        return self.k in REFERENCE_SCALES


def to_scale_grid(histograms: Iterable[SeatHistogram]) -> list[ScaleGridCell]:
    """One dot per (k, observed seat count), sorted by (k, seats)."""
    cells = []
    for h in histograms:
        for s, c in sorted(h.counts.items()):
            if c:
                cells.append(ScaleGridCell(h.k, s, s / h.k, c / h.total, c, h.total))
    cells.sort(key=lambda cell: (cell.k, cell.seats))
    return cells


def histogram_from_cells(cells: Sequence[ScaleGridCell], contest: str) -> SeatHistogram:
    if not cells:
        raise EmptyHistogram("no cells")
    k, total = cells[0].k, cells[0].total
    if any(c.k != k or c.total != total for c in cells):
        raise KeyMismatch("cells span more than one histogram")
    return SeatHistogram(k, contest, {_normalize_seat(c.seats): c.count for c in cells}, total)


@dataclass(frozen=True)
class SeatsVotesPoint:
    contest: str
    vote_share: float
    k: int
    seat_fraction: float
    frequency: float


def seats_votes_points(vote_shares: Mapping[str, float], histograms_at_k: Iterable[SeatHistogram]) -> list[SeatsVotesPoint]:
    """Seats-votes cloud: x is the contest's statewide share, y the seat share.

    Sorted by (vote_share, seat_fraction).  The reference lines live in
    :data:`REFERENCE_LINES`.
    """
    points = []
    for h in histograms_at_k:
        v = float(vote_shares[h.contest])
        for s, c in h.counts.items():
            if c:
                points.append(SeatsVotesPoint(h.contest, v, h.k, s / h.k, c / h.total))
    points.sort(key=lambda p: (p.vote_share, p.seat_fraction, p.k, p.contest))
    return points
