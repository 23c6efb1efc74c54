"""Synthetic grid states used as fixtures and desk-scale experiments."""
from __future__ import annotations

from fractions import Fraction
from typing import Mapping

from .graph import DualGraph, as_fraction, grid_graph


def unit_grid(rows: int, cols: int) -> DualGraph:
    return grid_graph(rows, cols, population=1)


def _county(r, c, county_size):
    return f"C{r // county_size:02d}_{c // county_size:02d}"


def city_nodes(rows: int, cols: int, n_city: int) -> list[int]:
    """The ``n_city`` cells nearest the grid centre (ties by node id)."""
    cr, cc = (rows - 1) / 2, (cols - 1) / 2
    order = sorted(range(rows * cols), key=lambda i: ((i // cols - cr) ** 2 + (i % cols - cc) ** 2, i))
    return sorted(order[:n_city])


def city_state(
    rows: int = 30,
    cols: int = 30,
    city_fraction=0.2,
    city_lead=0.2,
    shares: Mapping[str, object] | None = None,
    turnout: int = 100,
    county_size: int = 5,
) -> DualGraph:
    """Unit-population grid with one compact Democratic city.

    For each contest the city votes ``share + city_lead`` Democratic and the
    rest of the state is uniform, calibrated so the statewide two-party
    share is exactly ``share``.  With the defaults the city is 70% Democratic
    and the state 50.0%.
    """
    if shares is None:
        shares = {"SYN": Fraction(1, 2)}
    n = rows * cols
    n_city = round(as_fraction(city_fraction) * n)
    city = set(city_nodes(rows, cols, n_city))
    lead = as_fraction(city_lead)
    per_contest = {}
    for name, s in shares.items():
        s = as_fraction(s)
        city_share = s + lead
        rural_share = (s * n - city_share * n_city) / (n - n_city)
        if not (0 <= city_share <= 1 and 0 <= rural_share <= 1):
            raise ValueError(f"contest {name}: infeasible calibration (city {city_share}, rural {rural_share})")
        per_contest[name] = (city_share * turnout, rural_share * turnout)

    def votes(r, c):
        in_city = r * cols + c in city
        out = {}
        for name, (city_dem, rural_dem) in per_contest.items():
            dem = city_dem if in_city else rural_dem
            out[name] = (dem, turnout - dem)
        return out

    return grid_graph(rows, cols, population=1, county=lambda r, c: _county(r, c, county_size), votes=votes)


def mirrored_state(rows: int = 6, half_cols: int = 6, county_size: int = 3, seed_pattern=None) -> DualGraph:
    """Grid of ``rows x 2*half_cols`` whose right half mirrors the left.

    Populations are 1; votes follow ``seed_pattern(r, c) -> dem share`` on the
    left half (a diagonal gradient by default) and are reflected onto the
    right.  Counties are ``W*`` on the left half and ``E*`` on the right.
    """
    if seed_pattern is None:
        def seed_pattern(r, c):
            return Fraction(30 + 20 * ((r + c) % 3), 100)

    cols = 2 * half_cols

    def left_col(c):
        return c if c < half_cols else cols - 1 - c

    def votes(r, c):
        s = as_fraction(seed_pattern(r, left_col(c)))
        return {"MIR": (100 * s, 100 * (1 - s))}

    def county(r, c):
        side = "W" if c < half_cols else "E"
        return f"{side}{r // county_size}{left_col(c) // county_size}"

    return grid_graph(rows, cols, population=1, county=county, votes=votes)


def split_state(rows: int = 6, cols: int = 9, west_cols: int = 3) -> DualGraph:
    """Grid whose first ``west_cols`` columns form county ``West``, rest ``East``.

    Two contests with varied local support so every panel has spread.
    """
    def votes(r, c):
        a = Fraction(20 + (7 * r + 11 * c) % 60, 100)
        b = Fraction(35 + (5 * r + 3 * c * c) % 30, 100)
        return {"A": (1000 * a, 1000 * (1 - a)), "B": (700 * b, 700 * (1 - b))}

    return grid_graph(
        rows, cols, population=1, county=lambda r, c: "West" if c < west_cols else "East", votes=votes
    )
