from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from recomscale.chain import ChainParams
from recomscale.errors import CountyOverlap, RegionDisconnected, UncoveredCounty, ZeroTurnout
from recomscale.graph import build_graph
from recomscale.regions import (
    FULL,
    PAIRS,
    RegionSpec,
    region_vote_table,
    run_region_ensembles,
    validate_split,
)
from recomscale.stats import mean_seat_share
from recomscale.synth import mirrored_state, split_state


def two_county_graph():
    return build_graph(
        [{"population": 4, "county": "a", "votes": {"X": (3, 1)}},
         {"population": 8, "county": "b", "votes": {"X": (2, 6)}}],
        [(0, 1)],
    )


def test_exact_ratio():
    rep = validate_split(two_county_graph(), RegionSpec("W", ["a"]), RegionSpec("E", ["b"]), (1, 2))
    assert (rep.pop_a, rep.pop_b, rep.deviation_from_ratio) == (4, 8, 0)
    assert rep.total == 12


def test_split_errors():
    g = two_county_graph()
    with pytest.raises(CountyOverlap):
        validate_split(g, RegionSpec("W", ["a", "b"]), RegionSpec("E", ["b"]))
    with pytest.raises(UncoveredCounty):
        validate_split(g, RegionSpec("W", ["a"]), RegionSpec("E", []))
    path = build_graph(
        [{"population": 1, "county": c} for c in "aba"], [(0, 1), (1, 2)]
    )
    with pytest.raises(RegionDisconnected):
        validate_split(path, RegionSpec("W", ["a"]), RegionSpec("E", ["b"]))


def test_deviation_counts_persons():
    g = split_state(6, 9, 3)
    rep = validate_split(g, RegionSpec("West", ["West"]), RegionSpec("East", ["East"]), (1, 2))
    assert rep.deviation_from_ratio == 0
    rep = validate_split(g, RegionSpec("West", ["West"]), RegionSpec("East", ["East"]), (1, 1))
    assert rep.deviation_from_ratio == Fraction(9)


def test_mixture_identity():
    g = split_state(6, 9, 3)
    west, east = RegionSpec("West", ["West"]), RegionSpec("East", ["East"])
    table = region_vote_table(g, [west, east])
    for c in g.contest_names:
        tw = sum(sum(g.nodes[i].votes[c]) for i in west.node_ids(g))
        te = sum(sum(g.nodes[i].votes[c]) for i in east.node_ids(g))
        mix = (tw * table[c]["West"] + te * table[c]["East"]) / (tw + te)
        assert mix == table[c][FULL]


def test_zero_turnout_cell():
    g = build_graph(
        [{"population": 1, "county": "a", "votes": {"X": (0, 0)}},
         {"population": 1, "county": "b", "votes": {"X": (1, 1)}}],
        [(0, 1)],
    )
    table = region_vote_table(g, [RegionSpec("W", ["a"]), RegionSpec("E", ["b"])])
    assert isinstance(table["X"]["W"], ZeroTurnout)
    assert table["X"]["E"] == Fraction(1, 2)


def test_region_ensembles_structure():
    g = split_state(6, 9, 3)
    west, east = RegionSpec("West", ["West"], 2), RegionSpec("East", ["East"], 4)
    res = run_region_ensembles(g, west, east, ChainParams(k=6, epsilon=0.1, steps=60, rng_seed=2), 6)
    assert set(res.histograms) == {"West", "East", FULL, PAIRS}
    for c in g.contest_names:
        hw, he = res.histograms["West"][c], res.histograms["East"][c]
        pairs = res.histograms[PAIRS][c]
        assert pairs.total == hw.total * he.total == 3600
        assert pairs.k == 6
    # region chains balance against their own ideal population
    assert res.runs["West"].params.k == 2
    assert res.runs["West"].final_plan.district_pops.tolist() == [9, 9]
    assert sorted(res.runs["East"].final_plan.district_pops.tolist()) == [9, 9, 9, 9]


def test_region_ensembles_parallel_matches_serial():
    g = split_state(6, 9, 3)
    west, east = RegionSpec("West", ["West"], 2), RegionSpec("East", ["East"], 4)
    params = ChainParams(k=6, epsilon=0.1, steps=40, rng_seed=7)
    a = run_region_ensembles(g, west, east, params, 6)
    b = run_region_ensembles(g, west, east, params, 6, workers=3)
    assert a.histograms == b.histograms


@pytest.mark.slow
def test_mirrored_regions_indistinguishable():
    g = mirrored_state(6, 6, county_size=3)
    counties = {rec.county for rec in g.nodes}
    west = RegionSpec("West", [c for c in counties if c.startswith("W")], 4)
    east = RegionSpec("East", [c for c in counties if c.startswith("E")], 4)
    # thinning makes draws close to independent, which the chi-square test assumes
    params = ChainParams(k=8, epsilon=0.1, steps=1000, rng_seed=31, thin=20)
    res = run_region_ensembles(g, west, east, params, 8)
    hw, he = res.histograms["West"]["MIR"], res.histograms["East"]["MIR"]
    table = np.zeros((2, 3), dtype=int)
    for row, h in enumerate((hw, he)):
        for s, n in h.counts.items():
            table[row, min(int(s), 2)] += n
    table = table[:, table.sum(axis=0) > 0]
    p = stats.chi2_contingency(table).pvalue if table.shape[1] > 1 else 1.0
    assert p > 0.01
    assert abs(float(mean_seat_share(hw) - mean_seat_share(he))) < 0.05
