"""Acceptance gate.

One test per criterion; each records a PASS/FAIL line that is echoed in the
terminal summary (see ``conftest.py``).  Criterion 8 needs external
Pennsylvania data: set ``RECOMSCALE_PA_GRAPH`` to a graph file carrying the
PRES16 contest (``RECOMSCALE_PA_ELECTIONS`` optionally names an election
config).  Without it the criterion is reported as SKIP.
"""
import itertools
import os
import random
import time
from fractions import Fraction
from pathlib import Path

import networkx as nx
import numpy as np
import pytest
from scipy.stats import spearmanr

from recomscale import io
from recomscale.chain import ChainParams, run_chain
from recomscale.cli import main
from recomscale.elections import efficiency_gap_simplified, prorate_to_blocks, share, statewide_share
from recomscale.graph import build_graph, grid_graph
from recomscale.regions import FULL, PAIRS, RegionSpec, region_vote_table, run_region_ensembles
from recomscale.stats import mean_seat_share, pair_convolution, seat_histogram
from recomscale.synth import city_state, split_state

from conftest import enumerate_equal_splits, nx_grid


@pytest.fixture
def gate(request):
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def record(n, name, ok, detail=""):
        line = f"criterion {n} {name}: {'PASS' if ok else 'FAIL'}" + (f" ({detail})" if detail else "")
        lines.append(line)
        print(line)
        assert ok, line

    record.lines = lines
    return record


def nx_valid(g_nx, labels, k, lo, hi):
    for d in range(k):
        nodes = [i for i, x in enumerate(labels) if x == d]
        if not (lo <= len(nodes) <= hi) or not nx.is_connected(g_nx.subgraph(nodes)):
            return False
    return True


def test_c1_validity_suite(gate):
    g, g_nx = grid_graph(6, 6), nx_grid(6, 6)
    bad = total = 0
    start = time.perf_counter()
    for k in (2, 3, 4):
        params = ChainParams(k=k, epsilon=0.05, steps=10_000, rng_seed=100 + k)
        w = params.window(g)
        plans = []
        run_chain(g, params, observers=[lambda p: plans.append(p.district_of.tolist())])
        for labels in plans:
            total += 1
            bad += not nx_valid(g_nx, labels, k, w.lo, w.hi)
    elapsed = time.perf_counter() - start
    gate(1, "validity suite", bad == 0 and total == 30_000 and elapsed < 60,
         f"{total} plans, {bad} invalid, {elapsed:.1f}s")


def test_c2_enumeration_oracle(gate):
    splits = enumerate_equal_splits(nx_grid(4, 4))
    g = grid_graph(4, 4)
    visited = []
    run_chain(g, ChainParams(k=2, epsilon=0, steps=10_000, rng_seed=2),
              observers=[lambda p: visited.append(p.as_partition())])
    outside = sum(p not in splits for p in visited)
    coverage = len(set(visited) & splits) / len(splits)
    gate(2, "enumeration oracle", outside == 0 and coverage >= 0.5,
         f"{len(splits)} splits enumerated, {outside} violations, coverage {coverage:.2f}")


def test_c3_convolution_exactness(gate):
    g = split_state(6, 9, 3)
    west, east = RegionSpec("West", ["West"], 2), RegionSpec("East", ["East"], 4)
    res = run_region_ensembles(g, west, east, ChainParams(k=6, epsilon=0.1, steps=100, rng_seed=3), 6,
                               contests=list(g.contest_names))
    ok = True
    for c in g.contest_names:
        sw, se = res.runs["West"].seats[c], res.runs["East"].seats[c]
        brute = seat_histogram([a + b for a, b in itertools.product(sw, se)], 6, c)
        conv = pair_convolution(seat_histogram(sw, 2, c), seat_histogram(se, 4, c))
        ok &= len(sw) == len(se) == 100 and conv == brute and conv.total == 10_000
        ok &= conv == res.histograms[PAIRS][c]
    gate(3, "convolution exactness", ok, f"contests {', '.join(g.contest_names)}, 10000 pairs each")


def test_c4_efficiency_gap_line(gate):
    rng = np.random.default_rng(4)
    worst = max(abs(efficiency_gap_simplified(2 * v - 0.5, v)) for v in rng.uniform(0.25, 0.75, 1000))
    anchors = efficiency_gap_simplified(0, 0.25) == 0 and efficiency_gap_simplified(1, 0.75) == 0
    gate(4, "efficiency-gap line", worst <= 1e-12 and anchors, f"max |EG| {worst:.2e}")


def test_c5_proration_conservation(gate):
    rnd = random.Random(5)
    votes, membership, vap, pop = {}, {}, {}, {}
    for p in range(1000):
        votes[p] = {"X": (rnd.randint(0, 5000), rnd.randint(0, 5000)), "Y": (rnd.randint(0, 900), rnd.randint(1, 900))}
        for j in range(rnd.randint(1, 8)):
            b = (p, j)
            membership[b] = p
            vap[b] = rnd.choice([0, rnd.randint(0, 400)])
            pop[b] = vap[b] + rnd.randint(0, 100)
    blocks = prorate_to_blocks(votes, membership, vap, pop)
    ok = True
    for p, cols in votes.items():
        mine = [b for b in blocks if b[0] == p]
        for c, (d, r) in cols.items():
            ok &= sum(blocks[b][c][0] for b in mine) == d and sum(blocks[b][c][1] for b in mine) == r

    def as_graph(records):
        recs = [{"population": 1, "votes": v} for v in records]
        return build_graph(recs, [(i, i + 1) for i in range(len(recs) - 1)])

    pg = as_graph(list(votes.values()))
    bg = as_graph([blocks[b] for b in sorted(blocks)])
    for c in ("X", "Y"):
        ok &= statewide_share(pg, c) == statewide_share(bg, c)
    gate(5, "proration conservation", ok, f"1000 precincts, {len(blocks)} blocks")


def _csv_bytes(root: Path) -> dict:
    return {p.relative_to(root): p.read_bytes() for p in sorted(root.rglob("*.csv"))}


def test_c6_determinism(gate, tmp_path):
    graph = tmp_path / "city.json"
    io.save_graph(city_state(12, 12, shares={"A": Fraction(1, 2), "B": Fraction(9, 20)}), graph)
    ks = "2,3,4,6,8"
    max_workers = max(os.cpu_count() or 1, 5)
    common = ["--graph", str(graph), "--steps", "300", "--epsilon", "0.05", "--seed", "66"]
    codes = [
        main(["multiscale", *common, "--k-list", ks, "--workers", "1", "--out", str(tmp_path / "serial")]),
        main(["multiscale", *common, "--k-list", ks, "--workers", str(max_workers), "--out", str(tmp_path / "par")]),
        main(["replay", str(tmp_path / "serial" / "manifest.json"), "--out", str(tmp_path / "replayed"),
              "--workers", str(max_workers)]),
    ]
    split = tmp_path / "split.json"
    io.save_graph(split_state(6, 9, 3), split)
    spec = tmp_path / "spec.json"
    spec.write_text('{"West": ["West"], "East": ["East"]}')
    rcommon = ["--graph", str(split), "--spec", str(spec), "--kw", "2", "--ke", "4", "--kfull", "6",
               "--steps", "100", "--epsilon", "0.1", "--seed", "67"]
    codes.append(main(["regions", *rcommon, "--workers", "1", "--out", str(tmp_path / "rs")]))
    codes.append(main(["regions", *rcommon, "--workers", "3", "--out", str(tmp_path / "rp")]))
    serial = _csv_bytes(tmp_path / "serial")
    ok = codes == [0] * 5 and len(serial) > 0
    ok &= serial == _csv_bytes(tmp_path / "par") == _csv_bytes(tmp_path / "replayed")
    ok &= _csv_bytes(tmp_path / "rs") == _csv_bytes(tmp_path / "rp")
    gate(6, "determinism", ok, f"{len(serial)} multiscale CSVs compared at 1 and {max_workers} workers plus replay")


def test_c7_desk_reproduction(gate):
    g = city_state(30, 30)
    vote = statewide_share(g, "SYN")
    means, stds = {}, {}
    for k in (5, 10, 30):
        run = run_chain(g, ChainParams(k=k, epsilon=0.02, steps=1000, rng_seed=700 + k), contests=["SYN"])
        frac = np.array(run.seats["SYN"], dtype=float) / k
        means[k], stds[k] = float(frac.mean()), float(frac.std())
    rho = spearmanr(list(stds), list(stds.values())).statistic
    ok = vote == Fraction(1, 2) and all(m < 0.5 for m in means.values()) and rho < -0.8
    detail = ", ".join(f"k={k} mean {means[k]:.3f} sd {stds[k]:.3f}" for k in means) + f", rho {rho:.2f}"
    gate(7, "desk-scale reproduction", ok, detail)


def test_c8_pennsylvania(gate):
    path = os.environ.get("RECOMSCALE_PA_GRAPH")
    if not path:
        gate.lines.append("criterion 8 Pennsylvania PRES16: SKIP (RECOMSCALE_PA_GRAPH not set)")
        pytest.skip("RECOMSCALE_PA_GRAPH not set")
    cfg = os.environ.get("RECOMSCALE_PA_ELECTIONS")
    g = io.load_graph(path, io.load_election_config(cfg) if cfg else None)
    vote = float(statewide_share(g, "PRES16"))
    run = run_chain(g, ChainParams(k=18, epsilon=0.02, steps=10_000, rng_seed=18), contests=["PRES16"])
    mean = float(mean_seat_share(seat_histogram(run.seats["PRES16"], 18, "PRES16")))
    gate(8, "Pennsylvania PRES16", abs(mean - 0.3783) <= 0.05 and abs(vote - 0.4965) <= 0.0005,
         f"mean seat share {mean:.4f}, statewide {vote:.4f}")


def test_c9_region_mixture(gate):
    ok = True
    checked = 0
    for rows, cols, west_cols in [(6, 9, 3), (4, 12, 4), (5, 10, 5), (6, 6, 1)]:
        g = split_state(rows, cols, west_cols)
        west, east = RegionSpec("West", ["West"]), RegionSpec("East", ["East"])
        table = region_vote_table(g, [west, east])
        for c in g.contest_names:
            tw = sum(sum(g.nodes[i].votes[c]) for i in west.node_ids(g))
            te = sum(sum(g.nodes[i].votes[c]) for i in east.node_ids(g))
            mix = (tw * table[c]["West"] + te * table[c]["East"]) / (tw + te)
            ok &= abs(float(mix - table[c][FULL])) <= 1e-12
            ok &= table[c][FULL] == share(*_totals(g, c))
            checked += 1
    g = split_state(6, 9, 3)
    res = run_region_ensembles(g, RegionSpec("West", ["West"], 2), RegionSpec("East", ["East"], 4),
                               ChainParams(k=6, epsilon=0.1, steps=37, rng_seed=9), 6)
    for c in g.contest_names:
        h = res.histograms
        ok &= h[PAIRS][c].total == h["West"][c].total * h["East"][c].total == 37 * 37
    gate(9, "region mixture identity", ok, f"{checked} fixture/contest cells, pairs total 1369")


def _totals(g, c):
    return sum(n.votes[c][0] for n in g.nodes), sum(n.votes[c][1] for n in g.nodes)
