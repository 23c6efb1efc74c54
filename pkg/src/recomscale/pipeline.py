"""File-producing workflows behind the CLI.

Every workflow writes ``manifest.json`` into its output directory.  The
manifest holds everything needed to regenerate the CSVs byte for byte:
``replay(manifest)`` reruns it.
"""
from __future__ import annotations

import logging
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from . import __version__
from . import io
from .chain import DERIVED_SEED_RULE, ChainParams, RunFailure, derive_seed, run_chain, run_multiscale
from .elections import statewide_share
from .errors import SchemaMismatch
from .graph import DualGraph
from .regions import FULL, PAIRS, RegionSpec, region_vote_table, run_region_ensembles
from .stats import mean_seat_share, seat_histogram, seats_votes_points

log = logging.getLogger(__name__)


def _graph_block(graph_path, election_config) -> dict:
    block = {"path": str(graph_path), "sha256": io.file_digest(graph_path)}
    if election_config is not None:
        block["election_config"] = str(election_config)
        block["election_config_sha256"] = io.file_digest(election_config)
    return block


def _load(graph_path, election_config) -> DualGraph:
    specs = io.load_election_config(election_config) if election_config else None
    return io.load_graph(graph_path, specs)


def _select_contests(graph: DualGraph, contests: Sequence[str] | None) -> list[str]:
    if not contests:
        return list(graph.contest_names)
    unknown = [c for c in contests if c not in graph.contest_names]
    if unknown:
        raise SchemaMismatch(f"contests {unknown} not present in graph (have {list(graph.contest_names)})")
    return list(contests)


def _manifest(command: str, graph_path, election_config, contests, tie_policy, **extra) -> dict:
    return {
        "schema": io.MANIFEST_SCHEMA,
        "tool": "recomscale",
        "version": __version__,
        "command": command,
        "graph": _graph_block(graph_path, election_config),
        "contests": list(contests),
        "tie_policy": tie_policy,
        "derived_seed_rule": DERIVED_SEED_RULE,
        **extra,
    }


def _write_run_outputs(out: Path, run, contests, shares) -> None:
    io.write_seat_stream(out / "seats.csv", contests, run.seats)
    for c in contests:
        io.emit_histogram_csv(seat_histogram(run.seats[c], run.params.k, c), out / f"hist_{c}.csv")
    io.write_vote_shares(out / "vote_shares.csv", shares)


def _shares(graph, contests) -> dict:
    return {c: statewide_share(graph, c) for c in contests}


def do_run(graph_path, params: ChainParams, out, contests=None, tie_policy="count_rep", election_config=None) -> dict:
    graph = _load(graph_path, election_config)
    contests = _select_contests(graph, contests)
    out = Path(out)
    shares = _shares(graph, contests)
    run = run_chain(graph, params, contests=contests, tie_policy=tie_policy)
    _write_run_outputs(out, run, contests, shares)
    manifest = _manifest("run", graph_path, election_config, contests, tie_policy, params=asdict(params))
    io.write_json(out / "manifest.json", manifest)
    return manifest


def do_multiscale(
    graph_path, k_list, base_params: ChainParams, out, contests=None, tie_policy="count_rep", election_config=None, workers=1
) -> dict:
    graph = _load(graph_path, election_config)
    contests = _select_contests(graph, contests)
    out = Path(out)
    shares = _shares(graph, contests)
    results = run_multiscale(graph, k_list, base_params, contests, tie_policy, workers)
    runs, failures = [], []
    for k, res in zip(k_list, results):
        if isinstance(res, RunFailure):
            log.warning("k=%d failed: %s", k, res.error)
            failures.append({"k": int(k), "error": type(res.error).__name__, "message": str(res.error)})
            continue
        _write_run_outputs(out / f"k_{k:03d}", res, contests, shares)
        runs.append(res)
    io.write_vote_shares(out / "vote_shares.csv", shares)
    for c in contests:
        hists = [seat_histogram(r.seats[c], r.params.k, c) for r in runs]
        io.emit_scale_grid_csv(hists, out / f"scale_grid_{c}.csv")
    manifest = _manifest(
        "multiscale",
        graph_path,
        election_config,
        contests,
        tie_policy,
        k_list=[int(k) for k in k_list],
        base_params=asdict(base_params),
        params=[asdict(base_params.replace(k=int(k), rng_seed=derive_seed(base_params.rng_seed, int(k)))) for k in k_list],
        failures=failures,
    )
    io.write_json(out / "manifest.json", manifest)
    return manifest


def do_regions(
    graph_path,
    region_spec_path,
    params: ChainParams,
    k_west: int,
    k_east: int,
    k_full: int,
    out,
    contests=None,
    tie_policy="count_rep",
    election_config=None,
    workers=1,
) -> dict:
    graph = _load(graph_path, election_config)
    contests = _select_contests(graph, contests)
    (ra, rb), ratio = io.load_region_spec(region_spec_path)
    ra = RegionSpec(ra.name, ra.counties, k_west)
    rb = RegionSpec(rb.name, rb.counties, k_east)
    out = Path(out)
    result = run_region_ensembles(graph, ra, rb, params, k_full, contests, tie_policy, ratio, workers)
    table = region_vote_table(graph, [ra, rb], contests)

    rows = []
    for c in contests:
        for panel in (ra.name, rb.name, FULL, PAIRS):
            h = result.histograms[panel][c]
            vote = table[c][FULL if panel == PAIRS else panel]
            vote_txt = "" if isinstance(vote, Exception) else io.fmt6(vote)
            rows.append((c, panel, h.k, vote_txt, io.fmt6(mean_seat_share(h))))
            io.emit_histogram_csv(h, out / _panel_dir(panel) / f"hist_{c}.csv")
    io.write_rows(out / "vote_table.csv", ("contest", "panel", "k", "vote_share", "mean_seat_share"), rows)
    for name in (ra.name, rb.name, FULL):
        io.write_seat_stream(out / _panel_dir(name) / "seats.csv", contests, result.runs[name].seats)
    rep = result.report
    io.write_json(
        out / "split_report.json",
        {
            "regions": [ra.name, rb.name],
            "pop_a": rep.pop_a,
            "pop_b": rep.pop_b,
            "ratio_target": list(rep.ratio_target),
            "deviation_from_ratio": float(rep.deviation_from_ratio),
        },
    )
    manifest = _manifest(
        "regions",
        graph_path,
        election_config,
        contests,
        tie_policy,
        region_spec={"path": str(region_spec_path), "sha256": io.file_digest(region_spec_path)},
        k_west=k_west,
        k_east=k_east,
        k_full=k_full,
        params=asdict(params),
        run_params={n: asdict(r.params) for n, r in result.runs.items()},
    )
    io.write_json(out / "manifest.json", manifest)
    return manifest


def _panel_dir(name: str) -> str:
    return "Pairs" if name == PAIRS else name


def do_stats(run_dirs: Sequence, out, k_for_seats_votes: int | None = None, svg: bool = False) -> None:
    """Aggregate ``run``/``multiscale`` output directories into scale grids and
    seats-votes clouds, optionally rendering SVGs."""
    runs = []
    for d in run_dirs:
        d = Path(d)
        for sub in [d] + sorted(p for p in d.glob("k_*") if p.is_dir()):
            if (sub / "seats.csv").exists():
                runs.append(sub)
    if not runs:
        raise SchemaMismatch(f"no run outputs (seats.csv) under {list(map(str, run_dirs))}")
    hists: dict[str, list] = {}
    shares: dict[str, float] = {}
    for sub in runs:
        k = _run_k(sub)
        seats = io.read_seat_stream(sub / "seats.csv")
        vs_path = sub / "vote_shares.csv"
        if not vs_path.exists():
            vs_path = sub.parent / "vote_shares.csv"
        shares.update(io.read_vote_shares(vs_path))
        for c, obs in seats.items():
            hists.setdefault(c, []).append(seat_histogram(obs, k, c))
    out = Path(out)
    for c, hs in hists.items():
        hs.sort(key=lambda h: h.k)
        io.emit_histogram_csv(hs, out / f"hist_{c}.csv")
        io.emit_scale_grid_csv(hs, out / f"scale_grid_{c}.csv")
    ks = sorted({h.k for hs in hists.values() for h in hs})
    targets = [k_for_seats_votes] if k_for_seats_votes else ks
    for k in targets:
        at_k = [h for hs in hists.values() for h in hs if h.k == k]
        io.emit_seats_votes_csv(seats_votes_points(shares, at_k), out / f"seats_votes_k{k:03d}.csv")
    if svg:
        from .plots import plot_scale_grid, plot_seats_votes

        for c, hs in hists.items():
            plot_scale_grid(hs, shares.get(c), out / f"scale_grid_{c}.svg")
        for k in targets:
            at_k = [h for hs in hists.values() for h in hs if h.k == k]
            plot_seats_votes(seats_votes_points(shares, at_k), k, out / f"seats_votes_k{k:03d}.svg")


def _run_k(run_dir: Path) -> int:
    manifest = io.read_json(run_dir / "manifest.json") if (run_dir / "manifest.json").exists() else None
    if manifest and "params" in manifest and isinstance(manifest["params"], dict):
        return int(manifest["params"]["k"])
    name = run_dir.name
    if name.startswith("k_"):
        return int(name[2:])
    raise SchemaMismatch(f"cannot determine k for {run_dir}")


def replay(manifest_path, out, workers: int = 1) -> dict:
    """Rerun the workflow recorded in a manifest into ``out``."""
    m = io.read_json(manifest_path)
    if m.get("schema") != io.MANIFEST_SCHEMA:
        raise SchemaMismatch(f"{manifest_path}: not a recomscale manifest")
    graph_path = m["graph"]["path"]
    if io.file_digest(graph_path) != m["graph"]["sha256"]:
        raise SchemaMismatch(f"{graph_path}: digest differs from the manifest")
    election_config = m["graph"].get("election_config")
    common = dict(contests=m["contests"], tie_policy=m["tie_policy"], election_config=election_config)
    if m["command"] == "run":
        return do_run(graph_path, ChainParams(**m["params"]), out, **common)
    if m["command"] == "multiscale":
        return do_multiscale(graph_path, m["k_list"], ChainParams(**m["base_params"]), out, workers=workers, **common)
    if m["command"] == "regions":
        return do_regions(
            graph_path,
            m["region_spec"]["path"],
            ChainParams(**m["params"]),
            m["k_west"],
            m["k_east"],
            m["k_full"],
            out,
            workers=workers,
            **common,
        )
    raise SchemaMismatch(f"unknown command {m['command']!r} in manifest")

