"""Command-line entry point.

Exit codes: 0 success, 2 usage error, 3 data error, 4 chain failure.  On
failure one JSON line ``{"error": ..., "exit_code": ..., "message": ...}``
goes to stderr.
"""
from __future__ import annotations

import json
import logging
import sys
from fractions import Fraction

import click

from . import io, pipeline, synth
from .chain import ChainParams
from .errors import ChainError, DataError, RecomError
from .graph import make_assignment
from .tree import BalanceWindow, recursive_seed

EXIT_USAGE, EXIT_DATA, EXIT_CHAIN = 2, 3, 4


def parse_k_list(text: str) -> list[int]:
    """``"2..220"``, ``"2,5,10"`` or mixtures like ``"2..6,18,50"``."""
    ks: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if ".." in part:
                lo, hi = part.split("..")
                ks.extend(range(int(lo), int(hi) + 1))
            else:
                ks.append(int(part))
    except ValueError:
        raise click.BadParameter(f"cannot parse k list {text!r}") from None
    if not ks or min(ks) < 1:
        raise click.BadParameter("k list must contain positive integers")
    if len(set(ks)) != len(ks):
        raise click.BadParameter("k list has duplicates")
    return ks


def _contest_list(text):
    return [c.strip() for c in text.split(",") if c.strip()] if text else None


def _epsilon(epsilon, graph_path):
    if epsilon is not None:
        return epsilon
    data = io.read_json(graph_path)
    level = (data.get("graph") or {}).get("unit_level", "precinct") if isinstance(data, dict) else "precinct"
    return io.DEFAULT_EPSILON.get(level, io.DEFAULT_EPSILON["precinct"])


def chain_options(f):
    options = [
        click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False)),
        click.option("--steps", type=click.IntRange(min=1), default=50_000, show_default=True,
                     help="Observed plans per ensemble."),
        click.option("--epsilon", type=click.FloatRange(min=0), default=None,
                     help="Population tolerance; default 0.02 (precincts) or 0.01 (blocks)."),
        click.option("--seed", "rng_seed", type=click.IntRange(min=0), required=True),
        click.option("--contests", default=None, help="Comma-separated contests; default all."),
        click.option("--election-config", type=click.Path(exists=True, dir_okay=False), default=None),
        click.option("--tie-policy", type=click.Choice(["count_rep", "count_dem", "count_half"]),
                     default="count_rep", show_default=True),
        click.option("--burn-in", type=click.IntRange(min=0), default=0, show_default=True),
        click.option("--thin", type=click.IntRange(min=1), default=1, show_default=True),
        click.option("--pair-selection", type=click.Choice(["uniform", "cut_edge"]), default="uniform",
                     show_default=True),
        click.option("--tree-method", type=click.Choice(["mst", "uniform"]), default="mst", show_default=True),
        click.option("--max-tree-attempts", type=click.IntRange(min=1), default=1000, show_default=True),
        click.option("--out", type=click.Path(file_okay=False), envvar="RECOMSCALE_OUT",
                     default=io.default_out_dir, show_default="$RECOMSCALE_OUT or ./recomscale-out"),
    ]
    for opt in reversed(options):
        f = opt(f)
    return f


def _params(k, steps, epsilon, rng_seed, graph_path, burn_in, thin, pair_selection, tree_method, max_tree_attempts):
    return ChainParams(
        k=k,
        epsilon=_epsilon(epsilon, graph_path),
        steps=steps,
        rng_seed=rng_seed,
        max_tree_attempts=max_tree_attempts,
        burn_in=burn_in,
        thin=thin,
        pair_selection=pair_selection,
        tree_method=tree_method,
    )


@click.group()
@click.option("-v", "--verbose", is_flag=True)
def cli(verbose):
    """Recombination-chain districting ensembles and seats-votes analytics."""
    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING, format="%(levelname)s %(message)s")


@cli.command()
@click.option("--kind", type=click.Choice(["grid", "city", "mirrored", "split"]), default="grid", show_default=True)
@click.option("--rows", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--cols", type=click.IntRange(min=1), default=30, show_default=True)
@click.option("--city-fraction", default="0.2", show_default=True)
@click.option("--city-lead", default="0.2", show_default=True)
@click.option("--shares", default="SYN=0.5", show_default=True, help="contest=statewide share pairs for --kind city.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def synth_cmd(kind, rows, cols, city_fraction, city_lead, shares, out_path):
    """Write a synthetic grid graph file."""
    if kind == "grid":
        g = synth.unit_grid(rows, cols)
    elif kind == "city":
        try:
            share_map = {k: Fraction(v) for k, v in (p.split("=") for p in shares.split(","))}
        except ValueError:
            raise click.BadParameter(f"cannot parse --shares {shares!r}") from None
        g = synth.city_state(rows, cols, Fraction(city_fraction), Fraction(city_lead), share_map)
    elif kind == "mirrored":
        g = synth.mirrored_state(rows, max(1, cols // 2))
    else:
        g = synth.split_state(rows, cols, max(1, cols // 3))
    io.save_graph(g, out_path)
    click.echo(f"wrote {out_path}: {len(g)} nodes, {len(g.edges)} links")


cli.add_command(synth_cmd, "synth")


@cli.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--k", type=click.IntRange(min=1), required=True)
@click.option("--epsilon", type=click.FloatRange(min=0), default=None)
@click.option("--seed", "rng_seed", type=click.IntRange(min=0), required=True)
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
def seed(graph_path, k, epsilon, rng_seed, out_path):
    """Draw one random seed plan and write it as {node key: district}."""
    import numpy as np

    g = io.load_graph(graph_path)
    window = BalanceWindow.for_plan(g.total_population, k, _epsilon(epsilon, graph_path))
    plan = recursive_seed(g, k, window, np.random.default_rng(rng_seed))
    make_assignment(g, plan.district_of, k)
    io.write_json(out_path, {key: int(d) for key, d in zip(g.keys, plan.district_of.tolist())})
    click.echo(f"wrote {out_path}: district populations {plan.district_pops.tolist()}")


@cli.command()
@click.option("--k", type=click.IntRange(min=1), required=True)
@chain_options
def run(k, graph_path, steps, epsilon, rng_seed, contests, election_config, tie_policy, burn_in, thin,
        pair_selection, tree_method, max_tree_attempts, out):
    """One ensemble at a single district count."""
    params = _params(k, steps, epsilon, rng_seed, graph_path, burn_in, thin, pair_selection, tree_method,
                     max_tree_attempts)
    pipeline.do_run(graph_path, params, out, _contest_list(contests), tie_policy, election_config)
    click.echo(f"wrote {out}")


@cli.command()
@click.option("--k-list", "k_list", required=True, help='e.g. "2..220" or "2,5,10,20,50,100,203,220".')
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@chain_options
def multiscale(k_list, workers, graph_path, steps, epsilon, rng_seed, contests, election_config, tie_policy,
               burn_in, thin, pair_selection, tree_method, max_tree_attempts, out):
    """One ensemble per district count, one run directory per k."""
    ks = parse_k_list(k_list)
    params = _params(ks[0], steps, epsilon, rng_seed, graph_path, burn_in, thin, pair_selection, tree_method,
                     max_tree_attempts)
    manifest = pipeline.do_multiscale(graph_path, ks, params, out, _contest_list(contests), tie_policy,
                                      election_config, workers)
    click.echo(f"wrote {out}: {len(ks) - len(manifest['failures'])} runs")
    if manifest["failures"]:
        raise ChainError(f"{len(manifest['failures'])} of {len(ks)} scales failed: "
                         + ", ".join(str(f["k"]) for f in manifest["failures"]))


@cli.command()
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--kw", type=click.IntRange(min=1), required=True, help="Districts for the first region.")
@click.option("--ke", type=click.IntRange(min=1), required=True, help="Districts for the second region.")
@click.option("--kfull", type=click.IntRange(min=1), required=True, help="Districts for the full-state run.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@chain_options
def regions(spec_path, kw, ke, kfull, workers, graph_path, steps, epsilon, rng_seed, contests, election_config,
            tie_policy, burn_in, thin, pair_selection, tree_method, max_tree_attempts, out):
    """West, East, Full-state and E-W pairs ensembles for a county split."""
    params = _params(kfull, steps, epsilon, rng_seed, graph_path, burn_in, thin, pair_selection, tree_method,
                     max_tree_attempts)
    pipeline.do_regions(graph_path, spec_path, params, kw, ke, kfull, out, _contest_list(contests), tie_policy,
                        election_config, workers)
    click.echo(f"wrote {out}")


@cli.command()
@click.argument("run_dirs", nargs=-1, required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--k", "k", type=click.IntRange(min=1), default=None, help="Scale for the seats-votes cloud.")
@click.option("--svg", is_flag=True, help="Also render SVG figures.")
def stats(run_dirs, out, k, svg):
    """Histograms, scale grids and seats-votes clouds from run outputs."""
    pipeline.do_stats(run_dirs, out, k, svg)
    click.echo(f"wrote {out}")


@cli.command()
@click.argument("manifest", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
def replay(manifest, out, workers):
    """Re-execute a run recorded in a manifest."""
    pipeline.replay(manifest, out, workers)
    click.echo(f"wrote {out}")


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "exit_code": code, "message": message}) + "\n")
    return code


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="recomscale", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        return _fail(1, "Abort", "aborted")
    except click.UsageError as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, exc.format_message())
    except ChainError as exc:
        return _fail(EXIT_CHAIN, type(exc).__name__, str(exc))
    except DataError as exc:
        return _fail(EXIT_DATA, type(exc).__name__, str(exc))
    except RecomError as exc:
        return _fail(EXIT_DATA, type(exc).__name__, str(exc))
    except ValueError as exc:
        return _fail(EXIT_USAGE, "ValueError", str(exc))
    return 0


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
