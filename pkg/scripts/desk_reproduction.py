"""Synthetic city-state sweep: seat-share spread and bias across scales.

Builds the 30x30 city-state (compact 70% Democratic city, 50.0% statewide),
runs one ensemble per k, and writes a scale grid CSV, a summary table and
an SVG heatmap.

    python3 scripts/desk_reproduction.py --out desk-out --steps 1000
"""
from pathlib import Path

import click
import numpy as np

from recomscale import io
from recomscale.chain import ChainParams, RunFailure, run_multiscale
from recomscale.cli import parse_k_list
from recomscale.elections import efficiency_gap_simplified, statewide_share
from recomscale.plots import plot_scale_grid
from recomscale.stats import mean_seat_share, seat_histogram
from recomscale.synth import city_state


@click.command()
@click.option("--out", default="desk-out", show_default=True, type=click.Path(file_okay=False))
@click.option("--k-list", default="2..10,15,20,30,45,60", show_default=True)
@click.option("--steps", default=1000, show_default=True)
@click.option("--epsilon", default=0.02, show_default=True)
@click.option("--seed", default=2024, show_default=True)
@click.option("--workers", default=1, show_default=True)
def main(out, k_list, steps, epsilon, seed, workers):
    out = Path(out)
    g = city_state(30, 30)
    vote = statewide_share(g, "SYN")
    ks = parse_k_list(k_list)
    runs = run_multiscale(g, ks, ChainParams(k=2, epsilon=epsilon, steps=steps, rng_seed=seed), ["SYN"],
                          workers=workers)
    hists, rows = [], []
    for k, run in zip(ks, runs):
        if isinstance(run, RunFailure):
            click.echo(f"k={k}: {run.error}", err=True)
            continue
        h = seat_histogram(run.seats["SYN"], k, "SYN")
        hists.append(h)
        frac = np.asarray(run.seats["SYN"], dtype=float) / k
        mean = mean_seat_share(h)
        rows.append((k, io.fmt6(mean), io.fmt6(frac.std()), io.fmt6(efficiency_gap_simplified(mean, vote))))
        click.echo(f"k={k:3d}  mean seat share {float(mean):.3f}  sd {frac.std():.3f}")
    io.write_rows(out / "summary.csv", ("k", "mean_seat_share", "sd_seat_share", "efficiency_gap"), rows)
    io.emit_scale_grid_csv(hists, out / "scale_grid_SYN.csv")
    plot_scale_grid(hists, float(vote), out / "scale_grid_SYN.svg")
    click.echo(f"wrote {out}")


if __name__ == "__main__":
    main()
