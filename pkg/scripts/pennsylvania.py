"""Pennsylvania PRES16 check at k=18 against external precinct data.

The data are not shipped.  Convert a precinct shapefile's adjacency and
attributes to the recomscale graph format first, then:

    python3 scripts/pennsylvania.py --graph pa_precincts.json [--elections elections.json]

Prints the statewide two-party share and the ensemble's mean Democratic
seat share for comparison with 0.4965 and 0.3783.
"""
import click
import numpy as np

from recomscale import io
from recomscale.chain import ChainParams, run_chain
from recomscale.elections import efficiency_gap_simplified, statewide_share
from recomscale.stats import mean_seat_share, seat_histogram


@click.command()
@click.option("--graph", "graph_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--elections", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--contest", default="PRES16", show_default=True)
@click.option("--k", default=18, show_default=True)
@click.option("--steps", default=10_000, show_default=True)
@click.option("--epsilon", default=0.02, show_default=True)
@click.option("--seed", default=18, show_default=True)
def main(graph_path, elections, contest, k, steps, epsilon, seed):
    g = io.load_graph(graph_path, io.load_election_config(elections) if elections else None)
    vote = statewide_share(g, contest)
    run = run_chain(g, ChainParams(k=k, epsilon=epsilon, steps=steps, rng_seed=seed), contests=[contest])
    h = seat_histogram(run.seats[contest], k, contest)
    mean = mean_seat_share(h)
    frac = np.asarray(run.seats[contest], dtype=float) / k
    click.echo(f"statewide share   {float(vote):.4f}  (reference 0.4965)")
    click.echo(f"mean seat share   {float(mean):.4f}  (reference 0.3783, tolerance 0.05)")
    click.echo(f"seat share range  {frac.min():.3f} .. {frac.max():.3f}")
    click.echo(f"efficiency gap    {float(efficiency_gap_simplified(mean, vote)):+.4f}")


if __name__ == "__main__":
    main()
