"""Static SVG renderings of the scale grid and seats-votes clouds."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .stats import REFERENCE_LINES, REFERENCE_SCALES, to_scale_grid  # noqa: E402

_SVG_META = {"Date": None, "Creator": None}


def plot_scale_grid(histograms, statewide_share, path):
    """Seat share vs. number of districts; colour encodes per-k frequency."""
    cells = to_scale_grid(histograms)
    fig, ax = plt.subplots(figsize=(8, 5))
    sc = ax.scatter(
        [c.k for c in cells],
        [c.seat_fraction for c in cells],
        c=[c.frequency for c in cells],
        cmap="magma",
        s=6,
        marker="s",
    )
    fig.colorbar(sc, ax=ax, label="fraction of plans")
    kmax = max((c.k for c in cells), default=1)
    for k in REFERENCE_SCALES:
        if k <= kmax:
            ax.axvline(k, color="gray", ls="--", lw=0.8)
    if statewide_share is not None:
        ax.axhline(float(statewide_share), color="green", ls="--", lw=2,
                   label=f"statewide Dem share = {100 * float(statewide_share):.1f}%")
        ax.legend(loc="upper right")
    ax.set_xlabel("number of districts")
    ax.set_ylabel("Democratic seat share")
    ax.set_ylim(0, 1)
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)


def plot_seats_votes(points, k, path):
    fig, ax = plt.subplots(figsize=(5, 5))
    (x0, y0), (x1, y1) = REFERENCE_LINES["proportionality"]
    ax.plot([x0, x1], [y0, y1], color="gray", ls=":")
    (x0, y0), (x1, y1) = REFERENCE_LINES["efficiency_gap_zero"]
    ax.plot([x0, x1], [y0, y1], color="green")
    ax.scatter(
        [p.vote_share for p in points],
        [p.seat_fraction for p in points],
        c=[p.frequency for p in points],
        cmap="magma",
        s=12,
    )
    ax.set_xlim(0, 1)
    ax.set_ylim(0, 1)
    ax.set_xlabel("statewide Democratic vote share")
    ax.set_ylabel("Democratic seat share")
    ax.set_title(f"{k} districts")
    fig.savefig(path, format="svg", metadata=_SVG_META)
    plt.close(fig)
