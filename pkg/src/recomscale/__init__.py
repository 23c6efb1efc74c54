"""Recombination-chain districting ensembles and seats-votes analytics."""

__version__ = "0.1.0"

from .chain import ChainParams, EnsembleRun, derive_seed, recom_step, run_chain, run_multiscale
from .elections import (
    ContestSpec,
    efficiency_gap_simplified,
    prorate_to_blocks,
    seat_share,
    seats_won,
    statewide_share,
)
from .graph import Assignment, DualGraph, NodeRecord, build_graph, grid_graph, make_assignment
from .regions import RegionSpec, region_vote_table, run_region_ensembles, validate_split
from .stats import SeatHistogram, mean_seat_share, pair_convolution, seat_histogram, to_scale_grid
from .tree import BalanceWindow, bipartition, find_balanced_cuts, random_spanning_tree, recursive_seed
