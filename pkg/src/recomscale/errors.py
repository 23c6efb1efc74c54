"""Exception hierarchy.

Every error raised by the toolkit derives from :class:`RecomError`.  The CLI
maps the three families below onto exit codes (data errors -> 3, chain
failures -> 4).
"""


class RecomError(Exception):
    """Base class for all toolkit errors."""


class DataError(RecomError):
    """Bad input data: malformed graphs, files, plans or vote columns."""


class ChainError(RecomError):
    """The sampler could not produce a valid plan."""


# graph_core
class DisconnectedGraph(DataError):
    pass


class DuplicateEdge(DataError):
    pass


class InvalidEdge(DataError):
    pass


class NegativeAttribute(DataError):
    pass


class UnknownDistrict(DataError):
    pass


class InvalidAssignment(DataError):
    pass


# tree_sampler / recom_engine
class DisconnectedSubset(ChainError):
    pass


class BalanceUnreachable(ChainError):
    pass


class SeedFailure(ChainError):
    pass


class ChainStalled(ChainError):
    pass


# election_tally / ensemble_stats
class ZeroTurnout(DataError):
    pass


class OrphanBlock(DataError):
    pass


class OutOfRangeSeats(DataError):
    pass


class ContestMismatch(DataError):
    pass


class KeyMismatch(DataError):
    pass


class EmptyHistogram(DataError):
    pass


# region_split
class RegionDisconnected(DataError):
    pass


class CountyOverlap(DataError):
    pass


class UncoveredCounty(DataError):
    pass


# io
class ParseError(DataError):
    pass


class SchemaMismatch(DataError):
    pass


class IoFailure(RecomError):
    pass
