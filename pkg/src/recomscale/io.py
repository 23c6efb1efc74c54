"""Graph files, config files, CSV emission and run manifests.

Graph file (``recomscale.graph/1``) is node-link JSON, the layout produced by
``networkx.node_link_data``, plus a schema tag::

    {"schema": "recomscale.graph/1",
     "graph": {"unit_level": "precinct",
               "contests": [{"name": "PRES16", "dem": "PRES16D", "rep": "PRES16R"}]},
     "nodes": [{"id": "42003-0001", "population": 812, "vap": 640,
                "county": "Allegheny", "PRES16D": 301, "PRES16R": "1021/4"}],
     "links": [{"source": "42003-0001", "target": "42003-0002"}]}

Vote columns are integers, decimals or exact ``"p/q"`` strings.

CSV schemas (six fractional digits for every derived ratio):

* histogram: ``k,seats,count,frequency``
* scale grid: ``k,seat_fraction,frequency,is_reference_scale``
* seats-votes: ``contest,vote_share,k,seat_fraction,frequency``
"""
from __future__ import annotations

import csv
import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .elections import ContestSpec
from .errors import IoFailure, ParseError, SchemaMismatch
from .graph import DualGraph, NodeRecord, as_fraction
from .regions import RegionSpec
from .stats import SeatHistogram, SeatsVotesPoint, to_scale_grid

GRAPH_SCHEMA = "recomscale.graph/1"
MANIFEST_SCHEMA = "recomscale.manifest/1"
UNIT_LEVELS = ("precinct", "block")
DEFAULT_EPSILON = {"precinct": 0.02, "block": 0.01}

HISTOGRAM_HEADER = ("k", "seats", "count", "frequency")
SCALE_GRID_HEADER = ("k", "seat_fraction", "frequency", "is_reference_scale")
SEATS_VOTES_HEADER = ("contest", "vote_share", "k", "seat_fraction", "frequency")


def default_columns(name: str) -> ContestSpec:
    return ContestSpec(name, f"{name}_D", f"{name}_R")


def _parse_number(value, where: str) -> Fraction:
    if isinstance(value, bool) or value is None:
        raise ParseError(f"{where}: expected a number, got {value!r}")
    try:
        return as_fraction(value)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ParseError(f"{where}: cannot parse {value!r} as a number") from None


def _parse_int(value, where: str) -> int:
    x = _parse_number(value, where)
    if x.denominator != 1:
        raise ParseError(f"{where}: expected an integer, got {value!r}")
    return int(x)


def _format_number(x: Fraction):
    x = as_fraction(x)
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _contest_specs(raw) -> list[ContestSpec]:
    specs = []
    if isinstance(raw, Mapping):
        raw = [{"name": k, **v} for k, v in raw.items()]
    for item in raw or []:
        try:
            specs.append(ContestSpec(str(item["name"]), str(item["dem"]), str(item["rep"])))
        except (KeyError, TypeError):
            raise SchemaMismatch(f"bad contest entry {item!r}; expected name/dem/rep") from None
    return specs


def graph_from_data(data: Mapping, contests: Sequence[ContestSpec] | None = None) -> DualGraph:
    if not isinstance(data, Mapping):
        raise ParseError("graph file must hold a JSON object")
    schema = data.get("schema", GRAPH_SCHEMA)
    if schema != GRAPH_SCHEMA:
        raise SchemaMismatch(f"unsupported graph schema {schema!r}; expected {GRAPH_SCHEMA}")
    meta = data.get("graph") or {}
    unit_level = meta.get("unit_level", "precinct")
    if unit_level not in UNIT_LEVELS:
        raise SchemaMismatch(f"unit_level must be one of {UNIT_LEVELS}, got {unit_level!r}")
    specs = list(contests) if contests is not None else _contest_specs(meta.get("contests"))
    try:
        raw_nodes = list(data["nodes"])
        raw_links = list(data.get("links", data.get("edges", [])))
    except (KeyError, TypeError):
        raise SchemaMismatch("graph file needs 'nodes' and 'links' arrays") from None

    index: dict[str, int] = {}
    records = []
    for i, nd in enumerate(raw_nodes):
        if not isinstance(nd, Mapping) or "id" not in nd:
            raise SchemaMismatch(f"node entry {i} lacks an 'id'")
        key = str(nd["id"])
        if key in index:
            raise SchemaMismatch(f"duplicate node key {key!r}")
        index[key] = i
        if "population" not in nd:
            raise SchemaMismatch(f"node {key!r}: missing 'population'")
        votes = {}
        for spec in specs:
            for col in (spec.dem_column, spec.rep_column):
                if col not in nd:
                    raise SchemaMismatch(f"node {key!r}: contest {spec.name} needs column {col!r}")
            votes[spec.name] = (
                _parse_number(nd[spec.dem_column], f"node {key!r} column {spec.dem_column}"),
                _parse_number(nd[spec.rep_column], f"node {key!r} column {spec.rep_column}"),
            )
        records.append(
            NodeRecord(
                id=i,
                population=_parse_int(nd["population"], f"node {key!r} population"),
                vap=_parse_int(nd.get("vap", 0), f"node {key!r} vap"),
                county=str(nd.get("county", "")),
                votes=votes,
            )
        )
    edges = []
    for link in raw_links:
        try:
            s, t = str(link["source"]), str(link["target"])
        except (KeyError, TypeError):
            raise SchemaMismatch(f"bad link entry {link!r}") from None
        if s not in index or t not in index:
            raise SchemaMismatch(f"link ({s!r}, {t!r}) references an unknown node")
        edges.append((index[s], index[t]))
    return DualGraph(records, edges, [s.name for s in specs], list(index), unit_level)


def graph_to_data(graph: DualGraph, contests: Sequence[ContestSpec] | None = None) -> dict:
    specs = list(contests) if contests is not None else [default_columns(c) for c in graph.contest_names]
    nodes = []
    for key, rec in zip(graph.keys, graph.nodes):
        nd = {"id": key, "population": rec.population, "vap": rec.vap, "county": rec.county}
        for spec in specs:
            dem, rep = rec.votes[spec.name]
            nd[spec.dem_column] = _format_number(dem)
            nd[spec.rep_column] = _format_number(rep)
        nodes.append(nd)
    links = [{"source": graph.keys[u], "target": graph.keys[v]} for u, v in graph.edges]
    meta = {
        "unit_level": graph.unit_level,
        "contests": [{"name": s.name, "dem": s.dem_column, "rep": s.rep_column} for s in specs],
    }
    return {"schema": GRAPH_SCHEMA, "directed": False, "multigraph": False, "graph": meta, "nodes": nodes, "links": links}


def load_graph(path, contests: Sequence[ContestSpec] | None = None) -> DualGraph:
    """Read and validate a graph file.

    ``contests`` (from an election config) overrides the contest list in the
    file metadata; a referenced column missing on any node is a
    :class:`SchemaMismatch`.
    """
    try:
        with open(path) as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from None
    return graph_from_data(data, contests)


def save_graph(graph: DualGraph, path, contests: Sequence[ContestSpec] | None = None) -> None:
    _write_text(path, json.dumps(graph_to_data(graph, contests), indent=1) + "\n")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def load_election_config(path) -> list[ContestSpec]:
    """``{"PRES16": {"dem": "PRES16D", "rep": "PRES16R"}, ...}``"""
    data = read_json(path)
    return _contest_specs(data)


def load_region_spec(path) -> tuple[list[RegionSpec], tuple[int, int]]:
    """Two regions and a population ratio.

    Accepts ``{"regions": [{"name": "West", "counties": [...]}, ...],
    "ratio": [1, 2]}`` or the short form ``{"West": [...], "East": [...]}``.
    """
    data = read_json(path)
    if "regions" in data:
        raw = [(r["name"], r["counties"], r.get("k", 0)) for r in data["regions"]]
        ratio = tuple(data.get("ratio", (1, 2)))
    else:
        raw = [(name, counties, 0) for name, counties in data.items()]
        ratio = (1, 2)
    if len(raw) != 2:
        raise SchemaMismatch(f"region spec must define exactly two regions, got {len(raw)}")
    if len(ratio) != 2:
        raise SchemaMismatch("ratio must have two entries")
    return [RegionSpec(str(n), [str(c) for c in cs], k) for n, cs, k in raw], (int(ratio[0]), int(ratio[1]))


def read_json(path):
    try:
        with open(path) as f:
            return json.load(f)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from None
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from None


def _write_text(path, text: str) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from None


def write_rows(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", newline="") as f:
            w = csv.writer(f, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
    except OSError as exc:
        raise IoFailure(f"{path}: {exc}") from None


def fmt6(x) -> str:
    return f"{float(x):.6f}"


def fmt_seats(s) -> str:
    if isinstance(s, float) and s.is_integer():
        s = int(s)
    return str(s)


def emit_histogram_csv(histograms: SeatHistogram | Iterable[SeatHistogram], path) -> None:
    if isinstance(histograms, SeatHistogram):
        histograms = [histograms]
    rows = []
    for h in sorted(histograms, key=lambda h: h.k):
        for s, c in sorted(h.counts.items()):
            if c:
                rows.append((h.k, fmt_seats(s), c, fmt6(c / h.total)))
    write_rows(path, HISTOGRAM_HEADER, rows)


def emit_scale_grid_csv(histograms: Iterable[SeatHistogram], path) -> None:
    rows = [
        (cell.k, fmt6(cell.seat_fraction), fmt6(cell.frequency), int(cell.is_reference_scale))
        for cell in to_scale_grid(histograms)
    ]
    write_rows(path, SCALE_GRID_HEADER, rows)


def emit_seats_votes_csv(points: Iterable[SeatsVotesPoint], path) -> None:
    pts = sorted(points, key=lambda p: (p.vote_share, p.seat_fraction, p.k, p.contest))
    rows = [(p.contest, fmt6(p.vote_share), p.k, fmt6(p.seat_fraction), fmt6(p.frequency)) for p in pts]
    write_rows(path, SEATS_VOTES_HEADER, rows)


def write_seat_stream(path, contests: Sequence[str], seats: Mapping[str, Sequence]) -> None:
    n = len(seats[contests[0]]) if contests else 0
    rows = [[i + 1] + [fmt_seats(seats[c][i]) for c in contests] for i in range(n)]
    write_rows(path, ["step", *contests], rows)


def read_seat_stream(path) -> dict[str, list]:
    try:
        with open(path, newline="") as f:
            reader = csv.reader(f)
            header = next(reader)
            cols = {c: [] for c in header[1:]}
            for row in reader:
                for c, v in zip(header[1:], row[1:]):
                    x = float(v)
                    cols[c].append(int(x) if x.is_integer() else x)
    except (OSError, StopIteration, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None
    return cols


def write_vote_shares(path, shares: Mapping[str, Fraction]) -> None:
    write_rows(path, ("contest", "vote_share"), [(c, fmt6(v)) for c, v in shares.items()])


def read_vote_shares(path) -> dict[str, float]:
    try:
        with open(path, newline="") as f:
            return {row["contest"]: float(row["vote_share"]) for row in csv.DictReader(f)}
    except (OSError, KeyError, ValueError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_json(path, data) -> None:
    _write_text(path, json.dumps(data, indent=2, sort_keys=True) + "\n")


def default_out_dir() -> str:
    return os.environ.get("RECOMSCALE_OUT", "recomscale-out")
