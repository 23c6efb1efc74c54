import json
from fractions import Fraction

import pytest

from recomscale import io
from recomscale.elections import ContestSpec
from recomscale.errors import DisconnectedGraph, InvalidEdge, ParseError, SchemaMismatch
from recomscale.stats import SeatHistogram, seats_votes_points
from recomscale.synth import city_state, unit_grid


def minimal(**extra):
    data = {
        "schema": io.GRAPH_SCHEMA,
        "graph": {"unit_level": "precinct", "contests": [{"name": "X", "dem": "XD", "rep": "XR"}]},
        "nodes": [
            {"id": "a", "population": 3, "XD": 1, "XR": 2, "county": "c1"},
            {"id": "b", "population": 5, "XD": "1/3", "XR": 0.5, "county": "c2"},
        ],
        "links": [{"source": "a", "target": "b"}],
    }
    data.update(extra)
    return data


def dump(tmp_path, data, name="g.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def test_minimal_two_node(tmp_path):
    g = io.load_graph(dump(tmp_path, minimal()))
    assert len(g) == 2 and g.keys == ("a", "b")
    assert g.nodes[1].votes["X"] == (Fraction(1, 3), Fraction(1, 2))
    assert g.total_population == 8


def test_round_trip_identity(tmp_path):
    g = city_state(6, 6, shares={"A": Fraction(47, 100), "B": Fraction(1, 2)})
    p1, p2 = tmp_path / "one.json", tmp_path / "two.json"
    io.save_graph(g, p1)
    g2 = io.load_graph(p1)
    io.save_graph(g2, p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert g2.nodes == g.nodes and g2.edges == g.edges and g2.unit_level == g.unit_level
    assert g2.contest_names == g.contest_names


def test_unknown_contest_column(tmp_path):
    p = dump(tmp_path, minimal())
    with pytest.raises(SchemaMismatch):
        io.load_graph(p, [ContestSpec("Y", "YD", "YR")])
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"Y": {"dem": "XD", "rep": "XR"}}))
    g = io.load_graph(p, io.load_election_config(cfg))
    assert g.contest_names == ("Y",)


def test_grid_fixture_counts(tmp_path):
    p = tmp_path / "grid.json"
    io.save_graph(unit_grid(30, 30), p)
    data = json.loads(p.read_text())
    assert len(data["nodes"]) == 900
    assert len(data["links"]) == 1740 == 2 * 30 * 29
    assert len(io.load_graph(p).edges) == 1740


def test_load_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ParseError):
        io.load_graph(bad)
    with pytest.raises(SchemaMismatch):
        io.load_graph(dump(tmp_path, minimal(schema="other/9")))
    with pytest.raises(SchemaMismatch):
        io.load_graph(dump(tmp_path, minimal(links=[{"source": "a", "target": "zz"}])))
    with pytest.raises(DisconnectedGraph, match="b"):
        io.load_graph(dump(tmp_path, minimal(links=[])))
    with pytest.raises(InvalidEdge):
        io.load_graph(dump(tmp_path, minimal(links=[{"source": "a", "target": "a"}])))
    data = minimal()
    data["nodes"][0]["population"] = "many"
    with pytest.raises((ParseError, SchemaMismatch)):
        io.load_graph(dump(tmp_path, data))


def test_histogram_csv(tmp_path):
    p = tmp_path / "h.csv"
    io.emit_histogram_csv(SeatHistogram(3, "X", {1: 2, 2: 1}, 3), p)
    assert p.read_text() == "k,seats,count,frequency\n3,1,2,0.666667\n3,2,1,0.333333\n"
    io.emit_histogram_csv(SeatHistogram(3, "X"), p)
    assert p.read_text() == "k,seats,count,frequency\n"


def test_scale_grid_csv_flags(tmp_path):
    p = tmp_path / "grid.csv"
    hs = [SeatHistogram(k, "X", {k // 2: 1}, 1) for k in (203, 18, 50, 7)]
    io.emit_scale_grid_csv(hs, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "k,seat_fraction,frequency,is_reference_scale"
    flags = {int(r.split(",")[0]): r.split(",")[3] for r in lines[1:]}
    assert flags == {7: "0", 18: "1", 50: "1", 203: "1"}
    assert [int(r.split(",")[0]) for r in lines[1:]] == [7, 18, 50, 203]


def test_seats_votes_csv(tmp_path):
    p = tmp_path / "sv.csv"
    pts = seats_votes_points({"A": 0.6, "B": 0.4}, [SeatHistogram(4, "A", {2: 1}, 1), SeatHistogram(4, "B", {1: 1}, 1)])
    io.emit_seats_votes_csv(pts, p)
    assert p.read_text().splitlines() == [
        "contest,vote_share,k,seat_fraction,frequency",
        "B,0.400000,4,0.250000,1.000000",
        "A,0.600000,4,0.500000,1.000000",
    ]


def test_emitters_injective(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    io.emit_histogram_csv(SeatHistogram(3, "X", {1: 2, 2: 1}, 3), a)
    io.emit_histogram_csv(SeatHistogram(3, "X", {1: 4, 2: 2}, 6), b)
    assert a.read_bytes() != b.read_bytes()


def test_seat_stream_round_trip(tmp_path):
    p = tmp_path / "seats.csv"
    io.write_seat_stream(p, ["A", "B"], {"A": [1, 2, 1.5], "B": [0, 0, 3]})
    assert io.read_seat_stream(p) == {"A": [1, 2, 1.5], "B": [0, 0, 3]}


def test_region_spec_forms(tmp_path):
    p = tmp_path / "r.json"
    p.write_text(json.dumps({"West": ["a"], "East": ["b", "c"]}))
    regions, ratio = io.load_region_spec(p)
    assert [r.name for r in regions] == ["West", "East"] and ratio == (1, 2)
    p.write_text(json.dumps({"regions": [{"name": "W", "counties": ["a"]}, {"name": "E", "counties": ["b"]}],
                             "ratio": [1, 1]}))
    assert io.load_region_spec(p)[1] == (1, 1)
    p.write_text(json.dumps({"W": ["a"]}))
    with pytest.raises(SchemaMismatch):
        io.load_region_spec(p)
