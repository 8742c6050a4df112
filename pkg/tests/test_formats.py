import random

import pytest

from tempograph.core import MULTIEDGE, MULTILABEL, SIMPLE
from tempograph.formats import (
    FormatError, parse_temporal_edge_list, read_edge_list, snap_ingest, write_temporal_edge_list,
)
from oracles import random_multi_graph, random_simple_graph


def test_round_trip_random_graphs():
    rng = random.Random(0)
    for i in range(100):
        n, tmax = rng.randint(1, 12), rng.randint(1, 9)
        mode = (SIMPLE, MULTIEDGE, MULTILABEL)[i % 3]
        if mode == SIMPLE or n < 2:
            g = random_simple_graph(rng, n, rng.randint(0, 20), tmax)
        else:
            g = random_multi_graph(rng, n, rng.randint(0, 30), tmax, mode)
        d = rng.randint(1, 5)
        back, delta = read_edge_list(write_temporal_edge_list(g, d))
        assert back == g and delta == d


def test_comments_and_blank_lines():
    text = "# a path\n3 2 2 1 simple\n\n0 1 1  # first\n1 2 2\n"
    g = parse_temporal_edge_list(text)
    assert g.n == 3 and g.m == 2


@pytest.mark.parametrize("text,line,fragment", [
    ("", None, "empty"),
    ("3 1 2 1\n0 1 1\n", 1, "header"),
    ("3 1 2 1 weird\n0 1 1\n", 1, "unknown mode"),
    ("3 1 2 x simple\n0 1 1\n", 1, "non-integer"),
    ("3 2 2 1 simple\n0 1 1\n", 2, "expected 2"),
    ("3 1 2 1 simple\n0 a 1\n", 2, "non-integer"),
    ("3 1 2 1 simple\n1 1 1\n", 2, "self-loop"),
    ("3 1 2 1 simple\n0 3 1\n", 2, "node outside"),
    ("3 1 2 1 simple\n0 1 3\n", 2, "label 3"),
    ("3 2 2 1 simple\n0 1 1\n1 0 2\n", 3, "duplicate pair"),
    ("3 2 2 1 multiedge\n0 1 1\n1 0 1\n", 3, "duplicate instance"),
    ("3 1 2 1 simple\n0 1\n", 2, "u v t"),
])
def test_parse_errors(text, line, fragment):
    with pytest.raises(FormatError) as info:
        read_edge_list(text)
    assert info.value.line == line
    assert fragment in str(info.value)


def test_multiedge_allows_repeated_pair():
    g = parse_temporal_edge_list("2 2 3 1 multiedge\n0 1 1\n0 1 3\n")
    assert g.mode == MULTIEDGE and g.m == 2


# --------------------------------------------------------------------- snap

def test_snap_basic():
    csv_text = "src,dst,ts\n10,20,0\n20,30,50\n30,10,100\n10,10,40\n10,20,1\n"
    rep = snap_ingest(csv_text, 4)
    g = rep.graph
    assert rep.node_ids == {10: 0, 20: 1, 30: 2}
    assert rep.self_loops == 1 and rep.collapsed == 1 and rep.rows == 5
    assert g.mode == MULTIEDGE and g.tmax == 4
    assert sorted(g.edges) == [(0, 1, 1), (0, 2, 4), (1, 2, 3)]


def test_snap_constant_timestamps():
    rep = snap_ingest("1,2,5\n2,3,5\n", 3)
    assert {e.label for e in rep.graph.edges} == {1}


def test_snap_extra_columns_and_no_header():
    rep = snap_ingest("1,2,0,foo\n2,3,10,bar\n", 2)
    assert rep.graph.m == 2 and rep.rows == 2


def test_snap_errors():
    with pytest.raises(FormatError) as info:
        snap_ingest("1,2,0\n1,x,3\n", 2)
    assert info.value.line == 2
    with pytest.raises(FormatError):
        snap_ingest("1,2\n", 2)
    with pytest.raises(ValueError):
        snap_ingest("1,2,3\n", 0)


def test_snap_empty():
    rep = snap_ingest("", 5)
    assert rep.graph.n == 0 and rep.graph.m == 0
