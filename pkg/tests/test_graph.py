import io

import numpy as np
import pytest

from tdr.errors import CapacityError, InvalidParam, ParseError
from tdr.graph import Graph, load_edge_list, write_edge_list


def load(text, **kw):
    return load_edge_list(io.StringIO(text), **kw)


def test_load_basic():
    g = load("0 1 a\n0 2 b")
    assert (g.vertex_count, g.edge_count, g.label_count) == (3, 2, 2)
    assert g.label_names == ("a", "b")


def test_load_empty():
    g = load("")
    assert (g.vertex_count, g.edge_count, g.label_count) == (0, 0, 0)


def test_duplicates_dropped():
    assert load("0 1 a\n0 1 a").edge_count == 1
    # same endpoints, different label: two edges
    assert load("0 1 a\n0 1 b").edge_count == 2


def test_arity_error_reports_line():
    with pytest.raises(ParseError) as exc:
        load("0 1")
    assert exc.value.line == 1
    with pytest.raises(ParseError) as exc:
        load("# header\n0 1 a\n\n0 1 a b\n")
    assert exc.value.line == 4


def test_comments_and_blank_lines_skipped():
    g = load("# c\n\n  \n0 1 x\n   # indented comment\n")
    assert g.edge_count == 1


def test_tokens_remapped_in_first_seen_order():
    g = load("v10 v3 knows\nv3 v7 likes\n")
    assert g.vertex_names == ("v10", "v3", "v7")
    assert g.vertex_id("v3") == 1
    assert g.edges == [(0, 1, 0), (1, 2, 1)]
    with pytest.raises(KeyError):
        g.vertex_id("nope")


def test_capacity_error():
    with pytest.raises(CapacityError):
        load("0 1 a\n2 3 a\n", id_limit=2)


def test_forward_and_reverse_describe_same_edges(toy):
    fwd = sorted((u, t, l) for u in range(toy.vertex_count) for t, l in toy.successors(u))
    rev = sorted((s, u, l) for u in range(toy.vertex_count) for s, l in toy.predecessors(u))
    assert fwd == rev == sorted(toy.edges)


def test_successor_slots_keep_stored_order(toy):
    assert toy.successors(0) == [(1, 0), (2, 1)]
    assert toy.successors(2) == [(3, 2), (5, 4)]
    assert toy.successors(4) == []


def test_write_then_load_round_trip(toy):
    buf = io.StringIO()
    write_edge_list(toy, buf, header="toy\nfixture")
    text = buf.getvalue()
    assert text.startswith("# toy\n# fixture\n")
    again = load(text)

    def named(g):
        return [(g.vertex_name(s), g.vertex_name(t), g.label_names[l]) for s, t, l in g.edges]

    assert named(again) == named(toy)
    assert load(buf.getvalue()) == again


def test_graph_validation():
    with pytest.raises(InvalidParam):
        Graph(2, np.array([0]), np.array([2]), np.array([0]), ("a",))
    with pytest.raises(InvalidParam):
        Graph(2, np.array([0]), np.array([1]), np.array([1]), ("a",))
    with pytest.raises(InvalidParam):
        Graph(2, np.array([0, 1]), np.array([1]), np.array([0]), ("a",))


def test_arrays_read_only(toy):
    with pytest.raises(ValueError):
        toy.src[0] = 3
