import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsurgery import (
    DIRICHLET,
    NATURAL,
    MetricGraph,
    create_graph,
    delta,
    disjoint_union,
    errors,
    graph_from_dict,
    graph_to_dict,
    insert_dummy_vertex,
    loop_graph,
    split_edge,
    star_graph,
    suppress_degree_two,
    validate,
)
from graphsurgery.graph import combine_conditions, condition_from_strength, graph_stats
from graphsurgery.io import condition_from_json, dump_graph, fmt, load_graph, rounded


def triangle():
    return create_graph(["a", "b", ("c", DIRICHLET)],
                        [("e1", ("a", "b"), 1.0), ("e2", ("b", "c"), 2.0), ("e3", ("c", "a"), 0.5)])


def test_lookups():
    g = triangle()
    assert g.num_vertices == 3 and g.num_edges == 3
    assert g.total_length == pytest.approx(3.5)
    assert g.degree("a") == 2
    assert g.condition("c").is_dirichlet
    assert sorted(g.incident_edges("b")) == ["e1", "e2"]
    assert g.is_connected and not g.is_all_natural and g.has_dirichlet


def test_loop_counts_twice_in_degree():
    g = loop_graph(2.0)
    assert g.degree(g.vertex_ids[0]) == 2


@pytest.mark.parametrize("verts, edges, exc", [
    (["a", "a"], [("e", ("a", "a"), 1.0)], errors.DuplicateId),
    (["a"], [("e", ("a", "b"), 1.0)], errors.DanglingEndpoint),
    (["a", "b"], [("e", ("a", "b"), 0.0)], errors.NonpositiveLength),
    (["a", "b"], [("e", ("a", "b"), math.inf)], errors.NonpositiveLength),
    ([("a", delta(math.nan)), "b"], [("e", ("a", "b"), 1.0)], errors.NonfiniteGamma),
    ([("a", delta(0.0)), "b"], [("e", ("a", "b"), 1.0)], errors.ZeroGammaDelta),
    (["a", "b", "c"], [("e", ("a", "b"), 1.0)], errors.IsolatedVertex),
    ([], [], errors.EmptyGraph),
])
def test_validation_errors(verts, edges, exc):
    with pytest.raises(exc):
        create_graph(verts, edges)


def test_validate_reports_all():
    g = MetricGraph((), ())
    assert [v.code for v in validate(g)] == ["EmptyGraph"]


def test_conditions():
    assert combine_conditions([delta(1.0), delta(-1.0)]) == NATURAL
    assert combine_conditions([delta(1.0), DIRICHLET]) == DIRICHLET
    assert combine_conditions([delta(1.5), NATURAL]).gamma == 1.5
    assert condition_from_strength(math.inf) == DIRICHLET
    assert DIRICHLET.strength == math.inf and NATURAL.strength == 0.0


def test_split_and_suppress_roundtrip():
    g = triangle()
    h, vs, pieces = split_edge(g, "e2", [0.5, 1.5])
    assert len(vs) == 2 and pieces[0] == "e2"
    assert h.total_length == pytest.approx(g.total_length)
    for v in vs:
        h = suppress_degree_two(h, v)
    assert h.num_edges == 3 and h.length("e2") == pytest.approx(2.0)


def test_split_rejects_bad_points():
    with pytest.raises(errors.BadSplitPoint):
        split_edge(triangle(), "e1", [1.0])
    with pytest.raises(errors.BadSplitPoint):
        split_edge(triangle(), "e1", [0.6, 0.3])


def test_suppress_rejects():
    with pytest.raises(errors.NotSuppressible):
        suppress_degree_two(triangle(), "c")  # Dirichlet
    with pytest.raises(errors.NotSuppressible):
        suppress_degree_two(star_graph([1, 1, 1]), "c")


def test_disjoint_union_renames():
    g = triangle()
    u, vmap, emap = disjoint_union(g, g)
    assert u.num_vertices == 6 and u.num_edges == 6
    assert len(set(u.vertex_ids)) == 6 and vmap["a"] != "a"
    assert len(u.components()) == 2


def test_stats():
    s = graph_stats(triangle())
    assert s.num_edges == 3


@given(st.lists(st.floats(0.1, 5.0), min_size=1, max_size=6), st.floats(0.05, 0.95))
def test_dummy_vertex_preserves_length(lengths, frac):
    g = star_graph(lengths)
    h = insert_dummy_vertex(g, "e1", frac * g.length("e1"))
    assert h.num_edges == g.num_edges + 1
    assert h.total_length == pytest.approx(g.total_length, rel=1e-12)


def test_json_roundtrip(tmp_path):
    g = create_graph(["a", ("b", delta(-0.75)), ("c", DIRICHLET)],
                     [("e1", ("a", "b"), 1.25), ("e2", ("b", "c"), 0.5), ("e3", ("b", "b"), 2.0)])
    assert graph_from_dict(graph_to_dict(g)) == g
    p = tmp_path / "g.json"
    p.write_text(dump_graph(g))
    assert load_graph(p) == g


@pytest.mark.parametrize("obj", [
    {"vertices": []},
    {"vertices": [{"id": "a"}], "edges": [{"id": "e", "from": "a"}]},
    {"vertices": [{"id": "a", "condition": "robin"}], "edges": []},
])
def test_json_parse_errors(obj):
    with pytest.raises(errors.ParseError):
        graph_from_dict(obj)


def test_json_validation_error():
    with pytest.raises(errors.ValidationError):
        graph_from_dict({"vertices": [{"id": "a"}], "edges": [{"id": "e", "from": "a", "to": "a", "length": -1}]})


def test_condition_json():
    assert condition_from_json({"delta": 2}) == delta(2.0)
    with pytest.raises(errors.ParseError):
        condition_from_json({"delta": "x"})


def test_number_format():
    assert fmt(0.1 + 0.2) == "0.3"
    assert fmt(-0.0) == "0"
    assert fmt(3) == "3"
    assert fmt(math.inf) == "inf"
    assert rounded(math.pi) == 3.14159265359
