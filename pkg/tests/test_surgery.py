import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsurgery import (
    DIRICHLET,
    NATURAL,
    SolverConfig,
    TransplantTarget,
    add_edge,
    apply_script,
    attach_pendant,
    create_graph,
    cut_along_function,
    cut_explicit,
    delta,
    errors,
    glue_vertices,
    insert_graph,
    is_isomorphic,
    lengthen_edge,
    loop_graph,
    path_graph,
    pumpkin_graph,
    shrink_edge,
    solve_spectrum,
    star_graph,
    symmetrise_parallel,
    tadpole_graph,
    transplant,
    unfold_parallel,
    unfold_pendant,
)
from graphsurgery.diagnostics import max_residual
from graphsurgery.verify import RandomGraphParams, random_graph

CFG = SolverConfig(num_eigenvalues=6)


def vals(g, n=6):
    return solve_spectrum(g, CFG.with_(num_eigenvalues=n)).values


def test_glue_combines_conditions():
    g = create_graph([("a", delta(1.0)), ("b", delta(-1.0)), "c"], [("e1", ("a", "c"), 1.0), ("e2", ("b", "c"), 1.0)])
    r = glue_vertices(g, ["a", "b"])
    assert r.graph.condition("a") == NATURAL
    assert r.vertex_map["b"] == ("a",) and r.graph.num_vertices == 2
    with pytest.raises(errors.TooFewVertices):
        glue_vertices(g, ["a", "a"])
    with pytest.raises(errors.MissingVertex):
        glue_vertices(g, ["a", "zz"])


def test_glue_path_ends_gives_loop():
    r = glue_vertices(path_graph(2.0), ["v0", "v1"])
    assert is_isomorphic(r.graph, loop_graph(2.0))


def test_cut_explicit_partition_and_strengths():
    g = star_graph([1.0, 1.0, 1.0])
    r = cut_explicit(g, "c", [[("e1", 0)], [("e2", 0), ("e3", 0)]], [0.5, -0.5])
    assert r.graph.num_vertices == 5 and len(r.vertex_map["c"]) == 2
    assert sorted(r.graph.condition(v).strength for v in r.vertex_map["c"]) == [-0.5, 0.5]
    with pytest.raises(errors.GammaSumMismatch):
        cut_explicit(g, "c", [[("e1", 0)], [("e2", 0), ("e3", 0)]], [0.5, 0.0])
    with pytest.raises(errors.BadPartition):
        cut_explicit(g, "c", [[("e1", 0)], [("e2", 0)]], [0.0, 0.0])
    with pytest.raises(errors.GammaSumMismatch):
        cut_explicit(g, "c", [[("e1", 0)], [("e2", 0), ("e3", 0)]], ["dirichlet", 0.0])


def test_cut_dirichlet_vertex():
    g = create_graph(["a", ("b", DIRICHLET), "c"], [("e1", ("a", "b"), 1.0), ("e2", ("b", "c"), 1.0)])
    r = cut_explicit(g, "b", [[("e1", 1)], [("e2", 0)]], ["dirichlet", "dirichlet"])
    assert len(r.graph.components()) == 2


def test_cut_loop_ends_separately():
    g = loop_graph(2.0)
    v = g.vertex_ids[0]
    r = cut_explicit(g, v, [[("e1", 0)], [("e1", 1)]], [0.0, 0.0])
    assert is_isomorphic(r.graph, path_graph(2.0))


def test_cut_along_function_keeps_eigenfunction():
    g = pumpkin_graph([1.0, 1.3, 0.8])
    p = solve_spectrum(g, CFG).pair(2)
    v = g.vertex_ids[0]
    ends = list(g.ends_at(v))
    r = cut_along_function(g, v, p, [[ends[0]], ends[1:]])
    assert max_residual(p, r.graph) < 1e-7
    assert min(abs(x - p.lam) for x in vals(r.graph, 8)) < 1e-7


def test_cut_along_function_rejects_non_eigenfunction():
    g = pumpkin_graph([1.0, 1.3, 0.8])
    p = solve_spectrum(pumpkin_graph([1.0, 1.0, 1.0]), CFG).pair(2)
    v = g.vertex_ids[0]
    with pytest.raises(errors.NotAnEigenpair):
        cut_along_function(g, v, p, [[e] for e in g.ends_at(v)])


def test_attach_and_insert():
    g = path_graph(1.0)
    r = attach_pendant(g, "v1", path_graph(0.5), "v0")
    assert r.graph.total_length == pytest.approx(1.5) and r.graph.degree("v1") == 2
    assert r.inserted_edge_map  # the pendant's edge is tracked
    h = loop_graph(0.4)
    r = insert_graph(star_graph([1.0, 1.0]), "c", h)
    assert r.graph.total_length == pytest.approx(2.4)
    assert r.graph.num_vertices == 3


def test_insert_splits_strength_and_rejects_dirichlet():
    g = create_graph(["a", ("b", delta(2.0)), "c"], [("e1", ("a", "b"), 1.0), ("e2", ("b", "c"), 1.0)])
    h = path_graph(0.5)
    r = insert_graph(g, "b", h, [(("e1", 1), "v0"), (("e2", 0), "v1")], {"v0": 1.5, "v1": 0.5})
    strengths = sorted(r.graph.condition(v).strength for v in r.vertex_map["b"])
    assert strengths == [0.5, 1.5]
    with pytest.raises(errors.GammaSumMismatch):
        insert_graph(g, "b", h, None, {"v0": 1.0})
    with pytest.raises(errors.BadAssignment):
        insert_graph(g, "b", h, [(("e1", 1), "nope"), (("e2", 0), "v1")])
    gd = g.with_condition("b", DIRICHLET)
    with pytest.raises(errors.DirichletInsertionUnsupported):
        insert_graph(gd, "b", h)


def test_lengthen_shrink_add():
    g = tadpole_graph(1.0, 0.5)
    assert lengthen_edge(g, g.edge_ids[0], 0.25).graph.total_length == pytest.approx(1.25)
    with pytest.raises(errors.BadLength):
        lengthen_edge(g, g.edge_ids[0], -10.0)
    s = shrink_edge(star_graph([1.0, 2.0]), "e1")
    assert s.graph.num_edges == 1 and s.edge_map["e1"] == ()
    with pytest.raises(errors.EmptyGraph):
        shrink_edge(path_graph(1.0), "e1")
    a = add_edge(path_graph(1.0), "v0", "v1", 1.0)
    assert is_isomorphic(a.graph, loop_graph(2.0))
    with pytest.raises(errors.BadLength):
        add_edge(path_graph(1.0), "v0", "v1", 0.0)


def test_shrink_loop_drops_nothing_else():
    g = tadpole_graph(1.0, 0.5)
    loop = next(e.id for e in g.edges if e.is_loop)
    r = shrink_edge(g, loop)
    assert is_isomorphic(r.graph, path_graph(0.5))


def test_unfold_and_symmetrise():
    g = pumpkin_graph([1.0, 2.0, 3.0])
    r = unfold_parallel(g, ["e1", "e2"])
    assert r.graph.num_edges == 2 and r.graph.length("e1") == pytest.approx(3.0)
    with pytest.raises(errors.NotParallel):
        unfold_parallel(star_graph([1, 1]), ["e1", "e2"])
    s = symmetrise_parallel(g, ["e1", "e2", "e3"], 2)
    assert [s.graph.length(e) for e in s.graph.edge_ids] == pytest.approx([3.0, 3.0])
    with pytest.raises(errors.BadM):
        symmetrise_parallel(g, ["e1", "e2"], 3)
    same = symmetrise_parallel(pumpkin_graph([1.0, 1.0]), ["e1", "e2"], 2)
    assert "unchanged" in same.notes[0]


def test_unfold_pendant():
    g = star_graph([1.0, 0.5, 0.25])
    r = unfold_pendant(g, ["e1", "e2"])
    assert r.graph.num_edges == 2 and r.graph.length("e1") == pytest.approx(1.5)
    gd = g.with_condition("t2", DIRICHLET)
    with pytest.raises(errors.NonNaturalTip):
        unfold_pendant(gd, ["e1", "e2"])
    with pytest.raises(errors.NotPendantAtCommonVertex):
        unfold_pendant(pumpkin_graph([1, 1]), ["e1"])


def test_transplant_moves_volume():
    g = tadpole_graph(2.0, 1.0)
    loop = next(e for e in g.edges if e.is_loop)
    tip = next(v for v in g.vertex_ids if g.degree(v) == 1)
    r = transplant(g, [loop.endpoints[0]], [loop.id], [TransplantTarget(tip, path_graph(1.0))])
    assert is_isomorphic(r.graph, path_graph(2.0))
    with pytest.raises(errors.LengthMismatch):
        transplant(g, [loop.endpoints[0]], [loop.id], [TransplantTarget(tip, path_graph(0.5))])
    with pytest.raises(errors.NotDetachable):
        transplant(g, [], [loop.id], [TransplantTarget(tip, path_graph(1.0))])


def test_apply_script_composes_maps():
    ops = [
        {"op": "glue", "vertices": ["v0", "v1"]},
        {"op": "lengthen", "edge": "e1", "delta": 0.5},
        {"op": "attach_pendant", "vertex": "v0", "graph": "path:L=0.5", "pendant_vertex": "v0"},
        {"op": "set_condition", "vertex": "v0", "condition": {"delta": 1.0}},
    ]
    r = apply_script(path_graph(1.0), ops)
    assert r.graph.total_length == pytest.approx(2.0)
    assert r.vertex_map["v1"] == ("v0",)
    assert r.graph.condition("v0").gamma == 1.0
    assert r.notes[0].startswith("glued") and r.notes[-1] == "set v0 to delta(1)"


@pytest.mark.parametrize("op", [{"op": "explode"}, {"op": "lengthen", "edge": "e1"}])
def test_apply_script_errors(op):
    with pytest.raises(errors.ParseError):
        apply_script(path_graph(1.0), [op])


# properties

seeds = st.integers(0, 10_000)


@given(seeds, st.floats(0.1, 2.0))
def test_lengthening_all_natural_lowers_eigenvalues(seed, d):
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 4), num_edges=(1, 5)))
    e = g.edge_ids[seed % g.num_edges]
    a, b = vals(g, 5), vals(lengthen_edge(g, e, d).graph, 5)
    assert all(y <= x + 1e-8 for x, y in zip(a, b))


@given(seeds)
def test_gluing_interlaces(seed):
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 4), num_edges=(1, 5), p_natural=0.7, p_delta=0.3))
    v, w = g.vertex_ids[:2]
    h = glue_vertices(g, [v, w]).graph
    a, b = vals(g, 6), vals(h, 6)
    for k in range(5):
        assert a[k] - 1e-8 <= b[k] <= a[k + 1] + 1e-8


@given(seeds)
def test_maps_cover_original_ids(seed):
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 4), num_edges=(2, 5)))
    r = attach_pendant(g, g.vertex_ids[0], star_graph([0.3, 0.4]), "t1")
    assert set(r.vertex_map) == set(g.vertex_ids)
    assert set(r.edge_map) == set(g.edge_ids)
    assert all(set(ids) <= set(r.graph.vertex_ids) for ids in r.vertex_map.values())
    assert r.graph.total_length == pytest.approx(g.total_length + 0.7)
    assert math.isclose(r.graph.total_length, sum(e.length for e in r.graph.edges))
