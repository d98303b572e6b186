import itertools

import networkx as nx
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsurgery import (
    DIRICHLET,
    SolverConfig,
    bridges,
    build_named,
    circumference,
    create_graph,
    doubly_connected_part,
    dumbbell_graph,
    errors,
    girth,
    is_isomorphic,
    loop_graph,
    path_graph,
    pumpkin_chain,
    pumpkin_dumbbell,
    pumpkin_graph,
    pumpkin_on_stick,
    reduce_to_pumpkin_chain,
    solve_spectrum,
    star_graph,
    tadpole_graph,
)
from graphsurgery.spectrum import mu_index
from graphsurgery.topology import CIRCUMFERENCE_MAX_EDGES, canonical_form, chain_spec_of
from graphsurgery.verify import RandomGraphParams, random_graph


def figure8(a=1.0, b=2.0):
    return create_graph(["v"], [("e1", ("v", "v"), a), ("e2", ("v", "v"), b)])


def test_bridges_and_doubly_connected_part():
    g = dumbbell_graph(0.3, 0.2, 1.0)
    assert len(bridges(g)) == 1
    d = doubly_connected_part(g)
    assert d.total_length == pytest.approx(0.5)
    assert d.largest_component_length == pytest.approx(0.3)
    assert bridges(loop_graph(1.0)) == set()
    assert bridges(star_graph([1, 1, 1])) == {"e1", "e2", "e3"}


def test_girth_and_circumference_examples():
    g = figure8()
    assert girth(g) == pytest.approx(1.0)
    assert circumference(g) == pytest.approx(3.0)
    assert circumference(path_graph(1.0)) == 0.0
    assert girth(path_graph(1.0)) == 0.0  # forest convention
    p = pumpkin_graph([1.0, 2.0, 3.0])
    assert girth(p) == pytest.approx(3.0) and circumference(p) == pytest.approx(5.0)


def test_circumference_cap():
    n = CIRCUMFERENCE_MAX_EDGES + 1
    g = pumpkin_graph([1.0] * n)
    with pytest.raises(errors.TooManyEdgesForCircumference):
        circumference(g)


def _even_connected_subsets(g):
    """Lengths of all nonempty connected even-degree edge subsets (brute force)."""
    out = []
    edges = g.edges
    for r in range(1, len(edges) + 1):
        for sub in itertools.combinations(edges, r):
            deg = {}
            h = nx.MultiGraph()
            for e in sub:
                a, b = e.endpoints
                deg[a] = deg.get(a, 0) + 1
                deg[b] = deg.get(b, 0) + 1
                h.add_edge(a, b)
            if all(d % 2 == 0 for d in deg.values()) and nx.is_connected(h):
                out.append(sum(e.length for e in sub))
    return out


def _brute_bridges(g):
    base = len(g.components())
    out = set()
    for e in g.edges:
        rest = [x for x in g.edges if x.id != e.id]
        h = nx.MultiGraph()
        h.add_nodes_from(g.vertex_ids)
        h.add_edges_from(x.endpoints for x in rest)
        if nx.number_connected_components(h) > base:
            out.add(e.id)
    return out


@given(st.integers(0, 10_000))
def test_cycle_quantities_match_brute_force(seed):
    g = random_graph(RandomGraphParams(seed, num_vertices=(1, 5), num_edges=(1, 8)))
    subs = _even_connected_subsets(g)
    assert circumference(g) == pytest.approx(max(subs, default=0.0), rel=1e-12)
    assert girth(g) == pytest.approx(min(subs, default=0.0), rel=1e-12)
    assert bridges(g) == _brute_bridges(g)
    d = doubly_connected_part(g)
    assert d.total_length == pytest.approx(g.total_length - sum(g.length(e) for e in bridges(g)))
    c, gi = circumference(g), girth(g)
    assert c >= gi and c <= d.total_length + 1e-12
    assert (c == 0.0) == (gi == 0.0) == (len(bridges(g)) == g.num_edges)


def test_builders():
    assert is_isomorphic(tadpole_graph(1.0, 0.0), path_graph(1.0))
    assert is_isomorphic(tadpole_graph(1.0, 1.0), loop_graph(1.0))
    assert is_isomorphic(pumpkin_dumbbell(0.4, 0.0, 2, 1.0), tadpole_graph(1.0, 0.4))
    assert is_isomorphic(pumpkin_dumbbell(0.4, 0.0, 2, 1.0), pumpkin_on_stick(0.6, 2, 0.0, 1.0))
    assert is_isomorphic(pumpkin_chain([2, 1, 2], [0.3, 0.4, 0.3]), dumbbell_graph(0.3, 0.3, 1.0))
    assert not is_isomorphic(dumbbell_graph(0.3, 0.2, 1.0), dumbbell_graph(0.3, 0.3, 1.0))
    with pytest.raises(errors.BadSpec):
        dumbbell_graph(0.6, 0.6, 1.0)


def test_isomorphism_respects_conditions():
    g = path_graph(1.0)
    h = g.with_condition("v0", DIRICHLET)
    assert not is_isomorphic(g, h)
    assert is_isomorphic(h, path_graph(1.0).with_condition("v1", DIRICHLET))


def test_canonical_form_suppresses_dummy_vertices():
    g = pumpkin_chain([1, 1, 1], [0.2, 0.3, 0.5])
    c = canonical_form(g)
    assert c.num_edges == 1 and c.total_length == pytest.approx(1.0)


@pytest.mark.parametrize("spec, n_edges, L", [
    ("path:L=2", 1, 2.0),
    ("loop:L=3", 1, 3.0),
    ("star:len=[1,2,.5]", 3, 3.5),
    ("flower:len=[1,1]", 2, 2.0),
    ("pumpkin:len=[1,1,1]", 3, 3.0),
    ("tadpole:L=1,V=0.5", 2, 1.0),
    ("lasso:L=1,V=0.5", 2, 1.0),
    ("dumbbell:l1=0.2,l2=0.3,L=1", 3, 1.0),
    ("pd:l1=0.25,l2=0.25,m=2,L=1", 5, 1.0),
    ("p:l1=0.25,m=3,l2=0.25,L=1", 5, 1.0),
    ("chain:m=[2,1,2],len=[0.5,0.4,0.6]", 5, 1.5),
    ("chain:m=[1,2],len=[1,1],left=dirichlet,right=-0.5", 3, 2.0),
])
def test_build_named(spec, n_edges, L):
    g = build_named(spec)
    assert g.num_edges == n_edges and g.total_length == pytest.approx(L)


@pytest.mark.parametrize("spec, exc", [
    ("", errors.ParseError),
    ("blob:L=1", errors.ParseError),
    ("path:L=x", errors.ParseError),
    ("path:L=1,Q=2", errors.ParseError),
    ("path:L=1,L=2", errors.ParseError),
    ("star:len=1,2", errors.ParseError),
    ("chain:m=[1,2],len=[1,1],left=robin", errors.ParseError),
    ("pd:l1=0.25,l2=0.25,m=2.5,L=1", errors.BadSpec),
])
def test_build_named_errors(spec, exc):
    with pytest.raises(exc):
        build_named(spec)


def test_chain_spec_of():
    g = pumpkin_chain([2, 3], [0.5, 0.5], left=DIRICHLET)
    s = chain_spec_of(g)
    assert list(s.multiplicities) == [2, 3]
    assert s.locally_equilateral


@pytest.mark.parametrize("g", [
    dumbbell_graph(0.3, 0.3, 1.0),
    star_graph([0.5, 0.7, 1.0]),
    tadpole_graph(1.0, 0.4),
    pumpkin_graph([1.0, 1.5, 0.7]),
])
def test_reduction_preserves_mu(g):
    cfg = SolverConfig()
    k = mu_index(g)
    spec = solve_spectrum(g, cfg.with_(num_eigenvalues=k + 1))
    red = reduce_to_pumpkin_chain(g, spec.pair(k), cfg)
    assert red.mu_chain == pytest.approx(red.mu, abs=2e-9)
    chain, cspec = red
    assert len(cspec.multiplicities) >= 1
    assert chain.total_length <= g.total_length + 1e-12
