import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsurgery import SolverConfig, solve_spectrum
from graphsurgery._kernels import HAVE_NUMBA, get_backend
from graphsurgery.fem import build_mesh
from graphsurgery.secular import secular_system
from graphsurgery.topology import cycle_space_basis
from graphsurgery.verify import RandomGraphParams, random_graph

pytestmark = pytest.mark.skipif(not HAVE_NUMBA, reason="numba not installed")

MIXED = dict(p_natural=0.5, p_dirichlet=0.2, p_delta=0.3)


def graph(seed):
    return random_graph(RandomGraphParams(seed, num_vertices=(1, 5), num_edges=(1, 7), **MIXED))


def close(a, b):
    return np.allclose(np.asarray(a, float), np.asarray(b, float), rtol=1e-10, atol=1e-12)


@given(st.integers(0, 10_000), st.floats(-50.0, 400.0))
def test_secular_matrix_parity(seed, lam):
    args = secular_system(graph(seed))._args
    nb, npb = get_backend(True), get_backend(False)
    assert close(nb.secular_matrix(lam, *args), npb.secular_matrix(lam, *args))
    m1, c1, s1 = nb.secular_scaled(lam, *args)
    m2, c2, s2 = npb.secular_scaled(lam, *args)
    assert close(m1, m2) and close(c1, c2)
    d1, l1 = nb.secular_logdet(lam, *args)
    d2, l2 = npb.secular_logdet(lam, *args)
    assert d1 * np.exp(l1 - l2) == pytest.approx(d2, rel=1e-7, abs=1e-12)


@given(st.integers(0, 10_000))
def test_scan_and_bisect_parity(seed):
    args = secular_system(graph(seed))._args
    ts = np.linspace(-4.0, 12.0, 400)
    nb, npb = get_backend(True), get_backend(False)
    a, b = nb.scan_secular(ts, *args), npb.scan_secular(ts, *args)
    assert np.array_equal(np.sign(np.round(a, 9)), np.sign(np.round(b, 9)))
    flips = np.nonzero(np.sign(a[:-1]) * np.sign(a[1:]) < 0)[0]
    if flips.size:
        i = int(flips[0])
        r1 = nb.bisect_secular(ts[i], ts[i + 1], a[i], 1e-13, 200, *args)
        r2 = npb.bisect_secular(ts[i], ts[i + 1], a[i], 1e-13, 200, *args)
        assert r1[0] == pytest.approx(r2[0], abs=1e-11)


@given(st.integers(0, 10_000), st.integers(8, 40))
def test_assembly_parity(seed, ppu):
    g = graph(seed)
    mesh = build_mesh(g, ppu)
    n_int = np.array([len(mesh.edge_x[e.id]) - 1 for e in g.edges], dtype=np.int64)
    h = np.array([e.length for e in g.edges]) / n_int
    nodes = np.concatenate([mesh.edge_nodes[e.id] for e in g.edges]).astype(np.int64)
    offsets = np.concatenate(([0], np.cumsum(n_int + 1)[:-1])).astype(np.int64)
    for x, y in zip(get_backend(True).p1_assemble(n_int, h, nodes, offsets),
                    get_backend(False).p1_assemble(n_int, h, nodes, offsets)):
        assert close(x, y)


@given(st.integers(0, 10_000))
def test_even_subgraph_parity(seed):
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 5), num_edges=(2, 9)))
    basis = np.array(cycle_space_basis(g), dtype=np.int64)
    if basis.size == 0:
        return
    idx = {v: i for i, v in enumerate(g.vertex_ids)}
    eu = np.array([idx[e.endpoints[0]] for e in g.edges], dtype=np.int64)
    ev = np.array([idx[e.endpoints[1]] for e in g.edges], dtype=np.int64)
    lengths = np.array([e.length for e in g.edges])
    a = get_backend(True).max_even_subgraph(basis, lengths, eu, ev, len(idx))
    b = get_backend(False).max_even_subgraph(basis, lengths, eu, ev, len(idx))
    assert a[0] == pytest.approx(b[0], rel=1e-12)


def test_solver_agrees_without_numba(monkeypatch):
    g = graph(17)
    cfg = SolverConfig(num_eigenvalues=5)
    a = solve_spectrum(g, cfg).values
    monkeypatch.setenv("GRAPHSURGERY_NO_NUMBA", "1")
    assert get_backend().name != "numba"
    b = solve_spectrum(g, cfg).values
    assert a == pytest.approx(b, abs=1e-9)
