import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import simpson

from graphsurgery import (
    DIRICHLET,
    Method,
    SolverConfig,
    create_graph,
    delta,
    errors,
    insert_dummy_vertex,
    loop_graph,
    path_graph,
    pumpkin_graph,
    solve_spectrum,
    spectral_gap,
    star_graph,
    tadpole_graph,
)
from graphsurgery.graph import condition_from_strength
from graphsurgery.diagnostics import max_residual, rayleigh_quotient
from graphsurgery.secular import from_scan_variable, secular_determinant, to_scan_variable
from graphsurgery.spectrum import refine_eigenvalue
from graphsurgery.verify import RandomGraphParams, random_graph

PI2 = math.pi**2

# Frozen values from scalar root finding (scipy brentq) on the closed-form
# characteristic equations, computed independently of this package.
TADPOLE_1_HALF = [0.0, 14.602077453837593, 76.47684645199679, 157.91367041742967, 157.91367041742973]
STAR_05_07_1 = [0.0, 3.2289435855879076, 7.014725413058167, 17.804859804800596, 31.93504464250539,
                53.63013638504978]
# Dirichlet end, delta(-2) at the other end of a unit interval: tanh(k) = k/2
DELTA_GROUND = -3.6672558244966513
# figure-8 with loops 1 and sqrt(2): 0, (2 pi n / (1 + sqrt 2))^2 and (2 pi n / l_i)^2
FIGURE8 = [0.0, 6.77342561885023, 19.739208802178716, 27.09370247540092, 39.47841760435743,
           60.960830569652074]


def figure8():
    return create_graph(["v"], [("e1", ("v", "v"), 1.0), ("e2", ("v", "v"), math.sqrt(2.0))])


@pytest.mark.parametrize("g, expected", [
    (tadpole_graph(1.0, 0.5), TADPOLE_1_HALF),
    (star_graph([0.5, 0.7, 1.0]), STAR_05_07_1),
    (figure8(), FIGURE8),
])
def test_frozen_oracles(g, expected):
    vals = solve_spectrum(g, SolverConfig(num_eigenvalues=len(expected))).values
    assert vals == pytest.approx(expected, abs=1e-8)


def test_negative_ground_state():
    g = create_graph([("a", DIRICHLET), ("b", delta(-2.0))], [("e1", ("a", "b"), 1.0)])
    spec = solve_spectrum(g, SolverConfig(num_eigenvalues=2))
    assert spec.lam(1) == pytest.approx(DELTA_GROUND, abs=1e-8)
    assert spec.lam(2) > 0


@pytest.mark.parametrize("L", [0.3, 1.0, 4.0])
def test_interval_and_loop(L):
    cfg = SolverConfig(num_eigenvalues=7)
    assert solve_spectrum(path_graph(L), cfg).values == pytest.approx(
        [(k * math.pi / L) ** 2 for k in range(7)], abs=1e-8)
    spec = solve_spectrum(loop_graph(L), cfg)
    assert spec.eigenvalues[1][1] == 2  # double eigenvalues on the loop
    assert spec.values == pytest.approx(
        [0.0] + [(2 * math.pi * ((k + 1) // 2) / L) ** 2 for k in range(1, 7)], abs=1e-8)


def test_pumpkin_triple():
    spec = solve_spectrum(pumpkin_graph([1.0, 1.0, 1.0]), SolverConfig(num_eigenvalues=4))
    assert spec.eigenvalues[1] == (pytest.approx(PI2, abs=1e-8), 3)
    assert spec.method is Method.SECULAR_REFINED


def test_dirichlet_interval():
    g = create_graph([("a", DIRICHLET), ("b", DIRICHLET)], [("e1", ("a", "b"), 2.0)])
    vals = solve_spectrum(g, SolverConfig(num_eigenvalues=3)).values
    assert vals == pytest.approx([(k * math.pi / 2) ** 2 for k in (1, 2, 3)], abs=1e-8)


def test_fem_only_is_close():
    g = star_graph([0.5, 0.7, 1.0])
    spec = solve_spectrum(g, SolverConfig(num_eigenvalues=6, refine=False, mesh_points_per_unit_length=128))
    assert spec.method is Method.FEM_ONLY
    assert spec.values == pytest.approx(STAR_05_07_1, rel=1e-3, abs=1e-9)
    # P1 elements overestimate
    assert all(a >= b - 1e-12 for a, b in zip(spec.values, STAR_05_07_1))


def test_refine_eigenvalue():
    lam, mult = refine_eigenvalue(loop_graph(1.0), 39.4)
    assert lam == pytest.approx(4 * PI2, abs=1e-9) and mult == 2
    with pytest.raises(errors.NoRootInBracket):
        refine_eigenvalue(path_graph(1.0), 30.0)


def test_secular_determinant_vanishes_at_eigenvalues():
    g = tadpole_graph(1.0, 0.5)
    val, _ = secular_determinant(g, TADPOLE_1_HALF[1])
    off, _ = secular_determinant(g, 20.0)
    assert abs(val) < 1e-10 < abs(off)
    for lam in (-4.0, 0.0, 2.5):
        assert from_scan_variable(to_scan_variable(lam)) == pytest.approx(lam)


def test_spectral_gap_conventions():
    assert spectral_gap(path_graph(1.0)) == pytest.approx(PI2)
    g = create_graph([("a", DIRICHLET), "b"], [("e1", ("a", "b"), 1.0)])
    assert spectral_gap(g) == pytest.approx(PI2 / 4)


def test_rayleigh_quotient_of_eigenfunction():
    g = star_graph([0.5, 0.7, 1.0])
    p = solve_spectrum(g, SolverConfig(num_eigenvalues=2)).pair(2)
    rq = rayleigh_quotient(g, lambda e, x: p.value(e, x), points_per_unit=512)
    assert rq == pytest.approx(p.lam, rel=1e-4)
    with pytest.raises(errors.ZeroFunction):
        rayleigh_quotient(g, lambda e, x: 0 * x)


def test_bad_config():
    with pytest.raises(ValueError):
        SolverConfig(mesh_points_per_unit_length=2)
    with pytest.raises(ValueError):
        SolverConfig(eig_abs_tol=1e-3, cluster_rel_tol=1e-4)


# properties

seeds = st.integers(0, 10_000)


def small_graph(seed, **kw):
    kw.setdefault("num_vertices", (2, 4))
    kw.setdefault("num_edges", (1, 5))
    return random_graph(RandomGraphParams(seed, **kw))


MIXED = dict(p_natural=0.6, p_dirichlet=0.2, p_delta=0.2)


@given(seeds, st.floats(0.3, 3.0))
def test_scaling(seed, c):
    g = small_graph(seed)
    cfg = SolverConfig(num_eigenvalues=4)
    a = solve_spectrum(g, cfg).values
    b = solve_spectrum(g.scaled(c), cfg).values
    assert np.allclose(np.array(b) * c * c, a, atol=1e-7, rtol=1e-8)


@given(seeds, st.floats(0.1, 0.9))
def test_dummy_vertex_invariance(seed, frac):
    g = small_graph(seed, **MIXED)
    e = g.edge_ids[seed % g.num_edges]
    h = insert_dummy_vertex(g, e, frac * g.length(e))
    cfg = SolverConfig(num_eigenvalues=4)
    assert solve_spectrum(h, cfg).values == pytest.approx(solve_spectrum(g, cfg).values, abs=1e-7)


@given(seeds)
def test_edge_reversal_invariance(seed):
    g = small_graph(seed, **MIXED)
    h = g.with_reversed_edge(g.edge_ids[0])
    cfg = SolverConfig(num_eigenvalues=4)
    assert solve_spectrum(h, cfg).values == pytest.approx(solve_spectrum(g, cfg).values, abs=1e-7)


@given(seeds)
def test_eigenpairs_are_orthonormal_and_satisfy_conditions(seed):
    g = small_graph(seed, **MIXED)
    spec = solve_spectrum(g, SolverConfig(num_eigenvalues=4))
    gram = np.zeros((4, 4))
    for e in g.edge_ids:
        xs = np.linspace(0.0, g.length(e), 801)
        vals = np.array([p.value(e, xs) for p in spec.pairs])
        gram += simpson(vals[:, None, :] * vals[None, :, :], x=xs, axis=-1)
    assert np.allclose(gram, np.eye(4), atol=1e-6)
    assert all(max_residual(p, g) < 1e-6 for p in spec.pairs)


@given(seeds, st.floats(0.1, 3.0))
def test_stronger_delta_raises_eigenvalues(seed, inc):
    g = small_graph(seed, **MIXED)
    v = next((x.id for x in g.vertices if not x.condition.is_dirichlet), None)
    if v is None:
        return
    gam = g.condition(v).strength
    h = g.with_condition(v, condition_from_strength(gam + inc))
    cfg = SolverConfig(num_eigenvalues=4)
    a, b = solve_spectrum(g, cfg).values, solve_spectrum(h, cfg).values
    assert all(y >= x - 1e-8 for x, y in zip(a, b))
