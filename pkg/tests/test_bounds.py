import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from graphsurgery import (
    DIRICHLET,
    SolverConfig,
    create_graph,
    disjoint_union,
    dumbbell_graph,
    errors,
    interpolation_check,
    loop_graph,
    lower_bounds,
    path_graph,
    pumpkin_graph,
    spectral_gap,
    star_graph,
    tadpole_graph,
)
from graphsurgery.bounds import dumbbell_gap, tadpole_gap
from graphsurgery.verify import RandomGraphParams, random_graph

PI2 = math.pi**2

# Frozen values from scipy brentq on reduced star equations (L = 1), computed
# independently of this package. Tadpole: tan(k(L-V)) + 2 tan(kV/2) = 0 or
# k = 2 pi / V. Dumbbell: 2 tan(kV/4) = cot(k(L-V)/2).
TADPOLE = {0.2: 10.215109407277657, 0.5: 14.602077453837593, 0.8: 33.07756622786736}
DUMBBELL = {0.2: 9.963988769611863, 0.5: 11.318344137774492, 0.8: 17.684912715272638}


@pytest.mark.parametrize("V", sorted(TADPOLE))
def test_reference_gaps(V):
    assert tadpole_gap(V, 1.0) == pytest.approx(TADPOLE[V], abs=1e-8)
    assert dumbbell_gap(V, 1.0) == pytest.approx(DUMBBELL[V], abs=1e-8)


def test_gap_endpoints_and_scaling():
    for f in (tadpole_gap, dumbbell_gap):
        assert f(0.0, 1.0) == pytest.approx(PI2, abs=1e-8)
        assert f(1.0, 1.0) == pytest.approx(4 * PI2, abs=1e-8)
    assert tadpole_gap(1.0, 2.0) == pytest.approx(TADPOLE[0.5] / 4, abs=1e-8)


def test_path_attains_nicaise():
    r = lower_bounds(path_graph(2.0))
    assert r.margins["nicaise"] == pytest.approx(0.0, abs=1e-8)
    assert not r.band_levy_applicable and r.band_levy is None
    assert r.girth == 0.0 and r.V_total == 0.0


def test_loop_attains_band_levy_and_tadpole():
    r = lower_bounds(loop_graph(1.0))
    assert r.band_levy_applicable
    for k in ("band_levy", "tadpole", "circumference", "girth", "dumbbell"):
        assert r.margins[k] == pytest.approx(0.0, abs=1e-8)


def test_dumbbell_attains_dumbbell_bound():
    r = lower_bounds(dumbbell_graph(0.3, 0.3, 1.0))
    assert r.margins["dumbbell"] == pytest.approx(0.0, abs=1e-8)
    assert r.margins["tadpole"] > 0


def test_report_fields():
    r = lower_bounds(pumpkin_graph([1.0, 2.0, 3.0]))
    assert r.V_total == pytest.approx(6.0) and r.circumference == pytest.approx(5.0)
    assert r.girth == pytest.approx(3.0)
    assert r.worst_margin >= 0
    assert r.to_dict()["lambda2"] == r.lambda2


def test_bounds_errors():
    g = path_graph(1.0)
    u, _, _ = disjoint_union(g, g)
    with pytest.raises(errors.Disconnected):
        lower_bounds(u)
    with pytest.raises(errors.NotAllNatural):
        lower_bounds(create_graph([("a", DIRICHLET), "b"], [("e1", ("a", "b"), 1.0)]))


def test_interpolation_check():
    grid = [i / 10 for i in range(11)]
    t = interpolation_check(1.0, grid)
    assert t.ok and t.max_endpoint_error < 1e-8
    csv = t.to_csv().splitlines()
    assert csv[0] == "V,dumbbell,tadpole" and len(csv) == 12
    assert [r.tadpole for r in t.rows] == sorted(r.tadpole for r in t.rows)
    with pytest.raises(errors.BadSpec):
        interpolation_check(1.0, [1.5])
    with pytest.raises(errors.BadSpec):
        interpolation_check(0.0, [0.0])


def test_tadpole_above_dumbbell_on_examples():
    for V in TADPOLE:
        assert TADPOLE[V] > DUMBBELL[V]
    assert lower_bounds(star_graph([1.0, 1.0, 1.0])).margins["nicaise"] > 0


# properties

@given(st.integers(0, 10_000))
def test_gap_dominates_every_bound(seed):
    g = random_graph(RandomGraphParams(seed, num_vertices=(1, 5), num_edges=(1, 7)))
    r = lower_bounds(g, SolverConfig())
    assert r.worst_margin >= -1e-8
    assert r.lambda2 >= r.nicaise - 1e-8
    if r.circumference_bound is not None:
        assert r.circumference_bound >= r.girth_bound - 1e-8


@given(st.floats(0.05, 0.95))
def test_tadpole_gap_from_tadpole_graph(V):
    assert tadpole_gap(V, 1.0) == pytest.approx(spectral_gap(tadpole_graph(1.0, V)), abs=1e-9)
