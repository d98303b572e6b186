"""Per-eigenfunction quantities: residuals, Pruefer amplitudes, derivatives of
eigenvalues with respect to lengths and strengths, critical levels,
longitudinal parts and symmetrised test functions."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from . import errors
from .fem import Mesh, assemble, build_mesh
from .graph import MetricGraph, condition_from_strength
from .spectrum import (
    EdgeCoefficients,
    EigenPair,
    SolverConfig,
    _extremum_grid,
    coefficients_from_value_slope,
    edge_quadrature,
    solve_spectrum,
)

log = logging.getLogger(__name__)


# residuals


def kirchhoff_residual(p: EigenPair, g: MetricGraph, v: str) -> float:
    """``|sum of outward derivatives + gamma psi(v)|``, or ``|psi(v)|`` at a Dirichlet vertex."""
    ends = g.ends_at(v)
    if not ends:
        return 0.0
    cond = g.condition(v)
    vals = [p.end_value(e) for e in ends]
    if cond.is_dirichlet:
        return max(abs(x) for x in vals)
    flux = math.fsum(p.outward_derivative(e) for e in ends)
    if cond.is_delta:
        flux += cond.gamma * vals[0]
    return abs(flux)


def continuity_residual(p: EigenPair, g: MetricGraph, v: str) -> float:
    vals = [p.end_value(e) for e in g.ends_at(v)]
    return (max(vals) - min(vals)) if vals else 0.0


def max_residual(p: EigenPair, g: MetricGraph) -> float:
    """Largest vertex residual relative to ``max(sup|psi|, 1e-300)``."""
    sup = max(p.sup_norm(), 1e-300)
    worst = 0.0
    for v in g.vertex_ids:
        worst = max(worst, kirchhoff_residual(p, g, v), continuity_residual(p, g, v))
    return worst / sup


# Pruefer amplitude and derivatives of eigenvalues


@dataclass(frozen=True)
class PrueferAmplitude:
    edge: str
    value: float
    max_deviation_along_edge: float


def pruefer_amplitude(p: EigenPair, e: str) -> PrueferAmplitude:
    """``psi'^2 + lam psi^2`` sampled at five points of ``e``."""
    if p.lam < 0:
        raise errors.NegativeLambdaUnsupported("Pruefer amplitude needs lam >= 0")
    xs = np.linspace(0.0, p.lengths[e], 5)
    val, der = p.evaluate(e, xs)
    amp = der * der + p.lam * val * val
    mean = float(np.mean(amp))
    return PrueferAmplitude(e, mean, float(np.max(np.abs(amp - mean))))


def _simple_pair(g: MetricGraph, k: int, cfg: SolverConfig):
    cfg = cfg.with_(num_eigenvalues=max(cfg.num_eigenvalues, k + 1))
    spec = solve_spectrum(g, cfg)
    lam = spec.lam(k)
    if spec.multiplicity_of(k) != 1 or (
        abs(spec.lam(k + 1) - lam) <= cfg.cluster_rel_tol * max(1.0, abs(lam))
    ):
        raise errors.DegenerateEigenvalue(f"lambda_{k} = {lam:.12g} is not simple")
    return spec, cfg


def hadamard_derivative(
    g: MetricGraph, e: str, k: int, cfg: SolverConfig | None = None, allow_delta: bool = False
) -> tuple[float, float]:
    """Derivative of ``lambda_k`` in the length of ``e``: ``(-E_e, central difference)``.

    The analytic value is only established for natural and Dirichlet
    conditions; with delta vertices pass ``allow_delta=True`` to get both
    numbers anyway (the comparison is logged, not checked).
    """
    cfg = cfg or SolverConfig()
    if g.has_delta and not allow_delta:
        raise errors.UnsupportedConditions("length derivative formula not available with delta vertices")
    spec, cfg = _simple_pair(g, k, cfg)
    p = spec.pair(k)
    analytic = -pruefer_amplitude(p, e).value if p.lam >= 0 else -_amplitude_any(p, e)
    ell = g.length(e)
    h = 1e-5 * ell
    up = solve_spectrum(g.with_length(e, ell + h), cfg).lam(k)
    dn = solve_spectrum(g.with_length(e, ell - h), cfg).lam(k)
    fd = (up - dn) / (2 * h)
    if g.has_delta:
        log.info("delta graph: analytic %.10g vs finite difference %.10g", analytic, fd)
    return analytic, fd


def _amplitude_any(p: EigenPair, e: str) -> float:
    val, der = p.evaluate(e, 0.0)
    return der * der + p.lam * val * val


def gamma_derivative(
    g: MetricGraph, v: str, k: int, cfg: SolverConfig | None = None
) -> tuple[float, float]:
    """Derivative of ``lambda_k`` in the strength at ``v``: ``(psi(v)^2, central difference)``."""
    cfg = cfg or SolverConfig()
    cond = g.condition(v)
    if cond.is_dirichlet:
        raise errors.UnsupportedConditions("no finite strength at a Dirichlet vertex")
    spec, cfg = _simple_pair(g, k, cfg)
    p = spec.pair(k)
    end = g.ends_at(v)[0]
    analytic = p.end_value(end) ** 2
    gam = cond.strength
    h = 1e-5 * max(1.0, abs(gam))
    up = solve_spectrum(g.with_condition(v, condition_from_strength(gam + h, h)), cfg).lam(k)
    dn = solve_spectrum(g.with_condition(v, condition_from_strength(gam - h, h)), cfg).lam(k)
    return analytic, (up - dn) / (2 * h)


# Rayleigh quotients


def rayleigh_quotient(
    g: MetricGraph,
    f: np.ndarray | Callable,
    mesh: Mesh | None = None,
    points_per_unit: int = 64,
) -> float:
    """Rayleigh quotient of a piecewise-linear function.

    ``f`` is a nodal vector on ``mesh`` or a callable ``f(edge_id, x_array)``
    that is interpolated on a fresh mesh of ``g``.
    """
    if mesh is None:
        mesh = build_mesh(g, points_per_unit)
    if callable(f):
        vec = mesh.sample(f)
    else:
        vec = np.asarray(f, dtype=float)
        if vec.shape != (mesh.num_nodes,):
            raise ValueError(f"expected {mesh.num_nodes} nodal values, got {vec.shape}")
    scale = float(np.max(np.abs(vec))) if vec.size else 0.0
    if scale == 0.0:
        raise errors.ZeroFunction("test function vanishes identically")
    dn = mesh.dirichlet_nodes
    if dn.size and float(np.max(np.abs(vec[dn]))) > 1e-10 * scale:
        raise errors.DirichletViolation("test function is nonzero at a Dirichlet vertex")
    K, M = assemble(mesh)
    return float(vec @ (K @ vec)) / float(vec @ (M @ vec))


# critical levels


@dataclass(frozen=True)
class CriticalLevel:
    level: float
    vertices: tuple[str, ...]
    points: tuple[tuple[str, float], ...]


def interior_extrema(p: EigenPair, e: str, rel: float = 1e-9) -> list[float]:
    ell = p.lengths[e]
    return [float(x) for x in _extremum_grid(p, e) if rel * ell < x < ell * (1 - rel)]


def critical_levels(
    p: EigenPair, g: MetricGraph, cfg: SolverConfig | None = None
) -> list[CriticalLevel]:
    """Values at vertices and interior extrema, grouped by level (ascending)."""
    cfg = cfg or SolverConfig()
    if abs(p.lam) <= cfg.eig_abs_tol:
        raise errors.ZeroEigenvalue("critical levels need a nonzero eigenvalue")
    items: list[tuple[float, str, object]] = []
    for v in g.vertex_ids:
        ends = g.ends_at(v)
        if ends:
            items.append((p.end_value(ends[0]), "v", v))
    for e in g.edge_ids:
        if _identically_zero(p, e):
            continue
        for x in interior_extrema(p, e):
            items.append((float(p.value(e, x)), "p", (e, x)))
    tol = cfg.cluster_rel_tol * max(p.sup_norm(), 1e-300)
    items.sort(key=lambda it: it[0])
    groups: list[list] = []
    for it in items:
        if groups and it[0] - groups[-1][-1][0] <= tol:
            groups[-1].append(it)
        else:
            groups.append([it])
    out = []
    for grp in groups:
        level = float(np.mean([it[0] for it in grp]))
        verts = tuple(it[2] for it in grp if it[1] == "v")
        pts = tuple(it[2] for it in grp if it[1] == "p")
        out.append(CriticalLevel(level, verts, pts))
    return out


def _identically_zero(p: EigenPair, e: str, rel: float = 1e-10) -> bool:
    c = p.coefficients[e]
    sup = max(p.sup_norm(), 1e-300)
    val, der = p.evaluate(e, 0.0)
    k = max(p.wavenumber, 1.0 / p.lengths[e])
    return abs(val) <= rel * sup and abs(der) <= rel * sup * k or (c.a == 0.0 and c.b == 0.0)


# longitudinal part on a pumpkin chain


def oriented_start(p: EigenPair, g: MetricGraph, e: str, start: str) -> tuple[float, float]:
    """``(psi, psi')`` at the end of ``e`` sitting at ``start``, derivative pointing into ``e``."""
    edge = g.edge(e)
    if edge.endpoints[0] == start:
        return p.evaluate(e, 0.0)
    val, der = p.evaluate(e, edge.length)
    return val, -der


def longitudinal_part(p: EigenPair, g: MetricGraph, chain) -> tuple[EigenPair | None, bool]:
    """Average ``psi`` over the parallel edges of each pumpkin of ``chain``.

    ``chain`` is a :class:`graphsurgery.topology.PumpkinChainSpec` carrying the
    chain vertices and per-pumpkin edge lists of ``g``.  Returns
    ``(part, already_longitudinal)``; ``part`` is ``None`` when the average
    vanishes.  A nonzero part is checked to be an eigenfunction for the same
    eigenvalue.
    """
    if not chain.locally_equilateral:
        raise errors.NotLocallyEquilateral("pumpkin edges must have equal lengths")
    coeffs: dict[str, EdgeCoefficients] = {}
    changed = 0.0
    sup = max(p.sup_norm(), 1e-300)
    for k, edges in enumerate(chain.pumpkin_edges):
        start = chain.vertices[k]
        starts = [oriented_start(p, g, e, start) for e in edges]
        a = math.fsum(s[0] for s in starts) / len(edges)
        s = math.fsum(s[1] for s in starts) / len(edges)
        k_scale = max(p.wavenumber, 1.0 / g.length(edges[0]))
        for (v0, d0), e in zip(starts, edges):
            changed = max(changed, abs(v0 - a) / sup, abs(d0 - s) / (sup * k_scale))
            edge = g.edge(e)
            if edge.endpoints[0] == start:
                coeffs[e] = coefficients_from_value_slope(p.lam, a, s)
            else:
                # same function read from the other end
                tmp = EigenPair(p.lam, {e: coefficients_from_value_slope(p.lam, a, s)},
                                {e: edge.length})
                va, da = tmp.evaluate(e, edge.length)
                coeffs[e] = coefficients_from_value_slope(p.lam, va, -da)
    for e in g.edge_ids:
        coeffs.setdefault(e, p.coefficients[e])
    part = EigenPair(p.lam, coeffs, dict(p.lengths), 1.0)
    already = changed <= 1e-8
    if part.sup_norm() <= 1e-8 * sup:
        return None, already
    if max_residual(part, g) > 1e-7:
        raise errors.SolverFailure("longitudinal average is not an eigenfunction")
    return part, already


# symmetrisation


@dataclass(frozen=True)
class SymmetrisedFunction:
    graph: MetricGraph
    new_edges: tuple[str, ...]
    samples: dict[str, tuple[np.ndarray, np.ndarray]]
    rayleigh: float
    original_rayleigh: float
    l2_norm: float
    original_l2_norm: float
    integral: float
    original_integral: float


def is_monotone_on(p: EigenPair, e: str, tol: float = 1e-8) -> bool:
    """No interior sign change of ``psi'`` (up to a tolerance relative to the range)."""
    ell = p.lengths[e]
    xs = _extremum_grid(p, e)
    vals = p.value(e, xs)
    span = float(np.max(vals) - np.min(vals))
    ends = abs(p.value(e, ell) - p.value(e, 0.0))
    # monotone iff the oscillation equals the net change
    return span - ends <= tol * max(span, p.sup_norm(), 1e-300)


def symmetrise_function(
    p: EigenPair, g: MetricGraph, edges: Sequence[str], m: int, nquad: int = 400,
    samples_per_edge: int = 2001,
) -> SymmetrisedFunction:
    """Equimeasurable rearrangement of ``psi`` on parallel edges onto ``m`` equal edges.

    On each level ``t`` between the end values the new edges place the level
    at the average of the preimage positions.  Dirichlet energy of the new
    function is ``m^2 * int dt / sum_j (1/psi_j')`` against
    ``int sum_j psi_j' dt`` for the old one, both evaluated with the same
    quadrature in ``t`` so the comparison is exact up to rounding.
    """
    from .surgery import symmetrise_parallel

    edges = list(edges)
    k = len(edges)
    if not 1 <= m <= k:
        raise errors.BadM(f"need 1 <= m <= {k}")
    v1, v2 = g.edge(edges[0]).endpoints
    res = symmetrise_parallel(g, edges, m)
    new_g = res.graph
    new_edges = tuple(res.edge_map[edges[0]])
    for e in edges:
        if not is_monotone_on(p, e):
            raise errors.NotMonotone(f"eigenfunction is not monotone on edge {e!r}")
    a = p.end_value(g.ends_at(v1)[0])
    b = p.end_value(g.ends_at(v2)[0])
    new_len = math.fsum(g.length(e) for e in edges) / m

    # positions x_j(t) measured from v1
    def oriented(e):
        edge = g.edge(e)
        if edge.endpoints[0] == v1:
            return lambda x: p.evaluate(e, x)
        return lambda x: (p.value(e, edge.length - x), -p.derivative(e, edge.length - x))

    funcs = [oriented(e) for e in edges]
    lens = [g.length(e) for e in edges]
    sign = 1.0 if b >= a else -1.0

    def pos(j, t):
        f = funcs[j]
        lo, hi = 0.0, lens[j]
        flo = sign * (f(lo)[0] - t)
        fhi = sign * (f(hi)[0] - t)
        if flo >= 0:
            return lo
        if fhi <= 0:
            return hi
        return brentq(lambda x: sign * (f(x)[0] - t), lo, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)

    # t = a + (b-a)(1-cos th)/2 smooths the square-root behaviour at extrema
    xg, wg = np.polynomial.legendre.leggauss(nquad)
    th = 0.5 * math.pi * (xg + 1.0)
    wth = 0.5 * math.pi * wg
    ts = a + (b - a) * 0.5 * (1.0 - np.cos(th))
    dt = abs(b - a) * 0.5 * np.sin(th) * wth
    d_old = 0.0
    d_new = 0.0
    if abs(b - a) > 0.0:
        for t, w in zip(ts, dt):
            ders = np.array([abs(funcs[j](pos(j, t))[1]) for j in range(k)])
            if np.any(ders <= 0.0):
                continue
            d_old += w * float(np.sum(ders))
            d_new += w * m * m / float(np.sum(1.0 / ders))

    # everything outside the pumpkin is unchanged
    norm2 = integral = energy = pot = 0.0
    pk_norm2 = pk_int = 0.0
    for e in g.edge_ids:
        xq, wq = edge_quadrature(g.length(e), p.wavenumber)
        val, der = p.evaluate(e, xq)
        n2, i1 = float(np.sum(wq * val * val)), float(np.sum(wq * val))
        norm2 += n2
        integral += i1
        if e in edges:
            pk_norm2 += n2
            pk_int += i1
        else:
            energy += float(np.sum(wq * der * der))
    for v in g.vertices:
        if v.condition.is_delta and g.ends_at(v.id):
            pot += v.condition.gamma * p.end_value(g.ends_at(v.id)[0]) ** 2
    old_rq = (energy + d_old + pot) / norm2
    new_rq = (energy + d_new + pot) / norm2

    # samples of the rearranged function on the new edges
    th_s = np.linspace(0.0, math.pi, samples_per_edge)
    t_s = a + (b - a) * 0.5 * (1.0 - np.cos(th_s))
    y_s = np.array([sum(pos(j, t) for j in range(k)) / m for t in t_s])
    y_s[0], y_s[-1] = 0.0, new_len
    y_u, idx = np.unique(y_s, return_index=True)
    if abs(b - a) > 0.0 and y_u.size > 1:
        inv = PchipInterpolator(y_u, t_s[idx])
        grid = np.linspace(0.0, new_len, samples_per_edge)
        star = inv(grid)
    else:
        grid = np.linspace(0.0, new_len, samples_per_edge)
        star = np.full_like(grid, a)
    samples: dict[str, tuple[np.ndarray, np.ndarray]] = {}
    for ne in new_edges:
        if new_g.edge(ne).endpoints[0] == v1:
            samples[ne] = (grid, star)
        else:
            samples[ne] = (grid, star[::-1].copy())
    new_norm2 = norm2 - pk_norm2 + m * float(simpson(star * star, x=grid))
    new_int = integral - pk_int + m * float(simpson(star, x=grid))
    return SymmetrisedFunction(
        graph=new_g,
        new_edges=new_edges,
        samples=samples,
        rayleigh=new_rq,
        original_rayleigh=old_rq,
        l2_norm=math.sqrt(max(new_norm2, 0.0)),
        original_l2_norm=math.sqrt(norm2),
        integral=new_int,
        original_integral=integral,
    )


__all__ = [
    "CriticalLevel",
    "PrueferAmplitude",
    "SymmetrisedFunction",
    "continuity_residual",
    "critical_levels",
    "gamma_derivative",
    "hadamard_derivative",
    "interior_extrema",
    "is_monotone_on",
    "kirchhoff_residual",
    "longitudinal_part",
    "max_residual",
    "oriented_start",
    "pruefer_amplitude",
    "rayleigh_quotient",
    "symmetrise_function",
]
