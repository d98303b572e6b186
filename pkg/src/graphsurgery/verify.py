"""Numerical checks of the eigenvalue inequalities under surgery, with
seeded random instances, hypothesis gating and reproducible reports."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Callable, Sequence

import numpy as np
from scipy.linalg import subspace_angles

from . import errors
from .bounds import lower_bounds
from .diagnostics import _identically_zero, interior_extrema
from .graph import (
    DIRICHLET,
    NATURAL,
    Edge,
    MetricGraph,
    Vertex,
    VertexCondition,
    condition_from_strength,
    raise_if_invalid,
)
from .io import graph_to_dict
from .spectrum import EigenPair, SolverConfig, Spectrum, mu_index, solve_spectrum
from .surgery import (
    TransplantTarget,
    add_edge,
    attach_pendant,
    glue_vertices,
    insert_graph,
    lengthen_edge,
    shrink_edge,
    symmetrise_parallel,
    transplant,
    unfold_parallel,
    unfold_pendant,
)
from .topology import (
    bridges,
    loop_graph,
    path_graph,
    pumpkin_chain,
    pumpkin_dumbbell,
    pumpkin_graph,
    pumpkin_on_stick,
    star_graph,
    tadpole_graph,
)

# strictness claims closer than this are reported as NearEquality
NEAR_EQUALITY = 1e-6
# principal angles below this count as a shared direction
ANGLE_TOL = 1e-4
MAX_ATTEMPTS = 1000


class Verdict(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    HYPOTHESIS_NOT_MET = "HypothesisNotMet"
    NEAR_EQUALITY = "NearEquality"


@dataclass
class CheckOutcome:
    """``lhs <= rhs`` claimed; ``slack = rhs - lhs``."""

    theorem: str
    instance: str
    lhs: float
    rhs: float
    slack: float
    verdict: Verdict
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["verdict"] = self.verdict.value
        return d


def _verdict(slack: float, tol: float, strict: bool = False) -> Verdict:
    if slack < -tol:
        return Verdict.FAIL
    if strict and slack < NEAR_EQUALITY:
        return Verdict.NEAR_EQUALITY
    return Verdict.PASS


def _outcome(theorem, instance, lhs, rhs, tol, strict=False, **details) -> CheckOutcome:
    slack = rhs - lhs
    details.setdefault("tolerance", tol)
    details.setdefault("strict_expected", strict)
    return CheckOutcome(theorem, instance, float(lhs), float(rhs), float(slack), _verdict(slack, tol, strict), details)


def _not_met(theorem, instance, reason: str, **details) -> CheckOutcome:
    details["reason"] = reason
    return CheckOutcome(theorem, instance, math.nan, math.nan, math.nan, Verdict.HYPOTHESIS_NOT_MET, details)


def _worst(outcomes: list[CheckOutcome]) -> CheckOutcome:
    order = {Verdict.FAIL: 0, Verdict.NEAR_EQUALITY: 1, Verdict.PASS: 2, Verdict.HYPOTHESIS_NOT_MET: 3}
    return min(outcomes, key=lambda o: (order[o.verdict], o.slack if not math.isnan(o.slack) else math.inf))


def _tol(cfg: SolverConfig, *specs: Spectrum) -> float:
    # accuracy is a per-cluster error estimate; tiny once refined
    return 2 * cfg.eig_abs_tol + sum(max(s.accuracy, default=0.0) for s in specs)


def _spectrum(g: MetricGraph, n: int, cfg: SolverConfig) -> Spectrum:
    return solve_spectrum(g, cfg.with_(num_eigenvalues=n))


# random graphs


@dataclass(frozen=True)
class RandomGraphParams:
    seed: int
    num_vertices: tuple[int, int] = (2, 5)
    num_edges: tuple[int, int] = (1, 8)
    length_range: tuple[float, float] = (0.2, 1.5)
    p_natural: float = 1.0
    p_dirichlet: float = 0.0
    p_delta: float = 0.0
    gamma_range: tuple[float, float] = (-2.0, 2.0)
    require_connected: bool = True
    require_doubly_connected: bool = False
    allow_loops: bool = True
    total_length: float | None = None

    def __post_init__(self) -> None:
        (v0, v1), (e0, e1), (a, b) = self.num_vertices, self.num_edges, self.length_range
        if not (1 <= v0 <= v1 and 1 <= e0 <= e1):
            raise errors.BadSpec("vertex and edge ranges must satisfy 1 <= lo <= hi")
        if not (0 < a <= b and math.isfinite(b)):
            raise errors.BadSpec("length range must satisfy 0 < a <= b")
        probs = (self.p_natural, self.p_dirichlet, self.p_delta)
        if min(probs) < 0 or abs(sum(probs) - 1.0) > 1e-12:
            raise errors.BadSpec("condition probabilities must be nonnegative and sum to 1")
        if self.gamma_range[0] > self.gamma_range[1]:
            raise errors.BadSpec("gamma range must satisfy lo <= hi")
        if self.total_length is not None and not self.total_length > 0:
            raise errors.BadSpec("total_length must be positive")


def _try_graph(rng: np.random.Generator, p: RandomGraphParams) -> MetricGraph | None:
    nv = int(rng.integers(p.num_vertices[0], p.num_vertices[1] + 1))
    lo_e = max(p.num_edges[0], nv - 1) if p.require_connected else p.num_edges[0]
    if lo_e > p.num_edges[1]:
        return None
    ne = int(rng.integers(lo_e, p.num_edges[1] + 1))
    pairs: list[tuple[int, int]] = []
    if p.require_connected:
        for i in range(1, nv):
            pairs.append((int(rng.integers(0, i)), i))
    while len(pairs) < ne:
        a, b = (int(x) for x in rng.integers(0, nv, size=2))
        if a == b and not p.allow_loops:
            continue
        pairs.append((a, b))
    lengths = rng.uniform(p.length_range[0], p.length_range[1], size=ne)
    verts = []
    for i in range(nv):
        kind = rng.choice(3, p=[p.p_natural, p.p_dirichlet, p.p_delta])
        if kind == 0:
            cond: VertexCondition = NATURAL
        elif kind == 1:
            cond = DIRICHLET
        else:
            cond = condition_from_strength(float(rng.uniform(*p.gamma_range)))
        verts.append(Vertex(f"v{i}", cond))
    edges = [Edge(f"e{j + 1}", (f"v{a}", f"v{b}"), float(x)) for j, ((a, b), x) in enumerate(zip(pairs, lengths))]
    g = MetricGraph(tuple(verts), tuple(edges))
    try:
        raise_if_invalid(g)
    except errors.ValidationError:
        return None
    if p.require_connected and not g.is_connected:
        return None
    if p.require_doubly_connected and bridges(g):
        return None
    if p.total_length is not None:
        g = g.scaled(p.total_length / g.total_length)
    return g


def random_graph(params: RandomGraphParams) -> MetricGraph:
    """Deterministic random graph for ``params.seed``; retries until constraints hold."""
    rng = np.random.default_rng(params.seed)
    for _ in range(MAX_ATTEMPTS):
        g = _try_graph(rng, params)
        if g is not None:
            return g
    raise errors.GenerationExhausted(f"no graph met the constraints in {MAX_ATTEMPTS} attempts")


def _rng(base_seed: int, index: int, tag: int) -> np.random.Generator:
    return np.random.default_rng([int(base_seed) & 0xFFFFFFFF, index, tag])


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(0, 2**63 - 1))


def _small_natural_graph(rng: np.random.Generator, total: float | None = None) -> MetricGraph:
    """Path, star, loop, tadpole or pumpkin with natural conditions."""
    kind = int(rng.integers(0, 5))
    if kind == 0:
        h = path_graph(float(rng.uniform(0.2, 1.2)))
    elif kind == 1:
        h = star_graph([float(x) for x in rng.uniform(0.2, 1.0, size=int(rng.integers(2, 4)))])
    elif kind == 2:
        h = loop_graph(float(rng.uniform(0.3, 1.5)))
    elif kind == 3:
        L = float(rng.uniform(0.5, 1.5))
        h = tadpole_graph(L, float(rng.uniform(0.2, 0.8)) * L)
    else:
        h = pumpkin_graph([float(x) for x in rng.uniform(0.3, 1.0, size=int(rng.integers(2, 4)))])
    if total is not None:
        h = h.scaled(total / h.total_length)
    return h


# eigenspace helpers


def _cluster_pairs(spec: Spectrum, k: int, cfg: SolverConfig) -> list[EigenPair]:
    lam = spec.lam(k)
    return [p for p in spec.pairs if abs(p.lam - lam) <= cfg.cluster_rel_tol * max(1.0, abs(lam))]


def _nonvanishing_at(pairs: Sequence[EigenPair], g: MetricGraph, v: str) -> bool:
    ends = g.ends_at(v)
    return any(abs(p.end_value(ends[0])) > 1e-8 * p.sup_norm() for p in pairs)


def _complete_clusters(spec: Spectrum, cfg: SolverConfig) -> list[tuple[float, int]]:
    """Clusters known to be complete (the last one may be truncated)."""
    out = list(spec.eigenvalues)
    return out[:-1] if len(out) > 1 else []


def _multiplicity_outcomes(s1: Spectrum, s2: Spectrum, cfg: SolverConfig, instance: str) -> list[CheckOutcome]:
    c1, c2 = _complete_clusters(s1, cfg), _complete_clusters(s2, cfg)
    if not c1 or not c2:
        return []
    top = min(c1[-1][0], c2[-1][0])
    out = []
    lams = sorted({lam for lam, _ in c1 + c2 if lam <= top})
    merged: list[float] = []
    for lam in lams:
        if not merged or abs(lam - merged[-1]) > cfg.cluster_rel_tol * max(1.0, abs(lam)):
            merged.append(lam)

    def mult(clusters, lam):
        return sum(m for x, m in clusters if abs(x - lam) <= cfg.cluster_rel_tol * max(1.0, abs(lam)))

    for lam in merged:
        m1, m2 = mult(c1, lam), mult(c2, lam)
        out.append(_outcome("interlacing-multiplicity", instance, abs(m1 - m2), 1, 0.0,
                            value=lam, m=m1, m_new=m2))
    return out


def _edge_samples(pairs: Sequence[EigenPair], edge_ids: Sequence[str], n: int = 23) -> np.ndarray:
    cols = []
    for p in pairs:
        col = []
        for e in edge_ids:
            xs = np.linspace(0.0, p.lengths[e], n)
            col.append(p.value(e, xs))
        cols.append(np.concatenate(col))
    return np.array(cols).T


def eigenspace_intersection_dim(
    g: MetricGraph, h: MetricGraph, value: float, cfg: SolverConfig | None = None, n: int = 12
) -> tuple[int, int, int]:
    """``(m, m_new, dim)``: multiplicities of ``value`` on ``g`` and ``h`` and the
    dimension of the intersection of the eigenspaces (shared edge ids) by principal angles."""
    cfg = cfg or SolverConfig()
    if set(g.edge_ids) != set(h.edge_ids):
        raise errors.UnsupportedOp("eigenspace comparison needs identical edge sets")
    sg, sh = _spectrum(g, n, cfg), _spectrum(h, n, cfg)

    def space(spec):
        return [p for p in spec.pairs if abs(p.lam - value) <= cfg.cluster_rel_tol * max(1.0, abs(value))]

    pg, ph = space(sg), space(sh)
    if not pg or not ph:
        return len(pg), len(ph), 0
    ids = list(g.edge_ids)
    angles = subspace_angles(_edge_samples(pg, ids), _edge_samples(ph, ids))
    return len(pg), len(ph), int(np.sum(angles < ANGLE_TOL))


# interlacing


def _apply_interlacing_op(g: MetricGraph, op: dict) -> MetricGraph:
    kind = op.get("op")
    if kind == "glue":
        vs = op["vertices"]
        if len(set(vs)) != 2:
            raise errors.UnsupportedOp("the interlacing check glues exactly two vertices")
        return glue_vertices(g, vs).graph
    if kind == "gamma":
        v = op["vertex"]
        old = g.condition(v)
        new = op["gamma"]
        if old.is_dirichlet:
            raise errors.UnsupportedOp(f"{v!r} is already Dirichlet")
        if new in ("inf", "dirichlet", math.inf):
            return g.with_condition(v, DIRICHLET)
        new = float(new)
        if not new > old.strength:
            raise errors.UnsupportedOp(f"strength must increase: {old.strength} -> {new}")
        return g.with_condition(v, condition_from_strength(new))
    raise errors.UnsupportedOp(f"interlacing covers gluing and strength increase, not {kind!r}")


def check_interlacing(
    g: MetricGraph, op: dict, k_max: int = 10, cfg: SolverConfig | None = None,
    eigenspaces: bool = False,
) -> list[CheckOutcome]:
    """Both interlacing chains for ``k = 1..k_max`` and the multiplicity claim.

    ``op`` is ``{"op": "glue", "vertices": [v, w]}`` or
    ``{"op": "gamma", "vertex": v, "gamma": new}`` (``"inf"`` for Dirichlet).
    With ``eigenspaces`` the dimension of each shared eigenspace is compared
    with ``min(m, m_new)``.
    """
    cfg = cfg or SolverConfig()
    h = _apply_interlacing_op(g, op)
    s1 = _spectrum(g, k_max + 3, cfg)
    s2 = _spectrum(h, k_max + 3, cfg)
    tol = _tol(cfg, s1, s2)
    inst = f"{op}"
    out = []
    for k in range(1, k_max + 1):
        out.append(_outcome("interlacing-lower", inst, s1.lam(k), s2.lam(k), tol, k=k))
        out.append(_outcome("interlacing-upper", inst, s2.lam(k), s1.lam(k + 1), tol, k=k))
    out.extend(_multiplicity_outcomes(s1, s2, cfg, inst))
    if eigenspaces:
        for lam, _ in _complete_clusters(s1, cfg):
            m, mt, dim = eigenspace_intersection_dim(g, h, lam, cfg, k_max + 3)
            if mt:
                out.append(_outcome("interlacing-eigenspace", inst, abs(dim - min(m, mt)), 0, 0.0,
                                    value=lam, m=m, m_new=mt, dim=dim))
    return out


# volume increase


def check_volume_increase(
    g: MetricGraph, variant: str, params: dict, cfg: SolverConfig | None = None, k_max: int = 6
) -> CheckOutcome:
    """Eigenvalue decrease under pendant attachment, insertion, lengthening,
    adding a long edge or shrinking a redundant edge; returns the worst ``k``.

    ``params`` per variant:

    - ``pendant``: ``vertex``, ``graph`` (H), ``pendant_vertex``, ``r``
    - ``insert``: ``vertex``, ``graph`` (H, natural), optional ``assignment``
    - ``lengthen``: ``edge``, ``delta``
    - ``add_long_edge``: ``from``, ``to``, ``length``
    - ``shrink_redundant``: ``edge``
    """
    cfg = cfg or SolverConfig()
    theorem = f"volume-increase:{variant}"
    inst = f"{variant} {_describe(params)}"
    s = _spectrum(g, k_max + 1, cfg)
    outcomes = []
    if variant == "pendant":
        h = params["graph"]
        r = int(params.get("r", 1))
        v0 = params["vertex"]
        sh = _spectrum(h, r, cfg)
        new = attach_pendant(g, v0, h, params["pendant_vertex"]).graph
        sn = _spectrum(new, k_max + r, cfg)
        tol = _tol(cfg, s, sh, sn)
        lam_r = sh.lam(r)
        for k in range(1, k_max + 1):
            if not lam_r <= s.lam(k) + tol:
                continue
            strict = (
                _nonvanishing_at(_cluster_pairs(s, k, cfg), g, v0)
                and (k == 1 or s.lam(k) > s.lam(k - 1) + tol)
                and s.lam(k) > lam_r + tol
            )
            outcomes.append(_outcome(theorem, inst, sn.lam(k + r - 1), s.lam(k), tol, strict, k=k, r=r))
    elif variant == "insert":
        h = params["graph"]
        if not h.is_all_natural:
            return _not_met(theorem, inst, "inserted graph must carry natural conditions")
        v0 = params["vertex"]
        if g.condition(v0).is_dirichlet:
            return _not_met(theorem, inst, "insertion vertex is Dirichlet")
        new = insert_graph(g, v0, h, params.get("assignment")).graph
        sn = _spectrum(new, k_max, cfg)
        tol = _tol(cfg, s, sn)
        for k in range(1, k_max + 1):
            if s.lam(k) < -tol:
                continue
            strict = (
                s.lam(k) > max(0.0, s.lam(k - 1) if k > 1 else 0.0) + tol
                and _nonvanishing_at(_cluster_pairs(s, k, cfg), g, v0)
            )
            outcomes.append(_outcome(theorem, inst, sn.lam(k), s.lam(k), tol, strict, k=k))
    elif variant == "lengthen":
        e = params["edge"]
        new = lengthen_edge(g, e, float(params["delta"])).graph
        if not float(params["delta"]) > 0:
            return _not_met(theorem, inst, "edge must get longer")
        sn = _spectrum(new, k_max, cfg)
        tol = _tol(cfg, s, sn)
        for k in range(1, k_max + 1):
            if s.lam(k) < -tol:
                continue
            strict = s.lam(k) > max(0.0, s.lam(k - 1) if k > 1 else 0.0) + tol and any(
                not _identically_zero(p, e) for p in _cluster_pairs(s, k, cfg)
            )
            outcomes.append(_outcome(theorem, inst, sn.lam(k), s.lam(k), tol, strict, k=k))
    elif variant == "add_long_edge":
        ell = float(params["length"])
        new = add_edge(g, params["from"], params["to"], ell).graph
        sn = _spectrum(new, k_max, cfg)
        tol = _tol(cfg, s, sn)
        thresh = (math.pi / ell) ** 2
        ks = [k for k in range(1, k_max + 1) if thresh <= s.lam(k)]
        for k in range(ks[0], k_max + 1) if ks else []:
            outcomes.append(_outcome(theorem, inst, sn.lam(k), s.lam(k), tol, k=k, k0=ks[0]))
    elif variant == "shrink_redundant":
        e = params["edge"]
        if not (g.is_all_natural and g.is_connected):
            return _not_met(theorem, inst, "needs a connected all-natural graph")
        pairs = _cluster_pairs(s, 2, cfg)
        samples = _edge_samples(pairs, [e], 31)
        sv = np.linalg.svd(samples, compute_uv=False)
        # scale by the eigenfunctions, not by sv[0], which is itself ~0 when all vanish
        scale = max(p.sup_norm() for p in pairs)
        null_dim = len(pairs) - int(np.sum(sv > 1e-8 * scale))
        if null_dim < 1:
            return _not_met(theorem, inst, "no lambda_2 eigenfunction vanishes on the edge")
        new = shrink_edge(g, e).graph
        sn = _spectrum(new, 2, cfg)
        tol = _tol(cfg, s, sn)
        # equality claim: both directions within tolerance
        a = _outcome(theorem + ":le", inst, sn.lam(2), s.lam(2), tol)
        b = _outcome(theorem + ":ge", inst, s.lam(2), sn.lam(2), tol)
        return _worst([a, b])
    else:
        raise errors.UnsupportedOp(f"unknown volume-increase variant {variant!r}")
    if not outcomes:
        return _not_met(theorem, inst, "no k satisfies the eigenvalue hypothesis")
    worst = _worst(outcomes)
    worst.details["per_k"] = [(o.details["k"], o.slack, o.verdict.value) for o in outcomes]
    return worst


# volume transfer


def _mu_pairs(g: MetricGraph, cfg: SolverConfig) -> tuple[Spectrum, list[EigenPair]]:
    idx = mu_index(g)
    spec = _spectrum(g, idx + 2, cfg)
    return spec, _cluster_pairs(spec, idx, cfg)


def _mu_value(g: MetricGraph, cfg: SolverConfig) -> tuple[float, Spectrum]:
    if not g.is_connected:
        raise errors.Disconnected("spectral gap needs a connected graph")
    idx = mu_index(g)
    spec = _spectrum(g, idx, cfg)
    return spec.lam(idx), spec


def _constant_on(p: EigenPair, edges: Sequence[str]) -> bool:
    sup = max(p.sup_norm(), 1e-300)
    for e in edges:
        xs = np.linspace(0.0, p.lengths[e], 17)
        if np.max(np.abs(p.derivative(e, xs))) > 1e-8 * sup * max(p.wavenumber, 1.0):
            return False
    return True


def _oriented_monotone(p: EigenPair, g: MetricGraph, edges: Sequence[str], start: str) -> int:
    """``+1``/``-1`` if ``p`` increases/decreases from ``start`` along every edge, else ``0``."""
    direction = 0
    sup = max(p.sup_norm(), 1e-300)
    for e in edges:
        if _constant_on(p, [e]):
            continue
        if interior_extrema(p, e):
            # an extremum inside the edge breaks monotonicity unless it is flat
            return 0
        edge = g.edge(e)
        ell = edge.length
        d = p.value(e, ell) - p.value(e, 0.0)
        if abs(d) <= 1e-12 * sup:
            return 0
        s = 1 if d > 0 else -1
        if edge.endpoints[0] != start:
            s = -s
        if direction and s != direction:
            return 0
        direction = s
    return direction or 1


def check_volume_transfer(
    g: MetricGraph, variant: str, params: dict, cfg: SolverConfig | None = None
) -> CheckOutcome:
    """``mu`` decrease under unfolding, symmetrising or transplantation.

    ``params`` per variant:

    - ``unfold_parallel``: ``edges``
    - ``unfold_pendant``: ``edges``
    - ``symmetrise``: ``edges``, ``m``
    - ``transplant``: ``cut_vertices``, ``c_edges``, ``targets`` (list of
      ``(vertex, graph)``)
    """
    cfg = cfg or SolverConfig()
    theorem = f"volume-transfer:{variant}"
    inst = f"{variant} {_describe(params)}"
    if not g.is_connected:
        return _not_met(theorem, inst, "graph must be connected")
    spec, pairs = _mu_pairs(g, cfg)
    mu_g = spec.lam(mu_index(g))
    details: dict[str, Any] = {}
    if variant == "unfold_parallel":
        edges = list(params["edges"])
        new = unfold_parallel(g, edges).graph
        figure8 = (
            g.num_edges == 2 and g.num_vertices == 1 and g.is_all_natural and len(edges) == 2
        )
        strict = not figure8 and not all(_constant_on(p, edges) for p in pairs)
    elif variant == "unfold_pendant":
        edges = list(params["edges"])
        new = unfold_pendant(g, edges).graph
        strict = not all(_constant_on(p, edges) for p in pairs)
    elif variant == "symmetrise":
        edges = list(params["edges"])
        m = int(params["m"])
        a, b = g.edge(edges[0]).endpoints
        if a == b:
            return _not_met(theorem, inst, "symmetrisation needs edges between two distinct vertices")
        good = None
        for p in pairs:
            s = _oriented_monotone(p, g, edges, a)
            if s:
                good = p.scaled(s)
                break
        if good is None:
            return _not_met(theorem, inst, "no mu eigenfunction is monotone along every edge")
        new = symmetrise_parallel(g, edges, m).graph
        lens = [g.length(e) for e in edges]
        unchanged = m == len(edges) and max(lens) - min(lens) <= 1e-12 * max(lens)
        strict = not unchanged and not _constant_on(good, edges)
    elif variant == "transplant":
        cut = list(params["cut_vertices"])
        c_edges = list(params["c_edges"])
        targets = [t if isinstance(t, TransplantTarget) else TransplantTarget(*t) for t in params["targets"]]
        tv = [t.vertex for t in targets]
        if any(not g.condition(v).is_natural for v in tv):
            return _not_met(theorem, inst, "target vertices must be natural")
        if mu_g < 0:
            # flattening onto H raises the L2 norm, which lowers only a nonnegative quotient
            return _not_met(theorem, inst, "transplantation needs mu >= 0", mu=mu_g)
        found = None
        for p in pairs:
            for sgn in (1.0, -1.0):
                q = p.scaled(sgn)
                lo, hi = _range_on(q, c_edges)
                vals = [q.end_value(g.ends_at(v)[0]) for v in tv]
                eps = 1e-10 * max(q.sup_norm(), 1e-300)
                if lo >= -eps and hi <= min(vals) + eps:
                    found = (q, lo, hi, vals)
                    break
            if found:
                break
        if found is None:
            return _not_met(theorem, inst, "no mu eigenfunction satisfies the level hypothesis")
        q, lo, hi, vals = found
        new = transplant(g, cut, c_edges, targets).graph
        strict = lo < max(vals) - 1e-10 * q.sup_norm()
        details.update(min_on_c=lo, max_on_c=hi, target_values=vals)
    else:
        raise errors.UnsupportedOp(f"unknown volume-transfer variant {variant!r}")
    if not new.is_connected:
        # mu of a disconnected natural graph is 0; record the trivially true case
        return _outcome(theorem, inst, 0.0, mu_g, _tol(cfg, spec), False, disconnected_result=True, **details)
    mu_new, sn = _mu_value(new, cfg)
    return _outcome(theorem, inst, mu_new, mu_g, _tol(cfg, spec, sn), strict, **details)


def _range_on(p: EigenPair, edges: Sequence[str]) -> tuple[float, float]:
    lo, hi = math.inf, -math.inf
    from .spectrum import _extremum_grid

    for e in edges:
        v = p.value(e, _extremum_grid(p, e))
        lo, hi = min(lo, float(np.min(v))), max(hi, float(np.max(v)))
    return lo, hi


# delta shift and pumpkin sweeps


def delta_interval(ell: float, gamma: float, x: float) -> MetricGraph:
    """Interval of length ``ell`` with a delta of strength ``gamma`` at distance ``x`` from one end."""
    cond = condition_from_strength(gamma)
    if x <= 0:
        return MetricGraph((Vertex("a", cond), Vertex("b")), (Edge("e1", ("a", "b"), float(ell)),))
    return MetricGraph(
        (Vertex("a"), Vertex("x", cond), Vertex("b")),
        (Edge("e1", ("a", "x"), float(x)), Edge("e2", ("x", "b"), float(ell - x))),
    )


def _monotone_outcome(theorem, inst, params, values, direction, tol, **details) -> CheckOutcome:
    """Strict monotonicity of ``values`` along ``params`` (+1 increasing, -1 decreasing)."""
    diffs = [direction * (b - a) for a, b in zip(values, values[1:])]
    i = int(np.argmin(diffs))
    # claim values[i] < values[i+1] (or >); slack is the smallest step
    lhs, rhs = (values[i], values[i + 1]) if direction > 0 else (values[i + 1], values[i])
    return _outcome(theorem, inst, lhs, rhs, tol, True,
                    grid=[float(x) for x in params], values=[float(v) for v in values], **details)


def check_delta_shift(
    ell: float, gamma: float, xs: Sequence[float], cfg: SolverConfig | None = None
) -> CheckOutcome:
    """``lambda_2`` of the delta interval is strictly increasing in ``x`` on ``[0, ell/2]``."""
    cfg = cfg or SolverConfig()
    if not gamma < 0:
        raise errors.HypothesisNotMet(f"delta shift needs a negative strength, got {gamma}")
    xs = sorted(float(x) for x in xs)
    if xs[0] < 0 or xs[-1] > ell / 2 + 1e-15:
        raise errors.BadSpec("positions must lie in [0, ell/2]")
    vals = [_spectrum(delta_interval(ell, gamma, x), 2, cfg).lam(2) for x in xs]
    return _monotone_outcome("delta-shift", f"ell={ell}, gamma={gamma}", xs, vals, +1, 2 * cfg.eig_abs_tol)


def _gap(g: MetricGraph, cfg: SolverConfig) -> float:
    return _spectrum(g, mu_index(g), cfg).lam(mu_index(g))


def monotonicity_sweeps(cfg: SolverConfig | None = None, L: float = 1.0, n: int = 11) -> list[CheckOutcome]:
    """Sweeps over pumpkin-on-a-stick, pumpkin-dumbbell and Dirichlet pumpkin chains."""
    cfg = cfg or SolverConfig()
    tol = 2 * cfg.eig_abs_tol
    out: list[CheckOutcome] = []
    gap = lambda g: _gap(g, cfg)  # noqa: E731
    pi2 = math.pi**2 / L**2

    # pumpkin on a stick: longer sticks lower the gap
    for m in (2, 3):
        grid = np.linspace(0.0, 0.7 * L, n)
        vals = [gap(pumpkin_on_stick(x, m, 0.2 * L, L)) for x in grid]
        out.append(_monotone_outcome("stick-length", f"P(l1|{m}|0.2), l1 sweep", grid, vals, -1, tol))
        vals = [gap(pumpkin_on_stick(0.2 * L, m, x, L)) for x in grid]
        out.append(_monotone_outcome("stick-length", f"P(0.2|{m}|l2), l2 sweep", grid, vals, -1, tol))
    ms = list(range(2, 2 + n))
    vals = [gap(pumpkin_on_stick(0.2 * L, m, 0.3 * L, L)) for m in ms]
    # more parallel edges raise the gap (symmetrising to fewer edges lowers it)
    out.append(_monotone_outcome("stick-thickness", "P(0.2|m|0.3), m sweep", ms, vals, +1, tol))
    for m in (2, 3):
        ell = 0.6 * L
        grid = np.linspace(0.0, ell / 2, n)
        vals = [gap(pumpkin_on_stick(x, m, ell - x, L)) for x in grid]
        out.append(_monotone_outcome("stick-distance", f"P(l1|{m}|0.6-l1)", grid, vals, +1, tol))
    # a priori bounds over a parameter grid (pumpkins and paths excluded)
    low = high = None
    for m in (2, 3, 4):
        for l1 in np.linspace(0.05 * L, 0.5 * L, 5):
            for l2 in np.linspace(0.05 * L, 0.45 * L, 5):
                for name, g in (("P", pumpkin_on_stick(l1, m, l2, L)), ("PD", pumpkin_dumbbell(l1, l2, m, L))):
                    lam = gap(g)
                    inst = f"{name}({l1:.3f},{l2:.3f},m={m})"
                    o = _outcome("a-priori-lower", inst, pi2, lam, tol, True)
                    low = o if low is None or o.slack < low.slack else low
                    o = _outcome("a-priori-upper", inst, lam, pi2 * m * m, tol, True)
                    high = o if high is None or o.slack < high.slack else high
    out += [low, high]
    # tadpole: from pi^2/L^2 to 4 pi^2/L^2
    grid = np.linspace(0.0, L, n)
    vals = [gap(tadpole_graph(L, x)) for x in grid]
    out.append(_monotone_outcome("tadpole-loop", "T(V), V sweep", grid, vals, +1, tol))
    end_err = max(abs(vals[0] - pi2), abs(vals[-1] - 4 * pi2))
    out.append(_outcome("tadpole-endpoints", "T(0)=pi^2/L^2, T(L)=4 pi^2/L^2", end_err, 1e-6, 0.0,
                        t0=vals[0], tL=vals[-1]))

    # pumpkin dumbbell
    for m in (2, 3):
        grid = np.linspace(0.0, 0.8 * L, n)
        vals = [gap(pumpkin_dumbbell(x, 0.2 * L, m, L)) for x in grid]
        out.append(_monotone_outcome("dumbbell-size", f"PD(l1,0.2,{m}), l1 sweep", grid, vals, +1, tol))
        ell = 0.6 * L
        grid = np.linspace(0.0, ell / 2, n)
        vals = [gap(pumpkin_dumbbell(x, ell - x, m, L)) for x in grid]
        # balancing the two pumpkins lowers the gap (unique minimum at l1 = l2)
        out.append(_monotone_outcome("dumbbell-balance", f"PD(l1,0.6-l1,{m})", grid, vals, -1, tol))
    ms = list(range(1, 1 + n))
    vals = [gap(pumpkin_dumbbell(0.3 * L, 0.3 * L, m, L)) for m in ms]
    out.append(_monotone_outcome("dumbbell-thickness", "PD(0.3,0.3,m), m sweep", ms, vals, +1, tol))

    # Dirichlet chains: moving the fatter pumpkin away from the Dirichlet end lowers lambda_1
    worst = None
    for a in np.linspace(0.1, 0.9, n):
        for fat, thin in ((4, 2), (3, 1), (2, 1)):
            before = pumpkin_chain([fat, thin], [a * L, (1 - a) * L], left=DIRICHLET)
            after = pumpkin_chain([thin, fat], [(1 - a) * L, a * L], left=DIRICHLET)
            o = _outcome("shifting-pumpkins", f"[{fat},{thin}] a={a:.3f}", gap(after), gap(before), tol, True)
            worst = o if worst is None or o.slack < worst.slack else worst
    for b in np.linspace(0.1, 0.6, n):
        rest = 0.8 * L - b * L
        before = pumpkin_chain([1, 3, 2], [0.2 * L, b * L, rest], left=DIRICHLET)
        after = pumpkin_chain([1, 2, 3], [0.2 * L, rest, b * L], left=DIRICHLET)
        o = _outcome("shifting-pumpkins", f"[1,3,2] b={b:.3f}", gap(after), gap(before), tol, True)
        worst = o if o.slack < worst.slack else worst
    out.append(worst)
    return out


# counterexamples (claimed inequalities fail without their hypotheses)


def counterexamples(cfg: SolverConfig | None = None, eps: float = 0.05) -> list[CheckOutcome]:
    """Known cases where the eigenvalue goes up; each outcome asserts the increase."""
    cfg = cfg or SolverConfig()
    tol = 2 * cfg.eig_abs_tol
    out = []
    g = pumpkin_graph([1.0, 1.0, 1.0])
    h = unfold_parallel(g, ["e1", "e2"]).graph
    a, b = _spectrum(g, 4, cfg).lam(4), _spectrum(h, 4, cfg).lam(4)
    out.append(_outcome("unfold-parallel-higher", "3-pumpkin, lambda_4", a, b, tol, True))
    g = star_graph([1.0, 1.0, 1.0])
    h = unfold_pendant(g, ["e1", "e2"]).graph
    a, b = _spectrum(g, 3, cfg).lam(3), _spectrum(h, 3, cfg).lam(3)
    out.append(_outcome("unfold-pendant-higher", "equilateral 3-star, lambda_3", a, b, tol, True))
    g = pumpkin_graph([2 - 2 * eps, eps, eps, 1.0])
    hyp = check_volume_transfer(g, "symmetrise", {"edges": ["e1", "e2", "e3"], "m": 2}, cfg)
    h = symmetrise_parallel(g, ["e1", "e2", "e3"], 2).graph
    a, b = _gap(g, cfg), _gap(h, cfg)
    out.append(_outcome("symmetrise-non-monotone", f"loopy pumpkin eps={eps}", a, b, tol, True,
                        hypothesis=hyp.verdict.value))
    return out


# seeded suites

_TAGS = {"interlacing": 1, "volume-increase": 2, "volume-transfer": 3, "pumpkins": 4, "bounds": 5}
SUITES = tuple(_TAGS) + ("all",)


@dataclass
class Instance:
    seed: int
    graph: MetricGraph
    kind: str
    params: dict


def _describe(params: dict) -> str:
    parts = []
    for k, v in params.items():
        if isinstance(v, MetricGraph):
            v = f"<{v.num_vertices}V {v.num_edges}E>"
        elif isinstance(v, (list, tuple)) and v and isinstance(v[0], TransplantTarget):
            v = [t.vertex for t in v]
        parts.append(f"{k}={v}")
    return ", ".join(parts)


def _replay(inst: Instance) -> dict:
    def enc(x):
        if isinstance(x, MetricGraph):
            return graph_to_dict(x)
        if isinstance(x, TransplantTarget):
            return {"vertex": x.vertex, "graph": graph_to_dict(x.graph)}
        if isinstance(x, (list, tuple)):
            return [enc(y) for y in x]
        if isinstance(x, dict):
            return {str(k): enc(v) for k, v in x.items()}
        return x

    return {"seed": inst.seed, "kind": inst.kind, "graph": graph_to_dict(inst.graph), "params": enc(inst.params)}


MIXED = dict(p_natural=0.6, p_dirichlet=0.15, p_delta=0.25)


def interlacing_instance(base_seed: int, i: int) -> Instance:
    rng = _rng(base_seed, i, _TAGS["interlacing"])
    seed = _seed(rng)
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 5), num_edges=(2, 6), **MIXED))
    free = [v.id for v in g.vertices if not v.condition.is_dirichlet]
    if rng.random() < 0.5 or not free:
        vs = [str(x) for x in rng.choice(g.vertex_ids, size=2, replace=False)]
        return Instance(seed, g, "glue", {"op": "glue", "vertices": vs})
    v = str(rng.choice(free))
    if rng.random() < 0.2:
        return Instance(seed, g, "gamma", {"op": "gamma", "vertex": v, "gamma": "inf"})
    new = g.condition(v).strength + float(rng.uniform(0.1, 3.0))
    return Instance(seed, g, "gamma", {"op": "gamma", "vertex": v, "gamma": new})


def volume_increase_instance(base_seed: int, i: int) -> Instance:
    rng = _rng(base_seed, i, _TAGS["volume-increase"])
    seed = _seed(rng)
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 4), num_edges=(2, 5), **MIXED))
    kind = ("pendant", "insert", "lengthen")[i % 3]
    if kind == "pendant":
        h = _small_natural_graph(rng)
        w = str(rng.choice(h.vertex_ids))
        others = [x for x in h.vertex_ids if x != w]
        if others and rng.random() < 0.3:
            h = h.with_condition(str(rng.choice(others)), DIRICHLET)
        return Instance(seed, g, kind, {
            "vertex": str(rng.choice(g.vertex_ids)),
            "graph": h,
            "pendant_vertex": w,
            "r": int(rng.integers(1, 3)),
        })
    if kind == "insert":
        free = [v.id for v in g.vertices if not v.condition.is_dirichlet]
        if not free:
            g = g.with_condition(g.vertex_ids[0], NATURAL)
            free = [g.vertex_ids[0]]
        v0 = str(rng.choice(free))
        h = _small_natural_graph(rng)
        assignment = [((e, j), str(rng.choice(h.vertex_ids))) for e, j in g.ends_at(v0)]
        return Instance(seed, g, kind, {"vertex": v0, "graph": h, "assignment": assignment})
    return Instance(seed, g, kind, {"edge": str(rng.choice(g.edge_ids)), "delta": float(rng.uniform(0.05, 0.6))})


def _add_parallel(g: MetricGraph, rng, count: int, rel: tuple[float, float]) -> tuple[MetricGraph, list[str]]:
    e = g.edges[int(rng.integers(0, g.num_edges))]
    ids = [e.id]
    for _ in range(count):
        new = add_edge(g, e.endpoints[0], e.endpoints[1], e.length * float(rng.uniform(*rel)))
        g = new.graph
        ids.append(g.edges[-1].id)
    return g, ids


def _symmetrise_hypothesis(g: MetricGraph, edges: Sequence[str], cfg: SolverConfig) -> bool:
    _, pairs = _mu_pairs(g, cfg)
    start = g.edge(edges[0]).endpoints[0]
    return any(_oriented_monotone(p, g, edges, start) for p in pairs)


# fresh draws a generator may take to find an instance meeting the hypothesis
GENERATOR_RETRIES = 6


def volume_transfer_instance(base_seed: int, i: int) -> Instance:
    rng = _rng(base_seed, i, _TAGS["volume-transfer"])
    seed = _seed(rng)
    kind = ("unfold_parallel", "unfold_pendant", "symmetrise", "transplant")[i % 4]
    cfg = SolverConfig()
    inst = None
    for attempt in range(GENERATOR_RETRIES):
        mix = MIXED if rng.random() < 0.5 else {}
        base = random_graph(RandomGraphParams(seed + attempt, num_vertices=(2, 4), num_edges=(2, 5),
                                              allow_loops=kind != "symmetrise", **mix))
        if kind == "unfold_parallel":
            g, ids = _add_parallel(base, rng, int(rng.integers(1, 3)), (0.5, 1.5))
            k = int(rng.integers(2, len(ids) + 1))
            return Instance(seed, g, kind, {"edges": ids[:k]})
        if kind == "unfold_pendant":
            g = base
            v = str(rng.choice(g.vertex_ids))
            ids = []
            for _ in range(int(rng.integers(2, 4))):
                r = attach_pendant(g, v, path_graph(float(rng.uniform(0.2, 1.0))), "v0")
                g = r.graph
                ids.append(r.inserted_edge_map.get("e1", g.edges[-1].id))
            return Instance(seed, g, kind, {"edges": ids})
        if kind == "symmetrise":
            g, ids = _add_parallel(base, rng, int(rng.integers(1, 3)), (0.7, 1.3))
            inst = Instance(seed, g, kind, {"edges": ids, "m": int(rng.integers(1, len(ids) + 1))})
            if _symmetrise_hypothesis(g, ids, cfg):
                return inst
        else:
            inst = _transplant_instance(seed, base, rng)
            if inst.params.get("meets_hypothesis"):
                inst.params.pop("meets_hypothesis")
                return inst
    inst.params.pop("meets_hypothesis", None)
    return inst


def _transplant_instance(seed: int, g: MetricGraph, rng) -> Instance:
    """Pick ``C`` (one detachable edge) and a target vertex meeting the level hypothesis if possible."""
    cfg = SolverConfig()
    if not g.is_connected:
        return Instance(seed, g, "transplant", {})
    spec, pairs = _mu_pairs(g, cfg)
    mu_ok = spec.lam(mu_index(g)) >= 0
    br = bridges(g)
    cands = []
    for e in g.edges:
        a, b = e.endpoints
        pendant_tip = [x for x in (a, b) if g.degree(x) == 1 and a != b]
        if e.id in br and not pendant_tip:
            continue
        if pendant_tip:
            cut = [x for x in (a, b) if x not in pendant_tip]
        else:
            cut = sorted({a, b})
        cands.append((e.id, cut))
    order = rng.permutation(len(cands)) if cands else []
    fallback = None
    for j in order:
        eid, cut = cands[int(j)]
        rest = [v for v in g.vertex_ids if any(x.edge != eid for x in g.ends_at(v))]
        for p in pairs:
            for sgn in (1.0, -1.0):
                q = p.scaled(sgn)
                lo, hi = _range_on(q, [eid])
                eps = 1e-10 * q.sup_norm()
                ok = [v for v in rest if g.condition(v).is_natural
                      and q.end_value(g.ends_at(v)[0]) >= hi - eps]
                if mu_ok and lo >= -eps and ok:
                    v = str(ok[int(rng.integers(0, len(ok)))])
                    h = _small_natural_graph(rng, g.length(eid))
                    return Instance(seed, g, "transplant", {
                        "cut_vertices": cut, "c_edges": [eid], "targets": [TransplantTarget(v, h)],
                        "meets_hypothesis": True})
        if fallback is None:
            v = str(rng.choice(rest)) if rest else g.vertex_ids[0]
            fallback = {"cut_vertices": cut, "c_edges": [eid],
                        "targets": [TransplantTarget(v, path_graph(g.length(eid)))]}
    return Instance(seed, g, "transplant", fallback or {})


def bounds_instance(base_seed: int, i: int) -> Instance:
    rng = _rng(base_seed, i, _TAGS["bounds"])
    seed = _seed(rng)
    g = random_graph(RandomGraphParams(seed, num_vertices=(2, 6), num_edges=(1, 8), total_length=1.0))
    return Instance(seed, g, "bounds", {})


def _run_instance(suite: str, inst: Instance, cfg: SolverConfig) -> list[CheckOutcome]:
    if suite == "interlacing":
        return check_interlacing(inst.graph, inst.params, 10, cfg)
    if suite == "volume-increase":
        return [check_volume_increase(inst.graph, inst.kind, inst.params, cfg)]
    if suite == "volume-transfer":
        if not inst.params:
            return [_not_met("volume-transfer:transplant", "no detachable edge", "no candidate subgraph")]
        try:
            return [check_volume_transfer(inst.graph, inst.kind, inst.params, cfg)]
        except errors.SurgeryError as exc:
            return [_not_met(f"volume-transfer:{inst.kind}", _describe(inst.params), str(exc))]
    if suite == "bounds":
        rep = lower_bounds(inst.graph, cfg)
        tol = 2 * cfg.eig_abs_tol
        out = []
        for name, val in (("nicaise", rep.nicaise), ("dumbbell", rep.dumbbell_bound),
                          ("tadpole", rep.tadpole_bound), ("circumference", rep.circumference_bound)):
            if val is None:
                continue
            out.append(_outcome(f"bound:{name}", f"V={rep.V_total:.6g}", val, rep.lambda2, tol))
        return out
    raise errors.UnsupportedOp(f"unknown suite {suite!r}")


_GENERATORS: dict[str, Callable[[int, int], Instance]] = {
    "interlacing": interlacing_instance,
    "volume-increase": volume_increase_instance,
    "volume-transfer": volume_transfer_instance,
    "bounds": bounds_instance,
}


@dataclass
class SuiteReport:
    suite: str
    seeds: int
    base_seed: int
    outcomes: list[CheckOutcome]
    instances: int
    hypothesis_met: int
    failure: dict | None = None

    @property
    def counts(self) -> dict[str, int]:
        c = {v.value: 0 for v in Verdict}
        for o in self.outcomes:
            c[o.verdict.value] += 1
        return c

    @property
    def hypothesis_rate(self) -> float:
        return self.hypothesis_met / self.instances if self.instances else 1.0

    @property
    def meaningful(self) -> bool:
        return self.hypothesis_rate >= 0.8

    @property
    def min_slack(self) -> float:
        s = [o.slack for o in self.outcomes if not math.isnan(o.slack)]
        return min(s) if s else math.nan

    @property
    def ok(self) -> bool:
        return self.failure is None and self.counts[Verdict.FAIL.value] == 0

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "seeds": self.seeds,
            "base_seed": self.base_seed,
            "instances": self.instances,
            "hypothesis_met": self.hypothesis_met,
            "hypothesis_rate": self.hypothesis_rate,
            "meaningful": self.meaningful,
            "counts": self.counts,
            "min_slack": self.min_slack,
            "ok": self.ok,
            "failure": self.failure,
            "outcomes": [o.to_dict() for o in self.outcomes],
        }


def run_suite(
    suite: str, seeds: int, base_seed: int, cfg: SolverConfig | None = None
) -> SuiteReport:
    """Run ``seeds`` instances of ``suite``; the first Fail stops the run and is
    recorded with everything needed to replay it."""
    cfg = cfg or SolverConfig()
    if suite == "pumpkins":
        outs = monotonicity_sweeps(cfg) + counterexamples(cfg)
        outs.append(check_delta_shift(1.0, -1.0, np.linspace(0.0, 0.5, 11), cfg))
        rep = SuiteReport(suite, seeds, base_seed, outs, len(outs), len(outs))
        fails = [o for o in outs if o.verdict is Verdict.FAIL]
        if fails:
            rep.failure = {"outcome": fails[0].to_dict()}
        return rep
    if suite not in _GENERATORS:
        raise errors.UnsupportedOp(f"unknown suite {suite!r}")
    gen = _GENERATORS[suite]
    outs: list[CheckOutcome] = []
    met = 0
    done = 0
    for i in range(seeds):
        inst = gen(base_seed, i)
        res = _run_instance(suite, inst, cfg)
        done += 1
        if any(o.verdict is not Verdict.HYPOTHESIS_NOT_MET for o in res):
            met += 1
        for o in res:
            o.details["seed"] = inst.seed
            o.details["index"] = i
        outs.extend(res)
        bad = [o for o in res if o.verdict is Verdict.FAIL]
        if bad:
            rep = SuiteReport(suite, seeds, base_seed, outs, done, met)
            rep.failure = {"index": i, "replay": _replay(inst), "outcome": bad[0].to_dict()}
            return rep
    return SuiteReport(suite, seeds, base_seed, outs, done, met)


def run_all(seeds: int, base_seed: int, cfg: SolverConfig | None = None) -> list[SuiteReport]:
    out = []
    for s in _TAGS:
        rep = run_suite(s, seeds, base_seed, cfg)
        out.append(rep)
        if not rep.ok:
            break
    return out
