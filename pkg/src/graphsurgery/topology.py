"""Combinatorial and metric structure: bridges, doubly connected part, girth,
circumference, named graph families and the reduction of a graph to a
pumpkin chain along an eigenfunction."""

from __future__ import annotations

import heapq
import math
import re
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from . import errors
from ._kernels import get_backend
from .graph import (
    NATURAL,
    Edge,
    MetricGraph,
    Vertex,
    VertexCondition,
    raise_if_invalid,
    split_edge,
    suppress_degree_two,
)

CIRCUMFERENCE_MAX_EDGES = 20
# builder parts shorter than this fraction of the total are treated as absent
SNAP_REL = 1e-12


# bridges and the doubly connected part


def bridges(g: MetricGraph) -> set[str]:
    """Edges whose removal disconnects their component (loops and parallel edges never are)."""
    adj: dict[str, list[tuple[str, str]]] = {v: [] for v in g.vertex_ids}
    for e in g.edges:
        a, b = e.endpoints
        if a == b:
            continue
        adj[a].append((b, e.id))
        adj[b].append((a, e.id))
    disc: dict[str, int] = {}
    low: dict[str, int] = {}
    out: set[str] = set()
    counter = 0
    for root in g.vertex_ids:
        if root in disc:
            continue
        disc[root] = low[root] = counter
        counter += 1
        # iterative DFS; the parent is identified by edge id so parallel edges count
        stack = [(root, None, iter(adj[root]))]
        while stack:
            v, via, it = stack[-1]
            advanced = False
            for w, eid in it:
                if eid == via:
                    continue
                if w in disc:
                    low[v] = min(low[v], disc[w])
                else:
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, eid, iter(adj[w])))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                if stack:
                    parent = stack[-1][0]
                    low[parent] = min(low[parent], low[v])
                    if low[v] > disc[parent]:
                        out.add(via)
    return out


@dataclass(frozen=True)
class DoublyConnectedPart:
    components: list[tuple[frozenset[str], float]]
    total_length: float
    bridges: frozenset[str]

    @property
    def largest_component_length(self) -> float:
        return max((c[1] for c in self.components), default=0.0)

    @property
    def edges(self) -> frozenset[str]:
        return frozenset().union(*(c[0] for c in self.components)) if self.components else frozenset()


def doubly_connected_part(g: MetricGraph) -> DoublyConnectedPart:
    """Components left after deleting every bridge and the isolated vertices."""
    br = bridges(g)
    rest = g.edge_subgraph(e for e in g.edge_ids if e not in br)
    comps = []
    for _, eids in rest.components():
        if eids:
            comps.append((frozenset(eids), math.fsum(g.length(e) for e in eids)))
    return DoublyConnectedPart(comps, math.fsum(c[1] for c in comps), frozenset(br))


def _shortest_path(g: MetricGraph, src: str, dst: str, skip: str) -> float:
    dist = {src: 0.0}
    heap = [(0.0, src)]
    while heap:
        d, v = heapq.heappop(heap)
        if v == dst:
            return d
        if d > dist.get(v, math.inf):
            continue
        for end in g.ends_at(v):
            if end.edge == skip:
                continue
            w = g.edge(end.edge).endpoints[1 - end.end]
            nd = d + g.length(end.edge)
            if nd < dist.get(w, math.inf):
                dist[w] = nd
                heapq.heappush(heap, (nd, w))
    return math.inf


def girth(g: MetricGraph) -> float:
    """Shortest cycle length; 0 for a forest."""
    best = math.inf
    for e in g.edges:
        if e.is_loop:
            best = min(best, e.length)
        else:
            best = min(best, e.length + _shortest_path(g, e.endpoints[0], e.endpoints[1], e.id))
    return 0.0 if math.isinf(best) else best


def cycle_space_basis(g: MetricGraph) -> list[int]:
    """Fundamental cycles of a spanning forest as edge bitmasks (bit i = edge i)."""
    idx = {v: i for i, v in enumerate(g.vertex_ids)}
    parent = list(range(len(idx)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    tree_adj: dict[int, list[tuple[int, int]]] = {i: [] for i in range(len(idx))}
    non_tree = []
    for q, e in enumerate(g.edges):
        a, b = idx[e.endpoints[0]], idx[e.endpoints[1]]
        ra, rb = find(a), find(b)
        if ra == rb:
            non_tree.append(q)
        else:
            parent[rb] = ra
            tree_adj[a].append((b, q))
            tree_adj[b].append((a, q))

    def tree_path(a: int, b: int) -> int:
        prev = {a: (-1, -1)}
        stack = [a]
        while stack:
            v = stack.pop()
            for w, q in tree_adj[v]:
                if w not in prev:
                    prev[w] = (v, q)
                    stack.append(w)
        mask = 0
        while b != a:
            v, q = prev[b]
            mask ^= 1 << q
            b = v
        return mask

    basis = []
    for q in non_tree:
        e = g.edges[q]
        basis.append((1 << q) | tree_path(idx[e.endpoints[0]], idx[e.endpoints[1]]))
    return basis


def circumference(g: MetricGraph, with_mask: bool = False):
    """Longest closed trail (longest connected even-degree subgraph); 0 for a forest."""
    if g.num_edges > CIRCUMFERENCE_MAX_EDGES:
        raise errors.TooManyEdgesForCircumference(
            f"{g.num_edges} edges; exhaustive search is capped at {CIRCUMFERENCE_MAX_EDGES}"
        )
    basis = cycle_space_basis(g)
    if not basis:
        return (0.0, []) if with_mask else 0.0
    idx = {v: i for i, v in enumerate(g.vertex_ids)}
    eu = np.array([idx[e.endpoints[0]] for e in g.edges], dtype=np.int64)
    ev = np.array([idx[e.endpoints[1]] for e in g.edges], dtype=np.int64)
    lengths = np.array([e.length for e in g.edges])
    best, mask = get_backend().max_even_subgraph(
        np.array(basis, dtype=np.int64), lengths, eu, ev, len(idx)
    )
    if with_mask:
        return float(best), [e.id for q, e in enumerate(g.edges) if (int(mask) >> q) & 1]
    return float(best)


# canonical form and isomorphism


def canonical_form(g: MetricGraph) -> MetricGraph:
    """Suppress every natural degree-two vertex that can be suppressed."""
    changed = True
    while changed:
        changed = False
        for v in g.vertices:
            if v.condition.is_natural and g.degree(v.id) == 2:
                (e1, _), (e2, _) = g.ends_at(v.id)
                if e1 != e2:
                    g = suppress_degree_two(g, v.id)
                    changed = True
                    break
    return g


def is_isomorphic(g: MetricGraph, h: MetricGraph, rel_tol: float = 1e-9, suppress: bool = True) -> bool:
    """Metric-graph isomorphism (lengths within ``rel_tol``, conditions equal),
    after suppressing natural degree-two vertices unless ``suppress`` is false."""
    import networkx as nx
    from networkx.algorithms.isomorphism import GraphMatcher

    if suppress:
        g, h = canonical_form(g), canonical_form(h)
    if (g.num_edges, g.num_vertices) != (h.num_edges, h.num_vertices):
        return False

    def simple(mg: MetricGraph):
        s = nx.Graph()
        for v in mg.vertices:
            loops = sorted(e.length for e in mg.edges if e.is_loop and e.endpoints[0] == v.id)
            s.add_node(v.id, cond=v.condition, loops=loops)
        for e in mg.edges:
            if e.is_loop:
                continue
            a, b = e.endpoints
            if s.has_edge(a, b):
                s[a][b]["lens"] = sorted(s[a][b]["lens"] + [e.length])
            else:
                s.add_edge(a, b, lens=[e.length])
        return s

    def close(x: list, y: list) -> bool:
        return len(x) == len(y) and all(
            abs(a - b) <= rel_tol * max(1.0, abs(a), abs(b)) for a, b in zip(x, y)
        )

    def cond_eq(c1: VertexCondition, c2: VertexCondition) -> bool:
        if c1.kind != c2.kind:
            return False
        return not c1.is_delta or abs(c1.gamma - c2.gamma) <= rel_tol * max(1.0, abs(c1.gamma))

    gm = GraphMatcher(
        simple(g),
        simple(h),
        node_match=lambda a, b: cond_eq(a["cond"], b["cond"]) and close(a["loops"], b["loops"]),
        edge_match=lambda a, b: close(a["lens"], b["lens"]),
    )
    return gm.is_isomorphic()


# named graphs


def _chain_graph(
    mults: Sequence[int],
    lengths: Sequence[float],
    left: VertexCondition = NATURAL,
    right: VertexCondition = NATURAL,
) -> MetricGraph:
    """Locally equilateral pumpkin chain; zero-length pumpkins are elided."""
    if len(mults) != len(lengths) or not mults:
        raise errors.BadSpec("chain needs equally many multiplicities and lengths (at least one)")
    for m, ell in zip(mults, lengths):
        if int(m) != m or m < 1:
            raise errors.BadSpec(f"pumpkin multiplicity must be an integer >= 1, got {m}")
        if not (math.isfinite(ell) and ell >= 0):
            raise errors.BadSpec(f"pumpkin length must be >= 0, got {ell}")
    cutoff = SNAP_REL * math.fsum(lengths)
    keep = [(int(m), float(ell)) for m, ell in zip(mults, lengths) if ell > cutoff]
    if not keep:
        raise errors.BadSpec("chain has zero total length")
    verts = [Vertex(f"v{i}", NATURAL) for i in range(len(keep) + 1)]
    verts[0] = Vertex("v0", left)
    verts[-1] = Vertex(verts[-1].id, right)
    edges = []
    for k, (m, ell) in enumerate(keep):
        for _ in range(m):
            edges.append(Edge(f"e{len(edges) + 1}", (f"v{k}", f"v{k + 1}"), ell / m))
    return raise_if_invalid(MetricGraph(tuple(verts), tuple(edges)))


def path_graph(L: float) -> MetricGraph:
    return _chain_graph([1], [L])


def loop_graph(L: float) -> MetricGraph:
    _positive(L, "L")
    return MetricGraph((Vertex("v0"),), (Edge("e1", ("v0", "v0"), float(L)),))


def star_graph(lengths: Sequence[float]) -> MetricGraph:
    if not lengths:
        raise errors.BadSpec("star needs at least one arm")
    for x in lengths:
        _positive(x, "arm length")
    verts = [Vertex("c")] + [Vertex(f"t{i + 1}") for i in range(len(lengths))]
    edges = [Edge(f"e{i + 1}", ("c", f"t{i + 1}"), float(x)) for i, x in enumerate(lengths)]
    return MetricGraph(tuple(verts), tuple(edges))


def flower_graph(lengths: Sequence[float]) -> MetricGraph:
    if not lengths:
        raise errors.BadSpec("flower needs at least one petal")
    for x in lengths:
        _positive(x, "petal length")
    return MetricGraph(
        (Vertex("v0"),), tuple(Edge(f"e{i + 1}", ("v0", "v0"), float(x)) for i, x in enumerate(lengths))
    )


def pumpkin_graph(lengths: Sequence[float]) -> MetricGraph:
    if not lengths:
        raise errors.BadSpec("pumpkin needs at least one edge")
    for x in lengths:
        _positive(x, "edge length")
    return MetricGraph(
        (Vertex("v0"), Vertex("v1")),
        tuple(Edge(f"e{i + 1}", ("v0", "v1"), float(x)) for i, x in enumerate(lengths)),
    )


def tadpole_graph(L: float, V: float) -> MetricGraph:
    """Loop of length ``V`` with a tail of length ``L - V`` (total ``L``)."""
    _positive(L, "L")
    if not (0 <= V <= L):
        raise errors.BadSpec(f"tadpole needs 0 <= V <= L, got V={V}, L={L}")
    if V <= SNAP_REL * L:
        return path_graph(L)
    if L - V <= SNAP_REL * L:
        return loop_graph(L)
    return MetricGraph(
        (Vertex("v0"), Vertex("v1")),
        (Edge("e1", ("v0", "v0"), float(V)), Edge("e2", ("v0", "v1"), float(L - V))),
    )


def dumbbell_graph(l1: float, l2: float, L: float) -> MetricGraph:
    """Loops ``l1`` and ``l2`` joined by a handle of length ``L - l1 - l2``."""
    _positive(L, "L")
    if l1 < 0 or l2 < 0 or l1 + l2 > L * (1 + 1e-12):
        raise errors.BadSpec(f"dumbbell needs l1, l2 >= 0 and l1 + l2 <= L, got {l1}, {l2}, {L}")
    handle = L - l1 - l2
    if handle <= SNAP_REL * L:
        return flower_graph([x for x in (l1, l2) if x > SNAP_REL * L])
    if l1 <= SNAP_REL * L:
        return tadpole_graph(L, l2)
    if l2 <= SNAP_REL * L:
        return tadpole_graph(L, l1)
    return MetricGraph(
        (Vertex("v0"), Vertex("v1")),
        (
            Edge("e1", ("v0", "v0"), float(l1)),
            Edge("e2", ("v0", "v1"), float(handle)),
            Edge("e3", ("v1", "v1"), float(l2)),
        ),
    )


def pumpkin_on_stick(l1: float, m: int, l2: float, L: float) -> MetricGraph:
    """Stick ``l1``, equilateral ``m``-pumpkin of total length ``L - l1 - l2``, stick ``l2``."""
    _positive(L, "L")
    _check_pair(l1, l2, L)
    return _chain_graph([1, m, 1], [l1, max(L - l1 - l2, 0.0), l2])


def pumpkin_dumbbell(l1: float, l2: float, m: int, L: float) -> MetricGraph:
    """Equilateral ``m``-pumpkins of total lengths ``l1`` and ``l2`` joined by a handle."""
    _positive(L, "L")
    _check_pair(l1, l2, L)
    return _chain_graph([m, 1, m], [l1, max(L - l1 - l2, 0.0), l2])


def pumpkin_chain(
    mults: Sequence[int],
    lengths: Sequence[float],
    left: VertexCondition = NATURAL,
    right: VertexCondition = NATURAL,
) -> MetricGraph:
    return _chain_graph(mults, lengths, left, right)


def _positive(x: float, name: str) -> None:
    if not (isinstance(x, (int, float)) and math.isfinite(x) and x > 0):
        raise errors.BadSpec(f"{name} must be positive, got {x}")


def _check_pair(l1: float, l2: float, L: float) -> None:
    if l1 < 0 or l2 < 0 or l1 + l2 > L * (1 + 1e-12):
        raise errors.BadSpec(f"need l1, l2 >= 0 and l1 + l2 <= L, got {l1}, {l2}, {L}")


_SPEC_RE = re.compile(r"^\s*([A-Za-z0-9_\-]+)\s*(?::(.*))?$")


def _split_params(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    depth = 0
    cur = ""
    parts = []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if depth != 0:
        raise errors.ParseError(f"unbalanced brackets in {text!r}")
    if cur.strip():
        parts.append(cur)
    for p in parts:
        if "=" not in p:
            raise errors.ParseError(f"expected key=value, got {p!r}")
        k, v = p.split("=", 1)
        k = k.strip()
        if k in out:
            raise errors.ParseError(f"parameter {k!r} given twice")
        out[k] = v.strip()
    return out


def _num(params: dict, key: str, default=None) -> float:
    if key not in params:
        if default is None:
            raise errors.ParseError(f"missing parameter {key!r}")
        return default
    try:
        return float(params[key])
    except ValueError as exc:
        raise errors.ParseError(f"parameter {key!r} is not a number: {params[key]!r}") from exc


def _int(params: dict, key: str, default=None) -> int:
    x = _num(params, key, default)
    if x != int(x):
        raise errors.BadSpec(f"parameter {key!r} must be an integer, got {x}")
    return int(x)


def _list(params: dict, key: str) -> list[float]:
    if key not in params:
        raise errors.ParseError(f"missing parameter {key!r}")
    raw = params[key].strip()
    if not (raw.startswith("[") and raw.endswith("]")):
        raise errors.ParseError(f"parameter {key!r} must be a bracketed list, got {raw!r}")
    body = raw[1:-1].strip()
    try:
        return [float(x) for x in body.split(",")] if body else []
    except ValueError as exc:
        raise errors.ParseError(f"parameter {key!r} is not a list of numbers: {raw!r}") from exc


def _cond(params: dict, key: str) -> VertexCondition:
    from .io import condition_from_json

    if key not in params:
        return NATURAL
    raw = params[key]
    if raw in ("natural", "dirichlet"):
        return condition_from_json(raw)
    try:
        gam = float(raw)
    except ValueError as exc:
        raise errors.ParseError(f"bad condition {raw!r} for {key!r}") from exc
    from .graph import condition_from_strength

    return condition_from_strength(gam)


_FAMILIES = {
    "path": ({"L"}, lambda p: path_graph(_num(p, "L"))),
    "interval": ({"L"}, lambda p: path_graph(_num(p, "L"))),
    "loop": ({"L"}, lambda p: loop_graph(_num(p, "L"))),
    "star": ({"len"}, lambda p: star_graph(_list(p, "len"))),
    "flower": ({"len"}, lambda p: flower_graph(_list(p, "len"))),
    "pumpkin": ({"len"}, lambda p: pumpkin_graph(_list(p, "len"))),
    "tadpole": ({"L", "V"}, lambda p: tadpole_graph(_num(p, "L"), _num(p, "V"))),
    "dumbbell": ({"l1", "l2", "L"}, lambda p: dumbbell_graph(_num(p, "l1"), _num(p, "l2"), _num(p, "L"))),
    "stick": (
        {"l1", "m", "l2", "L"},
        lambda p: pumpkin_on_stick(_num(p, "l1"), _int(p, "m"), _num(p, "l2"), _num(p, "L")),
    ),
    "pd": (
        {"l1", "l2", "m", "L"},
        lambda p: pumpkin_dumbbell(_num(p, "l1"), _num(p, "l2"), _int(p, "m"), _num(p, "L")),
    ),
    "chain": (
        {"m", "len", "left", "right"},
        lambda p: pumpkin_chain(
            [int(x) for x in _list(p, "m")], _list(p, "len"), _cond(p, "left"), _cond(p, "right")
        ),
    ),
}
_ALIASES = {"p": "stick", "pumpkin-on-stick": "stick", "pumpkin-dumbbell": "pd", "lasso": "tadpole"}


def build_named(spec: str) -> MetricGraph:
    """Build a named graph from a spec string such as ``tadpole:L=1,V=0.5``.

    Families: ``path:L``, ``loop:L``, ``star:len=[..]``, ``flower:len=[..]``,
    ``pumpkin:len=[..]``, ``tadpole:L,V``, ``dumbbell:l1,l2,L``,
    ``stick:l1,m,l2,L`` (alias ``p``), ``pd:l1,l2,m,L`` and
    ``chain:m=[..],len=[..]`` with optional ``left``/``right`` conditions
    (``dirichlet``, ``natural`` or a strength).
    """
    m = _SPEC_RE.match(spec)
    if not m:
        raise errors.ParseError(f"malformed graph spec {spec!r}")
    name = _ALIASES.get(m.group(1).lower(), m.group(1).lower())
    if name not in _FAMILIES:
        raise errors.ParseError(f"unknown graph family {m.group(1)!r}")
    params = _split_params(m.group(2) or "")
    allowed, build = _FAMILIES[name]
    unknown = set(params) - allowed
    if unknown:
        raise errors.ParseError(f"unknown parameters {sorted(unknown)} for {name}")
    return build(params)


# pumpkin chains


@dataclass(frozen=True)
class PumpkinChainSpec:
    """Pumpkin chain layout: ``pumpkin_edges[k]`` joins ``vertices[k]`` to ``vertices[k+1]``."""

    multiplicities: list[int]
    pumpkin_lengths: list[float]
    locally_equilateral: bool
    terminal_conditions: tuple[VertexCondition, VertexCondition]
    vertices: list[str] = field(default_factory=list)
    pumpkin_edges: list[list[str]] = field(default_factory=list)


def chain_spec_of(g: MetricGraph, order: Sequence[str] | None = None, rel_tol: float = 1e-9) -> PumpkinChainSpec:
    """Recognise ``g`` as a pumpkin chain (vertex order inferred if not given)."""
    if order is None:
        order = _chain_order(g)
    pos = {v: i for i, v in enumerate(order)}
    if set(pos) != set(g.vertex_ids):
        raise errors.BadSpec("vertex order must list every vertex once")
    groups: list[list[str]] = [[] for _ in range(len(order) - 1)]
    for e in g.edges:
        a, b = (pos[p] for p in e.endpoints)
        if abs(a - b) != 1:
            raise errors.BadSpec(f"edge {e.id!r} does not join consecutive chain vertices")
        groups[min(a, b)].append(e.id)
    if any(not grp for grp in groups):
        raise errors.BadSpec("chain has an empty pumpkin")
    lens = [[g.length(e) for e in grp] for grp in groups]
    equi = all(max(x) - min(x) <= rel_tol * max(x) for x in lens)
    return PumpkinChainSpec(
        multiplicities=[len(grp) for grp in groups],
        pumpkin_lengths=[math.fsum(x) for x in lens],
        locally_equilateral=equi,
        terminal_conditions=(g.condition(order[0]), g.condition(order[-1])),
        vertices=list(order),
        pumpkin_edges=groups,
    )


def _chain_order(g: MetricGraph) -> list[str]:
    nbrs: dict[str, set[str]] = {v: set() for v in g.vertex_ids}
    for e in g.edges:
        a, b = e.endpoints
        if a == b:
            raise errors.BadSpec("a pumpkin chain has no loops")
        nbrs[a].add(b)
        nbrs[b].add(a)
    if g.num_vertices == 2:
        return list(g.vertex_ids)
    ends = [v for v in g.vertex_ids if len(nbrs[v]) == 1]
    if len(ends) != 2 or any(len(nbrs[v]) > 2 for v in g.vertex_ids):
        raise errors.BadSpec("graph is not a pumpkin chain")
    order = [ends[0]]
    prev = None
    while len(order) < g.num_vertices:
        nxt = [w for w in nbrs[order[-1]] if w != prev]
        prev = order[-1]
        order.append(nxt[0])
    return order


@dataclass(frozen=True)
class ChainReduction:
    graph: MetricGraph
    spec: PumpkinChainSpec
    pair: object
    mu: float
    mu_chain: float
    shrunk_edges: tuple[str, ...]

    def __iter__(self):
        yield self.graph
        yield self.spec


def _transport(p, e: str, x0: float, lam: float):
    from .spectrum import coefficients_from_value_slope

    val, der = p.evaluate(e, x0)
    return coefficients_from_value_slope(lam, val, der)


def reduce_to_pumpkin_chain(g: MetricGraph, p, cfg=None) -> ChainReduction:
    """Turn ``g`` into a pumpkin chain along the eigenfunction ``p`` of ``mu(g)``.

    Edges where ``p`` vanishes are shrunk, every edge is cut at each point
    where ``p`` takes a critical value, and every critical level set is glued
    to one vertex.  The result is ordered by level with all edges oriented
    upwards, so the transported eigenfunction increases along the chain.
    The gap of the chain is recomputed and checked against ``p.lam``.
    """
    from .diagnostics import _identically_zero, critical_levels, max_residual
    from .spectrum import EigenPair, SolverConfig, mu, mu_index, solve_spectrum
    from .surgery import glue_vertices, shrink_edge

    cfg = cfg or SolverConfig()
    if not g.is_connected:
        raise errors.Disconnected("reduction needs a connected graph")
    lam = p.lam
    if abs(lam) <= cfg.eig_abs_tol:
        raise errors.ZeroMu("mu is zero; there is nothing to reduce")

    # (i) shrink edges on which psi vanishes
    shrunk = []
    cur = g
    coeffs = dict(p.coefficients)
    lengths = dict(p.lengths)
    for e in g.edge_ids:
        if _identically_zero(p, e) and cur.num_edges > 1:
            cur = shrink_edge(cur, e).graph
            shrunk.append(e)
            coeffs.pop(e)
            lengths.pop(e)
    q = EigenPair(lam, coeffs, lengths)
    sup = q.sup_norm()
    tol = cfg.cluster_rel_tol * sup
    levels = [c.level for c in critical_levels(q, cur, cfg)]

    # (ii) cut every edge at the points where psi takes a critical value
    from .spectrum import _extremum_grid

    new_coeffs: dict = {}
    new_lengths: dict = {}
    for e in list(cur.edge_ids):
        ell = cur.length(e)
        knots = list(_extremum_grid(q, e))
        cuts: list[float] = [x for x in knots if 0 < x < ell]
        for a, b in zip(knots[:-1], knots[1:]):
            fa, fb = q.value(e, a), q.value(e, b)
            lo, hi = min(fa, fb), max(fa, fb)
            for t in levels:
                if lo + tol < t < hi - tol:
                    x = brentq(lambda s: q.value(e, s) - t, a, b, xtol=1e-15 * max(1.0, ell))
                    cuts.append(x)
        cuts = sorted(set(cuts))
        merged: list[float] = []
        for x in cuts:
            if x <= 1e-12 * ell or x >= ell * (1 - 1e-12):
                continue
            if merged and x - merged[-1] <= 1e-12 * ell:
                continue
            merged.append(x)
        cur, _, pieces = split_edge(cur, e, merged)
        starts = [0.0] + merged
        for pid, x0 in zip(pieces, starts):
            new_coeffs[pid] = _transport(q, e, x0, lam)
            new_lengths[pid] = cur.length(pid)
    q = EigenPair(lam, new_coeffs, new_lengths)

    # (iii) glue level sets
    vals = {}
    for v in cur.vertex_ids:
        ends = cur.ends_at(v)
        if ends:
            vals[v] = q.end_value(ends[0])
    order = sorted(vals, key=lambda v: vals[v])
    groups: list[list[str]] = []
    for v in order:
        if groups and vals[v] - vals[groups[-1][-1]] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    for grp in groups:
        if len(grp) > 1:
            cur = glue_vertices(cur, grp).graph
    # rename to c0 < c1 < ... by level and orient edges upwards
    rename = {grp[0]: f"c{i}" for i, grp in enumerate(groups)}
    level_of = {f"c{i}": i for i in range(len(groups))}
    verts = tuple(Vertex(rename[v.id], v.condition) for v in cur.vertices)
    verts = tuple(sorted(verts, key=lambda v: level_of[v.id]))
    edges = []
    final_coeffs = {}
    for e in cur.edges:
        a, b = (rename[x] for x in e.endpoints)
        if level_of[a] > level_of[b]:
            val, der = q.evaluate(e.id, e.length)
            from .spectrum import coefficients_from_value_slope

            final_coeffs[e.id] = coefficients_from_value_slope(lam, val, -der)
            a, b = b, a
        else:
            final_coeffs[e.id] = q.coefficients[e.id]
        if a == b:
            raise errors.NotMonotone(f"edge {e.id!r} starts and ends on the same level")
        edges.append(Edge(e.id, (a, b), e.length))
    edges.sort(key=lambda e: level_of[e.endpoints[0]])
    chain = MetricGraph(verts, tuple(edges))
    pair = EigenPair(lam, final_coeffs, {e.id: e.length for e in edges})
    spec = chain_spec_of(chain, [f"c{i}" for i in range(len(groups))])

    # checks: psi still an eigenfunction, increasing on every edge, same gap
    if max_residual(pair, chain) > 1e-6:
        raise errors.SolverFailure("transported eigenfunction violates the chain's vertex conditions")
    k_scale = max(pair.wavenumber, 1.0)
    for e in chain.edge_ids:
        xs = np.linspace(0.0, chain.length(e), 65)
        if float(np.min(pair.derivative(e, xs))) < -1e-8 * pair.sup_norm() * k_scale:
            raise errors.NotMonotone(f"eigenfunction decreases on chain edge {e!r}")
    idx = mu_index(chain)
    spec_chain = solve_spectrum(chain, cfg.with_(num_eigenvalues=max(idx, 2)))
    mu_chain = mu(spec_chain, chain)
    if abs(mu_chain - lam) > 2 * cfg.eig_abs_tol * max(1.0, abs(lam)):
        raise errors.SolverFailure(f"gap changed under reduction: {lam:.15g} -> {mu_chain:.15g}")
    return ChainReduction(chain, spec, pair, lam, mu_chain, tuple(shrunk))
