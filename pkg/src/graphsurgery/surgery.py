"""Graph surgery: gluing, cutting, attaching, inserting, edge edits, unfolding,
symmetrising and transplanting, each with old-to-new element maps.

Every operation returns a :class:`SurgeryResult`.  ``vertex_map`` and
``edge_map`` send each id of the input graph to the tuple of ids that
replace it (empty when the element is removed).  Elements that come from an
inserted or attached graph are listed in ``inserted_vertex_map`` and
``inserted_edge_map``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping, Sequence

from . import errors
from .graph import (
    DIRICHLET,
    NATURAL,
    Edge,
    EdgeEnd,
    MetricGraph,
    Vertex,
    VertexCondition,
    combine_conditions,
    condition_from_strength,
    delta,
    disjoint_union,
    fresh_id,
)

GAMMA_SUM_TOL = 1e-12
CUT_GAMMA_ZERO = 1e-10


@dataclass(frozen=True)
class SurgeryResult:
    graph: MetricGraph
    vertex_map: dict[str, tuple[str, ...]]
    edge_map: dict[str, tuple[str, ...]]
    notes: tuple[str, ...] = ()
    inserted_vertex_map: dict[str, str] = field(default_factory=dict)
    inserted_edge_map: dict[str, str] = field(default_factory=dict)


def _identity_maps(g: MetricGraph):
    return {v: (v,) for v in g.vertex_ids}, {e: (e,) for e in g.edge_ids}


def _compose(first: Mapping[str, tuple], second: Mapping[str, tuple]) -> dict[str, tuple]:
    out = {}
    for k, mids in first.items():
        seen: dict[str, None] = {}
        for m in mids:
            for n in second.get(m, ()):
                seen.setdefault(n, None)
        out[k] = tuple(seen)
    return out


def _then(r1: SurgeryResult, r2: SurgeryResult, notes: Iterable[str] = ()) -> SurgeryResult:
    ivm = {k: r2.vertex_map[v][0] for k, v in r1.inserted_vertex_map.items() if r2.vertex_map.get(v)}
    iem = {k: r2.edge_map[e][0] for k, e in r1.inserted_edge_map.items() if r2.edge_map.get(e)}
    ivm.update(r2.inserted_vertex_map)
    iem.update(r2.inserted_edge_map)
    return SurgeryResult(
        r2.graph,
        _compose(r1.vertex_map, r2.vertex_map),
        _compose(r1.edge_map, r2.edge_map),
        tuple(r1.notes) + tuple(r2.notes) + tuple(notes),
        ivm,
        iem,
    )


def _as_end(item) -> EdgeEnd:
    e, j = item
    if j in ("from", "to"):
        j = 0 if j == "from" else 1
    return EdgeEnd(str(e), int(j))


def _drop_isolated(verts: Iterable[Vertex], edges: Sequence[Edge]) -> tuple[list[Vertex], list[str]]:
    touched = {p for e in edges for p in e.endpoints}
    keep, gone = [], []
    for v in verts:
        (keep if v.id in touched else gone).append(v)
    return keep, [v.id for v in gone]


# gluing and cutting


def glue_vertices(g: MetricGraph, vs: Sequence[str]) -> SurgeryResult:
    """Identify the vertices ``vs`` into one vertex named ``vs[0]``.

    The fused condition is Dirichlet if any input is Dirichlet, otherwise
    the delta condition with the summed strength (natural if it is zero).
    """
    distinct = list(dict.fromkeys(vs))
    if len(distinct) < 2:
        raise errors.TooFewVertices("gluing needs at least two distinct vertices")
    for v in distinct:
        g.vertex(v)
    target = distinct[0]
    others = set(distinct[1:])
    cond = combine_conditions(g.condition(v) for v in distinct)
    verts = tuple(
        Vertex(target, cond) if v.id == target else v for v in g.vertices if v.id not in others
    )
    edges = tuple(
        Edge(e.id, tuple(target if p in others else p for p in e.endpoints), e.length)
        for e in g.edges
    )
    vmap, emap = _identity_maps(g)
    for v in others:
        vmap[v] = (target,)
    return SurgeryResult(MetricGraph(verts, edges), vmap, emap, (f"glued {distinct} -> {target} [{cond}]",))


def _check_partition(g: MetricGraph, v0: str, partition) -> list[list[EdgeEnd]]:
    ends = set(g.ends_at(v0))
    groups = [[_as_end(x) for x in grp] for grp in partition]
    flat = [x for grp in groups for x in grp]
    if not groups or any(not grp for grp in groups):
        raise errors.BadPartition("partition groups must be nonempty")
    if len(flat) != len(set(flat)) or set(flat) != ends:
        missing = sorted(ends - set(flat))
        extra = sorted(set(flat) - ends)
        raise errors.BadPartition(
            f"partition must cover the edge-ends at {v0!r} exactly once "
            f"(missing {missing}, foreign {extra})"
        )
    return groups


def _cut(g: MetricGraph, v0: str, groups, conds: Sequence[VertexCondition], note: str) -> SurgeryResult:
    taken = set(g.vertex_ids)
    names = []
    for i in range(len(groups)):
        nid = fresh_id(taken - {v0}, f"{v0}.{i + 1}")
        taken.add(nid)
        names.append(nid)
    where = {(end.edge, end.end): names[i] for i, grp in enumerate(groups) for end in grp}
    verts: list[Vertex] = []
    for v in g.vertices:
        if v.id == v0:
            verts.extend(Vertex(n, c) for n, c in zip(names, conds))
        else:
            verts.append(v)
    edges = []
    for e in g.edges:
        pts = tuple(where.get((e.id, j), e.endpoints[j]) for j in (0, 1))
        edges.append(Edge(e.id, pts, e.length))
    vmap, emap = _identity_maps(g)
    vmap[v0] = tuple(names)
    return SurgeryResult(MetricGraph(tuple(verts), tuple(edges)), vmap, emap, (note,))


def _parse_gamma(x) -> VertexCondition:
    if isinstance(x, VertexCondition):
        return x
    if isinstance(x, str):
        if x.lower() == "dirichlet":
            return DIRICHLET
        if x.lower() == "natural":
            return NATURAL
        x = float(x)
    return condition_from_strength(float(x))


def cut_explicit(g: MetricGraph, v0: str, partition, gammas: Sequence) -> SurgeryResult:
    """Split ``v0`` into one vertex per partition group with the given strengths.

    ``gammas`` entries are reals, ``"dirichlet"``/``inf`` or conditions.  The
    finite strengths must add up to the strength of ``v0``; a Dirichlet
    ``v0`` instead needs at least one Dirichlet descendant.
    """
    g.vertex(v0)
    groups = _check_partition(g, v0, partition)
    if len(gammas) != len(groups):
        raise errors.BadPartition(f"{len(groups)} groups but {len(gammas)} strengths")
    conds = [_parse_gamma(x) for x in gammas]
    c0 = g.condition(v0)
    if c0.is_dirichlet:
        if not any(c.is_dirichlet for c in conds):
            raise errors.GammaSumMismatch("cutting a Dirichlet vertex needs a Dirichlet descendant")
    else:
        if any(c.is_dirichlet for c in conds):
            raise errors.GammaSumMismatch("Dirichlet descendant of a vertex with finite strength")
        total = math.fsum(c.strength for c in conds)
        scale = max([1.0, abs(c0.strength)] + [abs(c.strength) for c in conds])
        if abs(total - c0.strength) > GAMMA_SUM_TOL * scale:
            raise errors.GammaSumMismatch(
                f"descendant strengths sum to {total:.15g}, vertex has {c0.strength:.15g}"
            )
    return _cut(g, v0, groups, conds, f"cut {v0} into {len(groups)} [{', '.join(map(str, conds))}]")


def cut_along_function(g: MetricGraph, v0: str, psi, partition, tol: float = 1e-7) -> SurgeryResult:
    """Cut ``v0`` so that ``psi`` stays an eigenfunction.

    Each descendant gets strength ``-(sum of outward derivatives of its
    edge-ends) / psi(v0)``, or Dirichlet everywhere when ``psi(v0) = 0``.
    """
    from .diagnostics import max_residual

    g.vertex(v0)
    groups = _check_partition(g, v0, partition)
    same_lengths = set(psi.coefficients) == set(g.edge_ids) and all(
        abs(psi.lengths[e] - g.length(e)) <= 1e-12 * g.length(e) for e in g.edge_ids
    )
    if not same_lengths or max_residual(psi, g) > tol:
        raise errors.NotAnEigenpair("psi does not satisfy the vertex conditions of g")
    sup = psi.sup_norm()
    val = psi.end_value(g.ends_at(v0)[0])
    if abs(val) <= CUT_GAMMA_ZERO * sup or g.condition(v0).is_dirichlet:
        conds = [DIRICHLET] * len(groups)
    else:
        conds = []
        for grp in groups:
            gam = -math.fsum(psi.outward_derivative(end) for end in grp) / val
            scale = max(1.0, psi.wavenumber)
            conds.append(NATURAL if abs(gam) < CUT_GAMMA_ZERO * scale else delta(gam))
    res = _cut(g, v0, groups, conds, f"cut {v0} along eigenfunction [{', '.join(map(str, conds))}]")
    if max_residual(psi, res.graph) > tol:
        raise errors.NotAnEigenpair("psi is not an eigenfunction of the cut graph")
    return res


# adding volume


def attach_pendant(g: MetricGraph, v1: str, h: MetricGraph, w1: str) -> SurgeryResult:
    """Disjoint union of ``g`` and ``h`` with ``v1`` and ``w1`` glued (fused id ``v1``)."""
    g.vertex(v1)
    h.vertex(w1)
    union, hv, he = disjoint_union(g, h)
    r1 = SurgeryResult(union, *_identity_maps(union), (), dict(hv), dict(he))
    r2 = glue_vertices(union, [v1, hv[w1]])
    res = _then(r1, r2, (f"attached pendant at {v1} via {w1}",))
    return _restrict(res, g)


def _restrict(res: SurgeryResult, g: MetricGraph) -> SurgeryResult:
    """Keep only the original graph's ids as keys of the main maps."""
    return SurgeryResult(
        res.graph,
        {v: res.vertex_map.get(v, ()) for v in g.vertex_ids},
        {e: res.edge_map.get(e, ()) for e in g.edge_ids},
        res.notes,
        res.inserted_vertex_map,
        res.inserted_edge_map,
    )


def insert_graph(
    g: MetricGraph,
    v0: str,
    h: MetricGraph,
    assignment: Mapping | Sequence | None = None,
    gamma_split: Mapping[str, float] | None = None,
) -> SurgeryResult:
    """Replace ``v0`` by a copy of ``h``.

    ``assignment`` sends each edge-end ``(edge, end)`` at ``v0`` to a vertex
    of ``h`` (a mapping, or pairs ``((edge, end), w)``); by default all go to
    the first vertex of ``h``.  ``gamma_split`` distributes the strength of
    ``v0`` over vertices of ``h`` (added to their own conditions); by
    default all of it goes to the first target.
    """
    c0 = g.condition(v0)
    if c0.is_dirichlet:
        raise errors.DirichletInsertionUnsupported(f"cannot insert at Dirichlet vertex {v0!r}")
    ends = list(g.ends_at(v0))
    if assignment is None:
        amap = {end: h.vertices[0].id for end in ends}
    else:
        items = assignment.items() if isinstance(assignment, Mapping) else assignment
        amap = {}
        for k, w in items:
            end = _as_end(k)
            if end in amap:
                raise errors.BadAssignment(f"edge-end {end} assigned twice")
            amap[end] = str(w)
    if set(amap) != set(ends):
        raise errors.BadAssignment(f"assignment must cover exactly the edge-ends at {v0!r}")
    for w in amap.values():
        if not h.has_vertex(w):
            raise errors.BadAssignment(f"{w!r} is not a vertex of the inserted graph")
    targets = list(dict.fromkeys(amap[end] for end in ends))
    if gamma_split is None:
        first = targets[0] if targets else h.vertices[0].id
        split = {first: c0.strength} if c0.strength != 0.0 else {}
    else:
        split = {str(k): float(v) for k, v in gamma_split.items()}
        for w in split:
            if not h.has_vertex(w):
                raise errors.BadAssignment(f"{w!r} is not a vertex of the inserted graph")
        total = math.fsum(split.values())
        scale = max([1.0, abs(c0.strength)] + [abs(x) for x in split.values()])
        if abs(total - c0.strength) > GAMMA_SUM_TOL * scale:
            raise errors.GammaSumMismatch(
                f"split strengths sum to {total:.15g}, vertex has {c0.strength:.15g}"
            )
    # rename h away from g (v0 is going away, so its id may be reused)
    rest_v = [v for v in g.vertices if v.id != v0]
    base = MetricGraph(tuple(rest_v), g.edges)
    vtaken = {v.id for v in rest_v}
    etaken = set(g.edge_ids)
    hv: dict[str, str] = {}
    he: dict[str, str] = {}
    for v in h.vertices:
        nid = v.id if v.id not in vtaken else fresh_id(vtaken, "h:" + v.id)
        vtaken.add(nid)
        hv[v.id] = nid
    for e in h.edges:
        nid = e.id if e.id not in etaken else fresh_id(etaken, "h:" + e.id)
        etaken.add(nid)
        he[e.id] = nid
    hverts = []
    for v in h.vertices:
        cond = v.condition
        if v.id in split:
            cond = combine_conditions([cond, condition_from_strength(split[v.id])])
        hverts.append(Vertex(hv[v.id], cond))
    where = {(end.edge, end.end): hv[w] for end, w in amap.items()}
    edges = [
        Edge(e.id, tuple(where.get((e.id, j), e.endpoints[j]) for j in (0, 1)), e.length)
        for e in base.edges
    ]
    edges += [Edge(he[e.id], (hv[e.endpoints[0]], hv[e.endpoints[1]]), e.length) for e in h.edges]
    new_g = MetricGraph(tuple(rest_v) + tuple(hverts), tuple(edges))
    vmap, emap = _identity_maps(g)
    vmap[v0] = tuple(hv[w] for w in targets)
    return SurgeryResult(new_g, vmap, emap, (f"inserted graph at {v0}",), hv, he)


def lengthen_edge(g: MetricGraph, e: str, delta_len: float) -> SurgeryResult:
    """Change the length of ``e`` by ``delta_len`` (may be negative)."""
    ell = g.length(e)
    new = ell + float(delta_len)
    if not (math.isfinite(new) and new > 0):
        raise errors.BadLength(f"edge {e!r} would get length {new}")
    vmap, emap = _identity_maps(g)
    return SurgeryResult(g.with_length(e, new), vmap, emap, (f"length of {e}: {ell:.12g} -> {new:.12g}",))


def shrink_edge(g: MetricGraph, e: str) -> SurgeryResult:
    """Remove ``e`` and glue its endpoints; isolated vertices left over are deleted."""
    edge = g.edge(e)
    rest = tuple(x for x in g.edges if x.id != e)
    if not rest:
        raise errors.EmptyGraph(f"shrinking {e!r} leaves no edges")
    g1 = MetricGraph(g.vertices, rest)
    vmap, emap = _identity_maps(g)
    emap[e] = ()
    r1 = SurgeryResult(g1, *_identity_maps(g1))
    if not edge.is_loop:
        r2 = glue_vertices(g1, list(edge.endpoints))
        r1 = _then(r1, r2)
    keep, gone = _drop_isolated(r1.graph.vertices, r1.graph.edges)
    g2 = MetricGraph(tuple(keep), r1.graph.edges)
    vm = {v: tuple(n for n in r1.vertex_map[v] if n not in gone) for v in g.vertex_ids}
    notes = (f"shrank {e}",) + tuple(f"removed isolated vertex {v}" for v in gone)
    return SurgeryResult(g2, vm, {**{x: (x,) for x in g1.edge_ids}, e: ()}, notes)


def add_edge(g: MetricGraph, v: str, w: str, length: float, edge_id: str | None = None) -> SurgeryResult:
    g.vertex(v)
    g.vertex(w)
    if not (math.isfinite(length) and length > 0):
        raise errors.BadLength(f"new edge length must be positive, got {length}")
    eid = edge_id or fresh_id(set(g.edge_ids), f"e{g.num_edges + 1}")
    if g.has_edge(eid):
        raise errors.DuplicateId(f"edge id {eid!r} already used")
    new_g = MetricGraph(g.vertices, g.edges + (Edge(eid, (v, w), float(length)),))
    vmap, emap = _identity_maps(g)
    return SurgeryResult(new_g, vmap, emap, (f"added edge {eid} {v}-{w}",), {}, {eid: eid})


# transferring volume


def _common_pair(g: MetricGraph, edges: Sequence[str]) -> tuple[str, str]:
    if len(set(edges)) != len(edges):
        raise errors.NotParallel("edges listed twice")
    pairs = {frozenset(g.edge(e).endpoints) for e in edges}
    if len(pairs) != 1:
        raise errors.NotParallel(f"edges {list(edges)} do not join the same pair of vertices")
    return g.edge(edges[0]).endpoints


def _replace_parallel(
    g: MetricGraph, edges: Sequence[str], new_edges: Sequence[Edge], keep_order: bool
) -> MetricGraph:
    listed = set(edges)
    out: list[Edge] = []
    placed = False
    for x in g.edges:
        if x.id in listed:
            if keep_order and not placed:
                out.extend(new_edges)
                placed = True
            continue
        out.append(x)
    if not placed:
        out.extend(new_edges)
    return MetricGraph(g.vertices, tuple(out))


def unfold_parallel(g: MetricGraph, edges: Sequence[str], keep_order: bool = True) -> SurgeryResult:
    """Replace parallel edges by one edge (id ``edges[0]``) of the summed length.

    With ``keep_order`` the new edge takes the position of ``edges[0]`` in
    the edge list; otherwise it is appended.
    """
    edges = [str(e) for e in edges]
    if len(edges) < 2:
        raise errors.NotParallel("unfolding needs at least two edges")
    a, b = _common_pair(g, edges)
    total = math.fsum(g.length(e) for e in edges)
    new_g = _replace_parallel(g, edges, [Edge(edges[0], (a, b), total)], keep_order)
    vmap, emap = _identity_maps(g)
    for e in edges:
        emap[e] = (edges[0],)
    return SurgeryResult(new_g, vmap, emap, (f"unfolded {edges} into {edges[0]}",))


def _pendant_base(g: MetricGraph, edges: Sequence[str]) -> tuple[str, dict[str, str]]:
    """Common vertex and the tip of each pendant edge."""
    candidates = None
    for e in edges:
        edge = g.edge(e)
        if edge.is_loop:
            raise errors.NotPendantAtCommonVertex(f"{e!r} is a loop")
        opts = {
            edge.endpoints[j] for j in (0, 1) if g.degree(edge.endpoints[1 - j]) == 1
        }
        candidates = opts if candidates is None else candidates & opts
    if not candidates:
        raise errors.NotPendantAtCommonVertex(f"edges {list(edges)} are not pendant at one vertex")
    base = sorted(candidates, key=g.vertex_ids.index)[0]
    tips = {}
    for e in edges:
        p = g.edge(e).endpoints
        tips[e] = p[1] if p[0] == base else p[0]
    return base, tips


def unfold_pendant(g: MetricGraph, edges: Sequence[str]) -> SurgeryResult:
    """Replace pendant edges at a common vertex by one pendant edge of the summed length.

    The new edge keeps the id and tip of ``edges[0]``; the other tips are removed.
    """
    edges = [str(e) for e in edges]
    if len(set(edges)) != len(edges) or not edges:
        raise errors.NotPendantAtCommonVertex("need distinct pendant edges")
    base, tips = _pendant_base(g, edges)
    for e, t in tips.items():
        if not g.condition(t).is_natural:
            raise errors.NonNaturalTip(f"tip {t!r} of {e!r} is {g.condition(t)}")
    total = math.fsum(g.length(e) for e in edges)
    first = g.edge(edges[0])
    new_edge = Edge(edges[0], first.endpoints, total)
    listed = set(edges)
    out = []
    for x in g.edges:
        if x.id == edges[0]:
            out.append(new_edge)
        elif x.id not in listed:
            out.append(x)
    dropped = {tips[e] for e in edges[1:]}
    verts = tuple(v for v in g.vertices if v.id not in dropped)
    vmap, emap = _identity_maps(g)
    for t in dropped:
        vmap[t] = ()
    for e in edges:
        emap[e] = (edges[0],)
    return SurgeryResult(MetricGraph(verts, tuple(out)), vmap, emap, (f"unfolded pendants {edges} at {base}",))


def symmetrise_parallel(g: MetricGraph, edges: Sequence[str], m: int) -> SurgeryResult:
    """Replace ``k`` parallel edges by ``m`` parallel edges of length (total)/m.

    The new edges reuse the ids ``edges[:m]`` and are oriented like ``edges[0]``.
    """
    edges = [str(e) for e in edges]
    k = len(edges)
    if k < 1:
        raise errors.NotParallel("no edges given")
    if not isinstance(m, int) or not 1 <= m <= k:
        raise errors.BadM(f"need 1 <= m <= {k}, got {m}")
    a, b = _common_pair(g, edges)
    lens = [g.length(e) for e in edges]
    if m == k and len(set(lens)) == 1:
        vmap, emap = _identity_maps(g)
        for e in edges:
            emap[e] = tuple(edges)
        return SurgeryResult(g, vmap, emap, ("symmetrisation of equal edges: unchanged",))
    each = math.fsum(lens) / m
    new_edges = [Edge(edges[i], (a, b), each) for i in range(m)]
    new_g = _replace_parallel(g, edges, new_edges, True)
    vmap, emap = _identity_maps(g)
    for e in edges:
        emap[e] = tuple(edges[:m])
    return SurgeryResult(new_g, vmap, emap, (f"symmetrised {edges} into {m} edges of length {each:.12g}",))


@dataclass(frozen=True)
class TransplantTarget:
    vertex: str
    graph: MetricGraph
    assignment: Any = None


def transplant(
    g: MetricGraph,
    cut_vertices: Sequence[str],
    c_edges: Iterable[str],
    targets: Sequence[TransplantTarget | tuple],
) -> SurgeryResult:
    """Detach the subgraph ``C`` spanned by ``c_edges`` at ``cut_vertices`` and
    insert the target graphs at their vertices of the remainder.

    ``C`` may meet the rest of the graph only at ``cut_vertices``; at those
    vertices the remainder keeps the original condition and ``C`` is
    discarded.  Each target graph is inserted with :func:`insert_graph`
    (all edge-ends to its first vertex unless an assignment is given).
    """
    c_set = [str(e) for e in dict.fromkeys(c_edges)]
    for e in c_set:
        g.edge(e)
    cset = set(c_set)
    if not cset or cset == set(g.edge_ids):
        raise errors.NotDetachable("C must be a nonempty proper edge subset")
    cuts = set(cut_vertices)
    for v in cuts:
        g.vertex(v)
    c_verts = {p for e in c_set for p in g.edge(e).endpoints}
    r_verts = {p for e in g.edges if e.id not in cset for p in e.endpoints}
    shared = c_verts & r_verts
    if not shared <= cuts:
        raise errors.NotDetachable(f"C meets the remainder at uncut vertices {sorted(shared - cuts)}")
    for v in c_verts - cuts:
        if not g.condition(v).is_natural:
            raise errors.NonNaturalC(f"vertex {v!r} of C is {g.condition(v)}")
    tgs = [t if isinstance(t, TransplantTarget) else TransplantTarget(*t) for t in targets]
    if not tgs:
        raise errors.LengthMismatch("no target graphs for the removed volume")
    c_len = math.fsum(g.length(e) for e in c_set)
    h_len = math.fsum(t.graph.total_length for t in tgs)
    if abs(c_len - h_len) > 1e-12 * max(1.0, c_len):
        raise errors.LengthMismatch(f"|C| = {c_len:.15g} but target graphs total {h_len:.15g}")
    for t in tgs:
        if not t.graph.is_all_natural:
            raise errors.NonNaturalC("target graphs must carry natural conditions only")
        if not t.graph.is_connected:
            raise errors.Disconnected("target graphs must be connected")
        if t.vertex not in r_verts:
            raise errors.NotDetachable(f"target {t.vertex!r} is not in the remainder")
        if g.condition(t.vertex).is_dirichlet:
            raise errors.DirichletTarget(f"target {t.vertex!r} is Dirichlet")
    rest_edges = tuple(e for e in g.edges if e.id not in cset)
    keep, gone = _drop_isolated(g.vertices, rest_edges)
    r = MetricGraph(tuple(keep), rest_edges)
    vmap, emap = _identity_maps(g)
    for e in c_set:
        emap[e] = ()
    for v in gone:
        vmap[v] = ()
    res = SurgeryResult(r, vmap, emap, (f"removed C = {c_set}",))
    for t in tgs:
        cur = res.vertex_map[t.vertex][0] if res.vertex_map.get(t.vertex) else t.vertex
        step = insert_graph(res.graph, cur, t.graph, t.assignment)
        res = _then(res, step)
    return _restrict(res, g)


# serialisable operations


def _graph(obj) -> MetricGraph:
    if isinstance(obj, MetricGraph):
        return obj
    if isinstance(obj, str):
        from .topology import build_named

        return build_named(obj)
    from .io import graph_from_dict

    return graph_from_dict(obj)


def apply_op(g: MetricGraph, op: Mapping[str, Any], cfg=None) -> SurgeryResult:
    """Apply one surgery record ``{"op": name, ...}``.

    Graph-valued parameters accept graph JSON objects or builder spec strings.
    """
    name = op.get("op")
    try:
        if name == "glue":
            return glue_vertices(g, op["vertices"])
        if name == "cut_explicit":
            return cut_explicit(g, op["vertex"], op["partition"], op["gammas"])
        if name == "cut_along_function":
            from .spectrum import SolverConfig, solve_spectrum

            k = int(op.get("eigen_index", 2))
            c = (cfg or SolverConfig()).with_(num_eigenvalues=k)
            psi = solve_spectrum(g, c).pair(k)
            return cut_along_function(g, op["vertex"], psi, op["partition"])
        if name == "attach_pendant":
            return attach_pendant(g, op["vertex"], _graph(op["graph"]), op["pendant_vertex"])
        if name == "insert_graph":
            assignment = op.get("assignment")
            if assignment is not None:
                assignment = [((a["edge"], a["end"]), a["target"]) for a in assignment]
            return insert_graph(g, op["vertex"], _graph(op["graph"]), assignment, op.get("gamma_split"))
        if name == "lengthen":
            return lengthen_edge(g, op["edge"], float(op["delta"]))
        if name == "shrink":
            return shrink_edge(g, op["edge"])
        if name == "add_edge":
            return add_edge(g, op["from"], op["to"], float(op["length"]), op.get("id"))
        if name == "unfold_parallel":
            return unfold_parallel(g, op["edges"], bool(op.get("keep_order", True)))
        if name == "unfold_pendant":
            return unfold_pendant(g, op["edges"])
        if name == "symmetrise_parallel":
            return symmetrise_parallel(g, op["edges"], int(op["m"]))
        if name == "transplant":
            tg = [
                TransplantTarget(t["vertex"], _graph(t["graph"]),
                                 [((a["edge"], a["end"]), a["target"]) for a in t["assignment"]]
                                 if t.get("assignment") else None)
                for t in op["targets"]
            ]
            return transplant(g, op["cut_vertices"], op["c_edges"], tg)
        if name == "set_condition":
            from .io import condition_from_json

            v = op["vertex"]
            g.vertex(v)
            vmap, emap = _identity_maps(g)
            cond = condition_from_json(op["condition"])
            return SurgeryResult(g.with_condition(v, cond), vmap, emap, (f"set {v} to {cond}",))
    except KeyError as exc:
        raise errors.ParseError(f"surgery op {name!r} is missing field {exc}") from exc
    raise errors.ParseError(f"unknown surgery op {name!r}")


def apply_script(g: MetricGraph, ops: Sequence[Mapping[str, Any]], cfg=None) -> SurgeryResult:
    """Apply surgery records in order, composing the maps."""
    vmap, emap = _identity_maps(g)
    res = SurgeryResult(g, vmap, emap)
    for op in ops:
        res = _then(res, apply_op(res.graph, op, cfg))
    return _restrict(res, g)
