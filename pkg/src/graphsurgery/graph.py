"""Metric graph data model.

A :class:`MetricGraph` is an immutable multigraph whose edges carry lengths and
whose vertices carry one of three conditions: natural (continuity plus
Kirchhoff), Dirichlet, or a delta condition of nonzero strength ``gamma``.
Each edge is identified with ``[0, length]``, oriented from ``endpoints[0]``
to ``endpoints[1]``.  Loops and parallel edges are allowed.

Half-edges are addressed with :class:`EdgeEnd`: ``EdgeEnd(e, 0)`` is the end of
``e`` sitting at ``x = 0`` and ``EdgeEnd(e, 1)`` the one at ``x = |e|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, NamedTuple, Sequence

from . import errors

__all__ = [
    "ConditionKind",
    "VertexCondition",
    "NATURAL",
    "DIRICHLET",
    "delta",
    "combine_conditions",
    "condition_from_strength",
    "Vertex",
    "Edge",
    "EdgeEnd",
    "MetricGraph",
    "GraphStats",
    "Violation",
    "create_graph",
    "validate",
    "graph_stats",
    "insert_dummy_vertex",
    "split_edge",
    "suppress_degree_two",
    "disjoint_union",
    "fresh_id",
]

# Relative threshold below which a sum of delta strengths counts as zero.
GAMMA_ZERO_RTOL = 1e-12


class ConditionKind(str, Enum):
    NATURAL = "natural"
    DIRICHLET = "dirichlet"
    DELTA = "delta"


@dataclass(frozen=True)
class VertexCondition:
    """Vertex condition; ``gamma`` is only meaningful for ``DELTA``."""

    kind: ConditionKind = ConditionKind.NATURAL
    gamma: float = 0.0

    @property
    def is_natural(self) -> bool:
        return self.kind is ConditionKind.NATURAL

    @property
    def is_dirichlet(self) -> bool:
        return self.kind is ConditionKind.DIRICHLET

    @property
    def is_delta(self) -> bool:
        return self.kind is ConditionKind.DELTA

    @property
    def strength(self) -> float:
        """Delta strength, with natural = 0 and Dirichlet = +inf."""
        if self.kind is ConditionKind.DIRICHLET:
            return math.inf
        if self.kind is ConditionKind.DELTA:
            return float(self.gamma)
        return 0.0

    def __str__(self) -> str:
        if self.kind is ConditionKind.DELTA:
            return f"delta({self.gamma:.12g})"
        return self.kind.value


NATURAL = VertexCondition(ConditionKind.NATURAL, 0.0)
DIRICHLET = VertexCondition(ConditionKind.DIRICHLET, 0.0)


def delta(gamma: float) -> VertexCondition:
    """Delta condition of strength ``gamma`` (not validated here)."""
    return VertexCondition(ConditionKind.DELTA, float(gamma))


def condition_from_strength(gamma: float, scale: float = 1.0) -> VertexCondition:
    """Map a strength back to a condition: ``inf`` is Dirichlet, ~0 is natural."""
    if math.isinf(gamma) and gamma > 0:
        return DIRICHLET
    if abs(gamma) <= GAMMA_ZERO_RTOL * max(1.0, abs(scale)):
        return NATURAL
    return delta(gamma)


def combine_conditions(conditions: Iterable[VertexCondition]) -> VertexCondition:
    """Condition of a vertex obtained by gluing vertices with these conditions.

    Dirichlet absorbs everything; otherwise strengths add, and a zero sum
    collapses to natural.
    """
    conds = list(conditions)
    if any(c.is_dirichlet for c in conds):
        return DIRICHLET
    total = math.fsum(c.strength for c in conds)
    scale = max([abs(c.strength) for c in conds] + [1.0])
    return condition_from_strength(total, scale)


@dataclass(frozen=True)
class Vertex:
    id: str
    condition: VertexCondition = NATURAL


@dataclass(frozen=True)
class Edge:
    id: str
    endpoints: tuple[str, str]
    length: float

    @property
    def is_loop(self) -> bool:
        return self.endpoints[0] == self.endpoints[1]


class EdgeEnd(NamedTuple):
    edge: str
    end: int


@dataclass(frozen=True)
class Violation:
    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


@dataclass(frozen=True)
class GraphStats:
    total_length: float
    num_edges: int
    num_vertices: int
    num_components: int
    degree_map: dict[str, int]


@dataclass(frozen=True)
class MetricGraph:
    """Immutable metric graph; iteration order is insertion order."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    _vindex: dict = field(init=False, repr=False, compare=False)
    _eindex: dict = field(init=False, repr=False, compare=False)
    _ends: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        verts = tuple(self.vertices)
        edges = tuple(
            Edge(e.id, (e.endpoints[0], e.endpoints[1]), float(e.length)) for e in self.edges
        )
        object.__setattr__(self, "vertices", verts)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "_vindex", {v.id: v for v in verts})
        object.__setattr__(self, "_eindex", {e.id: e for e in edges})
        ends: dict[str, list[EdgeEnd]] = {v.id: [] for v in verts}
        for e in edges:
            for j in (0, 1):
                ends.setdefault(e.endpoints[j], []).append(EdgeEnd(e.id, j))
        object.__setattr__(self, "_ends", {k: tuple(v) for k, v in ends.items()})

    # lookups

    @property
    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    @property
    def edge_ids(self) -> list[str]:
        return [e.id for e in self.edges]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def total_length(self) -> float:
        return math.fsum(e.length for e in self.edges)

    def has_vertex(self, v: str) -> bool:
        return v in self._vindex

    def has_edge(self, e: str) -> bool:
        return e in self._eindex

    def vertex(self, v: str) -> Vertex:
        try:
            return self._vindex[v]
        except KeyError:
            raise errors.MissingVertex(f"no vertex {v!r}") from None

    def edge(self, e: str) -> Edge:
        try:
            return self._eindex[e]
        except KeyError:
            raise errors.MissingEdge(f"no edge {e!r}") from None

    def condition(self, v: str) -> VertexCondition:
        return self.vertex(v).condition

    def length(self, e: str) -> float:
        return self.edge(e).length

    def ends_at(self, v: str) -> tuple[EdgeEnd, ...]:
        self.vertex(v)
        return self._ends.get(v, ())

    def degree(self, v: str) -> int:
        return len(self.ends_at(v))

    def vertex_of(self, end: EdgeEnd) -> str:
        return self.edge(end.edge).endpoints[end.end]

    def incident_edges(self, v: str) -> list[str]:
        seen: dict[str, None] = {}
        for end in self.ends_at(v):
            seen.setdefault(end.edge, None)
        return list(seen)

    # global properties

    @property
    def is_all_natural(self) -> bool:
        return all(v.condition.is_natural for v in self.vertices)

    @property
    def has_dirichlet(self) -> bool:
        return any(v.condition.is_dirichlet for v in self.vertices)

    @property
    def has_delta(self) -> bool:
        return any(v.condition.is_delta for v in self.vertices)

    def components(self) -> list[tuple[list[str], list[str]]]:
        """Connected components as (vertex ids, edge ids), in insertion order."""
        parent = {v.id: v.id for v in self.vertices}

        def find(x: str) -> str:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for e in self.edges:
            a, b = (find(p) for p in e.endpoints)
            if a != b:
                parent[b] = a
        groups: dict[str, tuple[list[str], list[str]]] = {}
        for v in self.vertices:
            groups.setdefault(find(v.id), ([], []))[0].append(v.id)
        for e in self.edges:
            groups[find(e.endpoints[0])][1].append(e.id)
        return list(groups.values())

    @property
    def is_connected(self) -> bool:
        return len(self.components()) == 1

    # functional updates

    def with_condition(self, v: str, condition: VertexCondition) -> MetricGraph:
        self.vertex(v)
        verts = tuple(Vertex(x.id, condition) if x.id == v else x for x in self.vertices)
        return MetricGraph(verts, self.edges)

    def with_length(self, e: str, length: float) -> MetricGraph:
        self.edge(e)
        edges = tuple(Edge(x.id, x.endpoints, length) if x.id == e else x for x in self.edges)
        return MetricGraph(self.vertices, edges)

    def with_reversed_edge(self, e: str) -> MetricGraph:
        self.edge(e)
        edges = tuple(
            Edge(x.id, (x.endpoints[1], x.endpoints[0]), x.length) if x.id == e else x
            for x in self.edges
        )
        return MetricGraph(self.vertices, edges)

    def scaled(self, factor: float) -> MetricGraph:
        """All lengths multiplied by ``factor``; delta strengths rescaled to keep
        the spectrum exactly ``factor**-2`` times the original."""
        verts = tuple(
            Vertex(v.id, delta(v.condition.gamma / factor)) if v.condition.is_delta else v
            for v in self.vertices
        )
        edges = tuple(Edge(e.id, e.endpoints, e.length * factor) for e in self.edges)
        return MetricGraph(verts, edges)

    def edge_subgraph(self, edge_ids: Iterable[str]) -> MetricGraph:
        """Subgraph spanned by the given edges (and their endpoints)."""
        keep = set(edge_ids)
        edges = tuple(e for e in self.edges if e.id in keep)
        used = {p for e in edges for p in e.endpoints}
        verts = tuple(v for v in self.vertices if v.id in used)
        return MetricGraph(verts, edges)

    def to_networkx(self):
        """Underlying ``networkx.MultiGraph`` keyed by edge id."""
        import networkx as nx

        nxg = nx.MultiGraph()
        for v in self.vertices:
            nxg.add_node(v.id, condition=v.condition)
        for e in self.edges:
            nxg.add_edge(e.endpoints[0], e.endpoints[1], key=e.id, length=e.length)
        return nxg

    def __str__(self) -> str:
        vs = ", ".join(f"{v.id}:{v.condition}" for v in self.vertices)
        es = ", ".join(
            f"{e.id}:{e.endpoints[0]}-{e.endpoints[1]}({e.length:.6g})" for e in self.edges
        )
        return f"MetricGraph(V=[{vs}], E=[{es}])"


# construction and validation

def _as_vertex(item) -> Vertex:
    if isinstance(item, Vertex):
        return item
    if isinstance(item, str):
        return Vertex(item, NATURAL)
    vid, cond = item
    if cond is None:
        cond = NATURAL
    return Vertex(vid, cond)


def _as_edge(item) -> Edge:
    if isinstance(item, Edge):
        return item
    eid, ends, length = item
    return Edge(eid, (ends[0], ends[1]), float(length))


def validate(g: MetricGraph, allow_isolated: bool = False) -> list[Violation]:
    """All invariant violations of ``g``; an empty list means valid."""
    out: list[Violation] = []
    seen: set[str] = set()
    for v in g.vertices:
        if v.id in seen:
            out.append(Violation("DuplicateId", f"vertex id {v.id!r} used twice"))
        seen.add(v.id)
        c = v.condition
        if c.is_delta:
            if not math.isfinite(c.gamma):
                out.append(Violation("NonfiniteGamma", f"vertex {v.id!r} has gamma={c.gamma}"))
            elif c.gamma == 0.0:
                out.append(
                    Violation("ZeroGammaDelta", f"vertex {v.id!r}: delta with gamma 0, use natural")
                )
    eseen: set[str] = set()
    vids = {v.id for v in g.vertices}
    for e in g.edges:
        if e.id in eseen:
            out.append(Violation("DuplicateId", f"edge id {e.id!r} used twice"))
        eseen.add(e.id)
        for p in e.endpoints:
            if p not in vids:
                out.append(Violation("DanglingEndpoint", f"edge {e.id!r} references {p!r}"))
        if not (math.isfinite(e.length) and e.length > 0):
            out.append(Violation("NonpositiveLength", f"edge {e.id!r} has length {e.length}"))
    if not g.vertices:
        out.append(Violation("EmptyGraph", "graph has no vertices"))
    if not allow_isolated:
        touched = {p for e in g.edges for p in e.endpoints}
        for v in g.vertices:
            if v.id not in touched:
                out.append(Violation("IsolatedVertex", f"vertex {v.id!r} has no edges"))
    return out


def raise_if_invalid(g: MetricGraph, allow_isolated: bool = False) -> MetricGraph:
    report = validate(g, allow_isolated=allow_isolated)
    if report:
        first = report[0]
        exc = getattr(errors, first.code, errors.ValidationError)
        raise exc("; ".join(str(v) for v in report))
    return g


def create_graph(
    vertices: Iterable,
    edges: Iterable,
    allow_isolated: bool = False,
) -> MetricGraph:
    """Build and validate a graph.

    ``vertices`` holds :class:`Vertex` objects, bare ids (natural), or
    ``(id, condition)`` pairs; ``edges`` holds :class:`Edge` objects or
    ``(id, (from, to), length)`` triples.
    """
    g = MetricGraph(tuple(_as_vertex(v) for v in vertices), tuple(_as_edge(e) for e in edges))
    return raise_if_invalid(g, allow_isolated=allow_isolated)


def graph_stats(g: MetricGraph) -> GraphStats:
    degrees = {v.id: 0 for v in g.vertices}
    for e in g.edges:
        for p in e.endpoints:
            degrees[p] = degrees.get(p, 0) + 1
    return GraphStats(
        total_length=g.total_length,
        num_edges=g.num_edges,
        num_vertices=g.num_vertices,
        num_components=len(g.components()),
        degree_map=degrees,
    )


def fresh_id(taken, base: str) -> str:
    """``base`` if unused, else ``base#1``, ``base#2``, ..."""
    if base not in taken:
        return base
    i = 1
    while f"{base}#{i}" in taken:
        i += 1
    return f"{base}#{i}"


# dummy vertices

def split_edge(
    g: MetricGraph, e: str, positions: Sequence[float]
) -> tuple[MetricGraph, list[str], list[str]]:
    """Split edge ``e`` at the strictly increasing interior ``positions``.

    Returns the new graph, the ids of the new natural vertices (in order of
    position) and the ids of the pieces (in order along ``e``).  Piece ids are
    ``e`` itself for the first piece and fresh ids for the rest, so maps stay
    easy to follow.
    """
    edge = g.edge(e)
    pos = [float(s) for s in positions]
    if not pos:
        return g, [], [e]
    prev = 0.0
    for s in pos:
        if not (prev < s < edge.length):
            raise errors.BadSplitPoint(
                f"split point {s} not inside (0, {edge.length}) of edge {e!r} in increasing order"
            )
        prev = s
    vtaken = set(g.vertex_ids)
    etaken = set(g.edge_ids)
    new_vs: list[str] = []
    for i in range(len(pos)):
        vid = fresh_id(vtaken, f"{e}@{i + 1}")
        vtaken.add(vid)
        new_vs.append(vid)
    piece_ids = [e]
    for i in range(len(pos)):
        eid = fresh_id(etaken, f"{e}.{i + 1}")
        etaken.add(eid)
        piece_ids.append(eid)
    cuts = [0.0] + pos + [edge.length]
    nodes = [edge.endpoints[0]] + new_vs + [edge.endpoints[1]]
    pieces = [
        Edge(piece_ids[i], (nodes[i], nodes[i + 1]), cuts[i + 1] - cuts[i])
        for i in range(len(pos) + 1)
    ]
    new_edges: list[Edge] = []
    for x in g.edges:
        if x.id == e:
            new_edges.extend(pieces)
        else:
            new_edges.append(x)
    verts = tuple(g.vertices) + tuple(Vertex(v, NATURAL) for v in new_vs)
    return MetricGraph(verts, tuple(new_edges)), new_vs, piece_ids


def insert_dummy_vertex(g: MetricGraph, e: str, s: float) -> MetricGraph:
    """Insert a natural degree-2 vertex at distance ``s`` from the start of ``e``."""
    return split_edge(g, e, [s])[0]


def suppress_degree_two(g: MetricGraph, v: str) -> MetricGraph:
    """Remove a natural degree-2 vertex, merging its two edges into one."""
    vert = g.vertex(v)
    if not vert.condition.is_natural:
        raise errors.NotSuppressible(f"vertex {v!r} is {vert.condition}, not natural")
    ends = g.ends_at(v)
    if len(ends) != 2:
        raise errors.NotSuppressible(f"vertex {v!r} has degree {len(ends)}, not 2")
    (e1, j1), (e2, j2) = ends
    if e1 == e2:
        raise errors.NotSuppressible(f"vertex {v!r} is the only vertex of loop {e1!r}")
    a = g.edge(e1)
    b = g.edge(e2)
    far1 = a.endpoints[1 - j1]
    far2 = b.endpoints[1 - j2]
    merged = Edge(e1, (far1, far2), a.length + b.length)
    new_edges = []
    for x in g.edges:
        if x.id == e1:
            new_edges.append(merged)
        elif x.id != e2:
            new_edges.append(x)
    verts = tuple(x for x in g.vertices if x.id != v)
    return MetricGraph(verts, tuple(new_edges))


def disjoint_union(
    g: MetricGraph, h: MetricGraph, prefix: str = "h:"
) -> tuple[MetricGraph, dict[str, str], dict[str, str]]:
    """Union of ``g`` and ``h``; clashing ids of ``h`` are renamed.

    Returns the union and the vertex and edge renaming maps for ``h``.
    """
    vtaken = set(g.vertex_ids)
    etaken = set(g.edge_ids)
    vmap: dict[str, str] = {}
    emap: dict[str, str] = {}
    for v in h.vertices:
        nid = v.id if v.id not in vtaken else fresh_id(vtaken, prefix + v.id)
        vtaken.add(nid)
        vmap[v.id] = nid
    for e in h.edges:
        nid = e.id if e.id not in etaken else fresh_id(etaken, prefix + e.id)
        etaken.add(nid)
        emap[e.id] = nid
    verts = tuple(g.vertices) + tuple(Vertex(vmap[v.id], v.condition) for v in h.vertices)
    edges = tuple(g.edges) + tuple(
        Edge(emap[e.id], (vmap[e.endpoints[0]], vmap[e.endpoints[1]]), e.length) for e in h.edges
    )
    return MetricGraph(verts, edges), vmap, emap
