"""Piecewise-linear finite elements on a metric graph.

Each edge of length ``l`` is cut into ``max(2, ceil(ppu * l))`` equal intervals.
Vertex nodes are shared by all incident edges, which enforces continuity.
Delta strengths are added to the stiffness diagonal at the vertex node;
Dirichlet vertex nodes are removed before solving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from . import errors
from ._kernels import get_backend
from .graph import MetricGraph

DENSE_LIMIT = 1200


@dataclass(frozen=True, eq=False)
class Mesh:
    """Node layout of the P1 discretisation.

    ``edge_nodes[e]`` lists global node numbers from ``x = 0`` to ``x = |e|``
    and ``edge_x[e]`` the matching coordinates.
    """

    graph: MetricGraph
    points_per_unit: int
    vertex_node: dict[str, int]
    edge_nodes: dict[str, np.ndarray]
    edge_x: dict[str, np.ndarray]
    num_nodes: int
    h_max: float

    @property
    def dirichlet_nodes(self) -> np.ndarray:
        g = self.graph
        return np.array(
            sorted(self.vertex_node[v.id] for v in g.vertices
                   if v.condition.is_dirichlet and v.id in self.vertex_node),
            dtype=np.int64,
        )

    @property
    def free_nodes(self) -> np.ndarray:
        mask = np.ones(self.num_nodes, dtype=bool)
        mask[self.dirichlet_nodes] = False
        return np.flatnonzero(mask)

    def sample(self, fn) -> np.ndarray:
        """Nodal vector from ``fn(edge_id, x_array) -> values``.

        Vertex nodes take the value from the first edge that reaches them.
        """
        out = np.full(self.num_nodes, np.nan)
        for e in self.graph.edges:
            vals = np.asarray(fn(e.id, self.edge_x[e.id]), dtype=float)
            nodes = self.edge_nodes[e.id]
            fresh = np.isnan(out[nodes])
            out[nodes[fresh]] = vals[fresh]
        return out

    def edge_values(self, vec: np.ndarray, e: str) -> np.ndarray:
        return np.asarray(vec)[self.edge_nodes[e]]


def intervals_for(length: float, points_per_unit: int) -> int:
    return max(2, int(math.ceil(points_per_unit * length - 1e-9)))


def build_mesh(g: MetricGraph, points_per_unit: int) -> Mesh:
    if g.num_edges == 0:
        raise errors.EmptyGraph("graph has no edges")
    touched = {p for e in g.edges for p in e.endpoints}
    vertex_node: dict[str, int] = {}
    for v in g.vertices:
        if v.id in touched:
            vertex_node[v.id] = len(vertex_node)
    nxt = len(vertex_node)
    edge_nodes: dict[str, np.ndarray] = {}
    edge_x: dict[str, np.ndarray] = {}
    h_max = 0.0
    for e in g.edges:
        n = intervals_for(e.length, points_per_unit)
        inner = np.arange(nxt, nxt + n - 1, dtype=np.int64)
        nxt += n - 1
        edge_nodes[e.id] = np.concatenate(
            ([vertex_node[e.endpoints[0]]], inner, [vertex_node[e.endpoints[1]]])
        ).astype(np.int64)
        edge_x[e.id] = np.linspace(0.0, e.length, n + 1)
        h_max = max(h_max, e.length / n)
    return Mesh(g, points_per_unit, vertex_node, edge_nodes, edge_x, nxt, h_max)


def assemble(mesh: Mesh) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    """Full stiffness (with delta terms) and mass matrices, Dirichlet nodes kept."""
    g = mesh.graph
    n_int = np.array([len(mesh.edge_x[e.id]) - 1 for e in g.edges], dtype=np.int64)
    h = np.array([e.length for e in g.edges]) / n_int
    nodes = np.concatenate([mesh.edge_nodes[e.id] for e in g.edges]).astype(np.int64)
    offsets = np.concatenate(([0], np.cumsum(n_int + 1)[:-1])).astype(np.int64)
    rows, cols, kv, mv = get_backend().p1_assemble(n_int, h, nodes, offsets)
    n = mesh.num_nodes
    K = sp.coo_matrix((kv, (rows, cols)), shape=(n, n)).tocsr()
    M = sp.coo_matrix((mv, (rows, cols)), shape=(n, n)).tocsr()
    gam = np.zeros(n)
    for v in g.vertices:
        if v.condition.is_delta and v.id in mesh.vertex_node:
            gam[mesh.vertex_node[v.id]] = v.condition.gamma
    if np.any(gam):
        K = K + sp.diags(gam)
    return K.tocsr(), M


def fem_eigenpairs(
    g: MetricGraph, points_per_unit: int, count: int
) -> tuple[np.ndarray, np.ndarray, Mesh]:
    """Lowest ``count`` discrete eigenvalues and full-length nodal eigenvectors.

    Returns fewer values if the discrete space is smaller than ``count``.
    Eigenvectors are M-orthonormal with zeros at Dirichlet nodes.
    """
    mesh = build_mesh(g, points_per_unit)
    K, M = assemble(mesh)
    free = mesh.free_nodes
    nfree = free.size
    if nfree == 0:
        return np.empty(0), np.empty((mesh.num_nodes, 0)), mesh
    Kf = K[free][:, free]
    Mf = M[free][:, free]
    count = min(count, nfree)
    try:
        if nfree <= DENSE_LIMIT or count >= nfree - 1:
            vals, vecs = scipy.linalg.eigh(
                Kf.toarray(), Mf.toarray(), subset_by_index=[0, count - 1]
            )
        else:
            vals, vecs = _sparse_lowest(Kf, Mf, count)
    except (np.linalg.LinAlgError, spla.ArpackError, ValueError) as exc:
        raise errors.SolverFailure(f"FEM eigensolver failed: {exc}") from exc
    order = np.argsort(vals, kind="stable")
    vals = vals[order]
    vecs = vecs[:, order]
    full = np.zeros((mesh.num_nodes, vals.size))
    full[free] = vecs
    return vals, full, mesh


def _sparse_lowest(Kf, Mf, count):
    # Shift below the whole spectrum so that shift-invert returns the lowest
    # eigenvalues: x'Kx >= min_i(K_ii - sum_j!=i |K_ij|) |x|^2 (Gershgorin), and
    # the P1 mass matrix has smallest eigenvalue above a quarter of its
    # smallest diagonal entry.
    kd = Kf.diagonal()
    radius = np.asarray(abs(Kf).sum(axis=1)).ravel() - np.abs(kd)
    rmin = float(np.min(kd - radius))
    lower = min(0.0, rmin) * 4.0 / float(Mf.diagonal().min())
    sigma = lower - 1.0
    vals, vecs = spla.eigsh(Kf.tocsc(), k=count, M=Mf.tocsc(), sigma=sigma, which="LM")
    return vals, vecs


def dispersion_corrected(lam_h: float, h: float) -> float:
    """Invert the uniform-mesh P1 dispersion relation.

    On a uniform mesh of size ``h`` the discrete eigenvalue for wavenumber
    ``k`` is ``(6/h^2)(1 - cos kh)/(2 + cos kh)``; solving for ``k`` gives an
    estimate of the exact eigenvalue (a lower estimate when ``h`` is the
    largest element size).
    """
    mu = lam_h * h * h
    c = (1.0 - mu / 3.0) / (1.0 + mu / 6.0) if mu > -6.0 else math.inf
    if c >= 1.0:
        if not math.isfinite(c):
            return lam_h
        kappa = math.acosh(c) / h
        return -kappa * kappa
    if c <= -1.0:
        return (math.pi / h) ** 2
    k = math.acos(c) / h
    return k * k
