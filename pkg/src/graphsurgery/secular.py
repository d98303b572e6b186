"""Secular determinant of the vertex conditions.

On every edge an eigenfunction is ``a C(x) + s S(x)`` (basis described in
:mod:`graphsurgery._kernels`).  Continuity, Kirchhoff/delta and Dirichlet
conditions give ``2E`` linear equations in the ``2E`` unknowns; ``lam`` is an
eigenvalue exactly when the matrix is singular, and the null space gives the
eigenfunctions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._kernels import get_backend
from .graph import MetricGraph


@dataclass(frozen=True, eq=False)
class SecularSystem:
    """Precomputed row structure of the secular matrix of one graph."""

    edge_ids: tuple[str, ...]
    lengths: np.ndarray
    t_row: np.ndarray
    t_edge: np.ndarray
    t_end: np.ndarray
    t_kind: np.ndarray
    t_coef: np.ndarray

    @property
    def size(self) -> int:
        return 2 * len(self.edge_ids)

    @property
    def _args(self):
        return (self.lengths, self.t_row, self.t_edge, self.t_end, self.t_kind, self.t_coef)

    def matrix(self, lam: float) -> np.ndarray:
        return get_backend().secular_matrix(float(lam), *self._args)

    def equilibrated(self, lam: float) -> tuple[np.ndarray, np.ndarray]:
        """Equilibrated matrix and its column scales (to map null vectors back)."""
        m, col, _ = get_backend().secular_scaled(float(lam), *self._args)
        return np.asarray(m), np.asarray(col)

    def determinant(self, lam: float) -> tuple[float, float]:
        """``(value, log_scale)`` with ``det = value * exp(log_scale)``, ``|value| <= 1``."""
        value, log_scale = get_backend().secular_logdet(float(lam), *self._args)
        return float(value), float(log_scale)

    def scan(self, ts: np.ndarray) -> np.ndarray:
        """Determinant mantissas at ``lam = t|t|`` for every ``t``."""
        return np.asarray(get_backend().scan_secular(np.asarray(ts, dtype=float), *self._args))

    def bisect(self, lo: float, hi: float, f_lo: float, xtol: float, maxiter: int = 200):
        root, width = get_backend().bisect_secular(
            float(lo), float(hi), float(f_lo), float(xtol), int(maxiter), *self._args
        )
        return float(root), float(width)

    def singular_values(self, lam: float) -> np.ndarray:
        """Singular values of the equilibrated matrix, ascending, relative to the largest.

        The largest is floored at one so that a fully singular matrix (one
        edge, double eigenvalue) reads as all zeros rather than all ones.
        """
        m, _ = self.equilibrated(lam)
        s = np.linalg.svd(m, compute_uv=False)[::-1]
        return s / max(float(s[-1]), 1.0)

    def sigma_ratio(self, lam: float) -> float:
        return float(self.singular_values(lam)[0])

    def null_space(self, lam: float, dim: int) -> np.ndarray:
        """``dim`` approximate null vectors in raw coefficient units, as columns."""
        m, col = self.equilibrated(lam)
        _, _, vt = np.linalg.svd(m)
        vecs = vt[-dim:][::-1].T
        return vecs / col[:, None]

    def null_dimension(self, lam: float, rel_tol: float) -> int:
        s = self.singular_values(lam)
        return int(np.count_nonzero(s < rel_tol))


def _build(g: MetricGraph) -> SecularSystem:
    eidx = {e.id: i for i, e in enumerate(g.edges)}
    rows, edges, ends, kinds, coefs = [], [], [], [], []
    r = 0

    def term(row, end, kind, coef):
        rows.append(row)
        edges.append(eidx[end.edge])
        ends.append(end.end)
        kinds.append(kind)
        coefs.append(coef)

    for v in g.vertices:
        vends = g.ends_at(v.id)
        if not vends:
            continue
        cond = v.condition
        if cond.is_dirichlet:
            for end in vends:
                term(r, end, 0, 1.0)
                r += 1
            continue
        first = vends[0]
        for end in vends[1:]:
            term(r, end, 0, 1.0)
            term(r, first, 0, -1.0)
            r += 1
        for end in vends:
            term(r, end, 1, 1.0)
        if cond.is_delta:
            term(r, first, 0, float(cond.gamma))
        r += 1
    assert r == 2 * g.num_edges
    return SecularSystem(
        edge_ids=tuple(e.id for e in g.edges),
        lengths=np.array([e.length for e in g.edges], dtype=float),
        t_row=np.array(rows, dtype=np.int64),
        t_edge=np.array(edges, dtype=np.int64),
        t_end=np.array(ends, dtype=np.int64),
        t_kind=np.array(kinds, dtype=np.int64),
        t_coef=np.array(coefs, dtype=float),
    )


@lru_cache(maxsize=256)
def secular_system(g: MetricGraph) -> SecularSystem:
    return _build(g)


def secular_determinant(g: MetricGraph, lam: float) -> tuple[float, float]:
    """Secular determinant at ``lam`` as ``(mantissa, log_scale)``.

    The mantissa has the sign of the determinant and modulus at most one
    (rows and columns are equilibrated first), so ``value == 0`` up to
    rounding exactly at eigenvalues.
    """
    return secular_system(g).determinant(lam)


def to_scan_variable(lam: float) -> float:
    """``t = sign(lam) sqrt(|lam|)``; the scan runs uniformly in ``t``."""
    return math.copysign(math.sqrt(abs(lam)), lam)


def from_scan_variable(t: float) -> float:
    return t * abs(t)
