"""Hot loops, compiled with numba when available.

Each kernel has a numba version and a pure-numpy version with the same
signature.  The numba path is used unless numba is missing or the environment
variable ``GRAPHSURGERY_NO_NUMBA`` is set to something other than ``""``/``"0"``.
``get_backend(True/False)`` returns either set explicitly, which is what the
parity tests and the benchmark use.

Secular matrix layout: unknowns ``(a_e, s_e)`` per edge, where on edge ``e``
``psi(x) = a_e C(x) + s_e S(x)`` with the basis

    C = cos(kx),  S = sin(kx)/k       (lam = k^2 > 0)
    C = 1,        S = x               (lam = 0)
    C = cosh(kx), S = sinh(kx)/k      (lam = -k^2 < 0)

which is entire in ``lam``, so the determinant has no artefacts at 0.
Rows are described by "terms" ``(row, edge, end, kind, coef)``: ``kind`` 0
adds ``coef * psi(end)``, ``kind`` 1 adds ``coef * outward derivative at end``.
"""

from __future__ import annotations

import math
import os
import types

import numpy as np

_FLAG = "GRAPHSURGERY_NO_NUMBA"

try:
    import numba  # noqa: F401

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False


def numba_disabled() -> bool:
    return os.environ.get(_FLAG, "") not in ("", "0")


# ---------------------------------------------------------------------------
# numpy versions


def _basis_np(lam, x):
    x = np.asarray(x, dtype=float)
    if lam > 0.0:
        k = math.sqrt(lam)
        return np.cos(k * x), np.sin(k * x) / k
    if lam < 0.0:
        k = math.sqrt(-lam)
        return np.cosh(k * x), np.sinh(k * x) / k
    return np.ones_like(x), x.copy()


def _term_entries(lam, lengths, t_edge, t_end, t_kind, t_coef):
    cc, ss = _basis_np(lam, lengths[t_edge])
    at_one = t_end == 1
    val = t_kind == 0
    ca = np.where(at_one, np.where(val, cc, -lam * ss), np.where(val, 1.0, 0.0)) * t_coef
    cs = np.where(at_one, np.where(val, ss, cc), np.where(val, 0.0, -1.0)) * t_coef
    return ca, cs


def _secular_matrix_np(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    n = 2 * lengths.shape[0]
    m = np.zeros((n, n))
    ca, cs = _term_entries(lam, lengths, t_edge, t_end, t_kind, t_coef)
    np.add.at(m, (t_row, 2 * t_edge), ca)
    np.add.at(m, (t_row, 2 * t_edge + 1), cs)
    return m


def column_scales(lam, lengths):
    """Smooth column scales ``sqrt(1 + C^2 + lam^2 S^2)`` and ``sqrt(1 + C^2 + S^2)``.

    Data-dependent (max-abs) scaling would blow a column that vanishes at an
    eigenvalue back up to size one and hide the singularity.
    """
    cc, ss = _basis_np(lam, lengths)
    col = np.empty(2 * lengths.shape[0])
    col[0::2] = np.sqrt(1.0 + cc * cc + lam * lam * ss * ss)
    col[1::2] = np.sqrt(1.0 + cc * cc + ss * ss)
    return col


def _secular_scaled_np(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    n = 2 * lengths.shape[0]
    col = column_scales(lam, lengths)
    ca, cs = _term_entries(lam, lengths, t_edge, t_end, t_kind, t_coef)
    ca = ca / col[2 * t_edge]
    cs = cs / col[2 * t_edge + 1]
    m = np.zeros((n, n))
    np.add.at(m, (t_row, 2 * t_edge), ca)
    np.add.at(m, (t_row, 2 * t_edge + 1), cs)
    rmag = np.zeros(n)
    np.add.at(rmag, t_row, np.hypot(ca, cs))
    rmag[rmag == 0.0] = 1.0
    m /= rmag[:, None]
    return m, col, float(np.log(col).sum() + np.log(rmag).sum())


def _secular_logdet_np(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    m, _, log_scale = _secular_scaled_np(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef)
    sign, logabs = np.linalg.slogdet(m)
    if sign == 0.0:
        return 0.0, log_scale
    return float(sign * math.exp(logabs)), log_scale


def _scan_secular_np(ts, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    ts = np.asarray(ts, dtype=float)
    if ts.size == 0:
        return np.empty(0)
    mats = np.stack(
        [_secular_scaled_np(t * abs(t), lengths, t_row, t_edge, t_end, t_kind, t_coef)[0] for t in ts]
    )
    sign, logabs = np.linalg.slogdet(mats)
    return sign * np.exp(logabs)


def _bisect_secular_np(lo, hi, f_lo, xtol, maxiter, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f = _secular_logdet_np(mid * abs(mid), lengths, t_row, t_edge, t_end, t_kind, t_coef)[0]
        if f == 0.0:
            return mid, 0.0
        if (f > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, f
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo


def _p1_assemble_np(n_int, h, nodes, offsets):
    n_int = np.asarray(n_int, dtype=np.int64)
    edge_of = np.repeat(np.arange(n_int.shape[0]), n_int)
    local = np.arange(edge_of.shape[0]) - np.repeat(np.cumsum(n_int) - n_int, n_int)
    a = nodes[offsets[edge_of] + local]
    b = nodes[offsets[edge_of] + local + 1]
    he = h[edge_of]
    k0 = 1.0 / he
    m0 = he / 6.0
    rows = np.stack([a, b, a, b], axis=1).ravel()
    cols = np.stack([a, b, b, a], axis=1).ravel()
    kv = np.stack([k0, k0, -k0, -k0], axis=1).ravel()
    mv = np.stack([2 * m0, 2 * m0, m0, m0], axis=1).ravel()
    return rows.astype(np.int64), cols.astype(np.int64), kv, mv


def _mask_connected_py(mask, eu, ev):
    parent: dict[int, int] = {}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for j in range(len(eu)):
        if (mask >> j) & 1:
            a, b = int(eu[j]), int(ev[j])
            parent.setdefault(a, a)
            parent.setdefault(b, b)
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[rb] = ra
    return len({find(v) for v in parent}) <= 1


def _max_even_subgraph_np(basis, lengths, eu, ev, nverts):
    masks = np.zeros(1, dtype=np.int64)
    for b in basis:
        masks = np.concatenate([masks, masks ^ b])
    totals = np.zeros(masks.shape[0])
    for q in range(lengths.shape[0]):
        totals += ((masks >> q) & 1) * lengths[q]
    for idx in np.argsort(-totals, kind="stable"):
        if masks[idx] == 0 or totals[idx] <= 0.0:
            break
        if _mask_connected_py(int(masks[idx]), eu, ev):
            return float(totals[idx]), np.int64(masks[idx])
    return 0.0, np.int64(0)


# ---------------------------------------------------------------------------
# backend selection

_numpy_backend = types.SimpleNamespace(
    name="numpy",
    secular_matrix=_secular_matrix_np,
    secular_scaled=_secular_scaled_np,
    secular_logdet=_secular_logdet_np,
    scan_secular=_scan_secular_np,
    bisect_secular=_bisect_secular_np,
    p1_assemble=_p1_assemble_np,
    max_even_subgraph=_max_even_subgraph_np,
)

_numba_backend = None


def _build_numba_backend():
    from . import _jit

    return types.SimpleNamespace(
        name="numba",
        secular_matrix=_jit._secular_matrix_loop,
        secular_scaled=_jit._secular_scaled_loop,
        secular_logdet=_jit._secular_logdet_loop,
        scan_secular=_jit._scan_secular_loop,
        bisect_secular=_jit._bisect_secular_loop,
        p1_assemble=_jit._p1_assemble_loop,
        max_even_subgraph=_jit._max_even_subgraph_loop,
    )


def get_backend(use_numba: bool | None = None):
    """Kernel namespace; ``None`` picks numba unless disabled or missing."""
    global _numba_backend
    if use_numba is None:
        use_numba = HAVE_NUMBA and not numba_disabled()
    if not use_numba:
        return _numpy_backend
    if not HAVE_NUMBA:
        raise RuntimeError("numba is not installed")
    if _numba_backend is None:
        _numba_backend = _build_numba_backend()
    return _numba_backend


def active_backend_name() -> str:
    return get_backend().name
