"""Loop-style kernels compiled with numba.

If numba is missing the decorator is the identity, so these stay importable
(and correct, just slow); the package then uses the numpy versions instead.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit as _njit

    def njit(fn):
        return _njit(cache=True)(fn)

except ImportError:  # pragma: no cover

    def njit(fn):
        return fn


@njit
def _basis(lam, x):
    if lam > 0.0:
        k = math.sqrt(lam)
        return math.cos(k * x), math.sin(k * x) / k
    if lam < 0.0:
        k = math.sqrt(-lam)
        return math.cosh(k * x), math.sinh(k * x) / k
    return 1.0, x


@njit
def _secular_matrix_loop(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    n = 2 * lengths.shape[0]
    m = np.zeros((n, n))
    for i in range(t_row.shape[0]):
        r = t_row[i]
        e = t_edge[i]
        c = t_coef[i]
        if t_end[i] == 0:
            if t_kind[i] == 0:
                m[r, 2 * e] += c
            else:
                m[r, 2 * e + 1] -= c
        else:
            cc, ss = _basis(lam, lengths[e])
            if t_kind[i] == 0:
                m[r, 2 * e] += c * cc
                m[r, 2 * e + 1] += c * ss
            else:
                m[r, 2 * e] -= c * lam * ss
                m[r, 2 * e + 1] += c * cc
    return m


@njit
def _column_scales(lam, lengths):
    """Smooth column scales; data-dependent scaling would hide a column
    that vanishes exactly at an eigenvalue."""
    ne = lengths.shape[0]
    col = np.empty(2 * ne)
    for e in range(ne):
        cc, ss = _basis(lam, lengths[e])
        col[2 * e] = math.sqrt(1.0 + cc * cc + lam * lam * ss * ss)
        col[2 * e + 1] = math.sqrt(1.0 + cc * cc + ss * ss)
    return col


@njit
def _secular_scaled_loop(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    """Equilibrated secular matrix, column scales and log of the removed factor.

    Each row is divided by the sum of the norms of its terms taken before
    any cancellation, so rows keep norm <= 1 (hence |det| <= 1) and a row
    that cancels to zero at an eigenvalue stays small.
    """
    n = 2 * lengths.shape[0]
    col = _column_scales(lam, lengths)
    m = np.zeros((n, n))
    rmag = np.zeros(n)
    for i in range(t_row.shape[0]):
        r = t_row[i]
        e = t_edge[i]
        c = t_coef[i]
        if t_end[i] == 0:
            if t_kind[i] == 0:
                ca, cs = 1.0, 0.0
            else:
                ca, cs = 0.0, -1.0
        else:
            cc, ss = _basis(lam, lengths[e])
            if t_kind[i] == 0:
                ca, cs = cc, ss
            else:
                ca, cs = -lam * ss, cc
        ca = c * ca / col[2 * e]
        cs = c * cs / col[2 * e + 1]
        m[r, 2 * e] += ca
        m[r, 2 * e + 1] += cs
        rmag[r] += math.sqrt(ca * ca + cs * cs)
    log_scale = 0.0
    for j in range(n):
        log_scale += math.log(col[j])
    for r in range(n):
        if rmag[r] > 0.0:
            for j in range(n):
                m[r, j] /= rmag[r]
            log_scale += math.log(rmag[r])
    return m, col, log_scale


@njit
def _lu_logdet_loop(a):
    """Sign and log|det| by LU with partial pivoting; destroys ``a``."""
    n = a.shape[0]
    sign = 1.0
    logabs = 0.0
    for k in range(n):
        p = k
        big = abs(a[k, k])
        for i in range(k + 1, n):
            v = abs(a[i, k])
            if v > big:
                big = v
                p = i
        if big == 0.0:
            return 0.0, -np.inf
        if p != k:
            for j in range(n):
                tmp = a[k, j]
                a[k, j] = a[p, j]
                a[p, j] = tmp
            sign = -sign
        piv = a[k, k]
        if piv < 0.0:
            sign = -sign
        logabs += math.log(abs(piv))
        for i in range(k + 1, n):
            f = a[i, k] / piv
            if f != 0.0:
                for j in range(k + 1, n):
                    a[i, j] -= f * a[k, j]
    return sign, logabs


@njit
def _secular_logdet_loop(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    m, _, log_scale = _secular_scaled_loop(lam, lengths, t_row, t_edge, t_end, t_kind, t_coef)
    sign, logabs = _lu_logdet_loop(m)
    if sign == 0.0:
        return 0.0, log_scale
    return sign * math.exp(logabs), log_scale


@njit
def _scan_secular_loop(ts, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    out = np.empty(ts.shape[0])
    for i in range(ts.shape[0]):
        t = ts[i]
        out[i] = _secular_logdet_loop(t * abs(t), lengths, t_row, t_edge, t_end, t_kind, t_coef)[0]
    return out


@njit
def _bisect_secular_loop(lo, hi, f_lo, xtol, maxiter, lengths, t_row, t_edge, t_end, t_kind, t_coef):
    """Bisection in the scan variable ``t`` (``lam = t|t|``) on a sign change.

    Returns ``(root, bracket_width)``.
    """
    for _ in range(maxiter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f = _secular_logdet_loop(mid * abs(mid), lengths, t_row, t_edge, t_end, t_kind, t_coef)[0]
        if f == 0.0:
            return mid, 0.0
        if (f > 0.0) == (f_lo > 0.0):
            lo = mid
            f_lo = f
        else:
            hi = mid
    return 0.5 * (lo + hi), hi - lo


@njit
def _p1_assemble_loop(n_int, h, nodes, offsets):
    """COO triplets of P1 stiffness and mass matrices.

    ``nodes[offsets[e]:offsets[e+1]]`` are the global node numbers along edge
    ``e`` (``n_int[e] + 1`` of them), ``h[e]`` the uniform interval size.
    """
    total = 0
    for e in range(n_int.shape[0]):
        total += 4 * n_int[e]
    rows = np.empty(total, dtype=np.int64)
    cols = np.empty(total, dtype=np.int64)
    kv = np.empty(total)
    mv = np.empty(total)
    p = 0
    for e in range(n_int.shape[0]):
        he = h[e]
        k0 = 1.0 / he
        m0 = he / 6.0
        base = offsets[e]
        for i in range(n_int[e]):
            a = nodes[base + i]
            b = nodes[base + i + 1]
            rows[p] = a
            cols[p] = a
            kv[p] = k0
            mv[p] = 2.0 * m0
            rows[p + 1] = b
            cols[p + 1] = b
            kv[p + 1] = k0
            mv[p + 1] = 2.0 * m0
            rows[p + 2] = a
            cols[p + 2] = b
            kv[p + 2] = -k0
            mv[p + 2] = m0
            rows[p + 3] = b
            cols[p + 3] = a
            kv[p + 3] = -k0
            mv[p + 3] = m0
            p += 4
    return rows, cols, kv, mv


@njit
def _find(parent, x):
    while parent[x] != x:
        parent[x] = parent[parent[x]]
        x = parent[x]
    return x


@njit
def _mask_connected(mask, eu, ev, nverts):
    parent = np.arange(nverts)
    used = np.zeros(nverts, dtype=np.bool_)
    for j in range(eu.shape[0]):
        if (mask >> j) & 1:
            a = _find(parent, eu[j])
            b = _find(parent, ev[j])
            used[eu[j]] = True
            used[ev[j]] = True
            if a != b:
                parent[b] = a
    root = -1
    for v in range(nverts):
        if used[v]:
            r = _find(parent, v)
            if root == -1:
                root = r
            elif r != root:
                return False
    return True


@njit
def _max_even_subgraph_loop(basis, lengths, eu, ev, nverts):
    """Longest connected even subgraph via Gray-code walk of the cycle space.

    ``basis`` holds the cycle-space basis as edge bitmasks.  Returns
    ``(best_length, best_mask)``.
    """
    d = basis.shape[0]
    ne = lengths.shape[0]
    best = 0.0
    best_mask = np.int64(0)
    mask = np.int64(0)
    for i in range(1, np.int64(1) << d):
        # bit that flips between gray(i-1) and gray(i)
        j = 0
        while not ((i >> j) & 1):
            j += 1
        mask ^= basis[j]
        total = 0.0
        for q in range(ne):
            if (mask >> q) & 1:
                total += lengths[q]
        if total > best + 1e-15 * (1.0 + best):
            if _mask_connected(mask, eu, ev, nverts):
                best = total
                best_mask = mask
    return best, best_mask


