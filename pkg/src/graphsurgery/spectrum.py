"""Eigenvalues and eigenfunctions of the graph Laplacian.

Two stages: a P1 finite-element solve localises the eigenvalues, then each
one is pinned down as a root of the secular determinant and its
eigenfunctions are read off the null space of the secular matrix.  Scanning
happens in ``t = sign(lam) sqrt(|lam|)``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Mapping

import numpy as np
from scipy.optimize import minimize_scalar

from . import errors
from .fem import dispersion_corrected, fem_eigenpairs
from .graph import MetricGraph
from .secular import SecularSystem, from_scan_variable, secular_system, to_scan_variable

log = logging.getLogger(__name__)

# sigma_min / sigma_max below which a local minimum counts as a root
EVEN_ROOT_SIGMA = 1e-10
# singular values of a root this small ask for polishing by minimisation
POLISH_SIGMA = 1e-4


@dataclass(frozen=True)
class SolverConfig:
    mesh_points_per_unit_length: int = 32
    num_eigenvalues: int = 10
    refine: bool = True
    eig_abs_tol: float = 1e-9
    cluster_rel_tol: float = 1e-6
    k_scan_step: float = 0.01

    def __post_init__(self) -> None:
        if self.mesh_points_per_unit_length < 8:
            raise ValueError("mesh_points_per_unit_length must be >= 8")
        if self.num_eigenvalues < 1:
            raise ValueError("num_eigenvalues must be >= 1")
        for name in ("eig_abs_tol", "cluster_rel_tol", "k_scan_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not self.cluster_rel_tol > self.eig_abs_tol:
            raise ValueError("cluster_rel_tol must exceed eig_abs_tol")

    def with_(self, **changes) -> SolverConfig:
        return replace(self, **changes)


class Regime(str, Enum):
    OSCILLATORY = "oscillatory"
    LINEAR = "linear"
    HYPERBOLIC = "hyperbolic"


class Method(str, Enum):
    FEM_ONLY = "FemOnly"
    SECULAR_REFINED = "SecularRefined"


def regime_of(lam: float) -> Regime:
    if lam > 0:
        return Regime.OSCILLATORY
    if lam < 0:
        return Regime.HYPERBOLIC
    return Regime.LINEAR


@dataclass(frozen=True)
class EdgeCoefficients:
    """``psi = a cos(kx) + b sin(kx)``, ``a + b x`` or ``a cosh(kx) + b sinh(kx)``."""

    regime: Regime
    a: float
    b: float


@dataclass(frozen=True)
class EigenPair:
    lam: float
    coefficients: Mapping[str, EdgeCoefficients]
    lengths: Mapping[str, float]
    l2_norm: float = 1.0

    @property
    def wavenumber(self) -> float:
        return math.sqrt(abs(self.lam))

    def _check(self, e: str, x):
        if e not in self.coefficients:
            raise errors.MissingEdge(f"no edge {e!r} in eigenpair")
        ell = self.lengths[e]
        xa = np.asarray(x, dtype=float)
        tol = 1e-12 * max(1.0, ell)
        if np.any(xa < -tol) or np.any(xa > ell + tol):
            raise errors.OutOfRange(f"x outside [0, {ell}] on edge {e!r}")
        return self.coefficients[e], np.clip(xa, 0.0, ell)

    def evaluate(self, e: str, x):
        """``(value, derivative)`` at ``x`` (scalar or array) on edge ``e``."""
        c, xa = self._check(e, x)
        k = self.wavenumber
        if c.regime is Regime.OSCILLATORY:
            cs, sn = np.cos(k * xa), np.sin(k * xa)
            val = c.a * cs + c.b * sn
            der = k * (c.b * cs - c.a * sn)
        elif c.regime is Regime.HYPERBOLIC:
            ch, sh = np.cosh(k * xa), np.sinh(k * xa)
            val = c.a * ch + c.b * sh
            der = k * (c.a * sh + c.b * ch)
        else:
            val = c.a + c.b * xa
            der = c.b + 0.0 * xa
        if np.ndim(val) == 0:
            return float(val), float(der)
        return val, der

    def value(self, e: str, x):
        return self.evaluate(e, x)[0]

    def derivative(self, e: str, x):
        return self.evaluate(e, x)[1]

    def slope(self, e: str) -> float:
        """``psi'(0)`` on edge ``e``."""
        return self.evaluate(e, 0.0)[1]

    def end_value(self, end) -> float:
        e, j = end
        return self.evaluate(e, self.lengths[e] if j else 0.0)[0]

    def outward_derivative(self, end) -> float:
        e, j = end
        d = self.evaluate(e, self.lengths[e] if j else 0.0)[1]
        return d if j else -d

    def sup_norm(self) -> float:
        best = 0.0
        for e in self.coefficients:
            best = max(best, float(np.max(np.abs(self.value(e, _extremum_grid(self, e))))))
        return best

    def scaled(self, factor: float) -> EigenPair:
        coeffs = {
            e: EdgeCoefficients(c.regime, c.a * factor, c.b * factor)
            for e, c in self.coefficients.items()
        }
        return EigenPair(self.lam, coeffs, dict(self.lengths), self.l2_norm * abs(factor))


def coefficients_from_value_slope(lam: float, a: float, s: float) -> EdgeCoefficients:
    """Coefficients for ``psi(0) = a``, ``psi'(0) = s``."""
    reg = regime_of(lam)
    if reg is Regime.LINEAR:
        return EdgeCoefficients(reg, float(a), float(s))
    return EdgeCoefficients(reg, float(a), float(s) / math.sqrt(abs(lam)))


def _extremum_grid(p: EigenPair, e: str) -> np.ndarray:
    """Endpoints plus interior critical points of the edge function."""
    ell = p.lengths[e]
    c = p.coefficients[e]
    pts = [0.0, ell]
    k = p.wavenumber
    if c.regime is Regime.OSCILLATORY and (c.a or c.b):
        phi = math.atan2(c.b, c.a)
        n0 = math.ceil(-phi / math.pi - 1e-12)
        n = n0
        while True:
            x = (phi + n * math.pi) / k
            if x > ell:
                break
            if x >= 0:
                pts.append(x)
            n += 1
    elif c.regime is Regime.HYPERBOLIC and abs(c.b) < abs(c.a):
        x = math.atanh(-c.b / c.a) / k
        if 0 < x < ell:
            pts.append(x)
    return np.array(sorted(pts))


def eval_eigenfunction(p: EigenPair, e: str, x: float) -> tuple[float, float]:
    return p.evaluate(e, x)


# quadrature


def _gauss(n: int):
    return np.polynomial.legendre.leggauss(n)


def edge_quadrature(ell: float, t: float):
    """Gauss-Legendre nodes/weights on ``[0, ell]`` fine enough for
    products of two edge functions with wavenumber ``|t|``."""
    n = 16 + int(math.ceil(2.0 * abs(t) * ell))
    xg, wg = _gauss(min(n, 400))
    return 0.5 * ell * (xg + 1.0), 0.5 * ell * wg


def _basis_values(lam: float, x: np.ndarray):
    if lam > 0:
        k = math.sqrt(lam)
        return np.cos(k * x), np.sin(k * x) / k
    if lam < 0:
        k = math.sqrt(-lam)
        return np.cosh(k * x), np.sinh(k * x) / k
    return np.ones_like(x), x.copy()


def _gram(lam: float, lengths: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """L2 Gram matrix of the functions with raw coefficient columns ``vecs``."""
    t = to_scan_variable(lam)
    m = vecs.shape[1]
    G = np.zeros((m, m))
    for i, ell in enumerate(lengths):
        xq, wq = edge_quadrature(ell, t)
        C, S = _basis_values(lam, xq)
        vals = np.outer(C, vecs[2 * i]) + np.outer(S, vecs[2 * i + 1])
        G += vals.T @ (wq[:, None] * vals)
    return G


def _sample_matrix(g: MetricGraph, lam: float, vecs: np.ndarray) -> np.ndarray:
    """Values at the deterministic sample points: vertices (in order), then
    six interior points per edge."""
    eidx = {e.id: i for i, e in enumerate(g.edges)}
    rows = []
    for v in g.vertices:
        ends = g.ends_at(v.id)
        if not ends:
            continue
        e, j = ends[0]
        i = eidx[e]
        x = g.edges[i].length if j else 0.0
        C, S = _basis_values(lam, np.array([x]))
        rows.append(C[0] * vecs[2 * i] + S[0] * vecs[2 * i + 1])
    for i, e in enumerate(g.edges):
        xs = e.length * np.arange(1, 7) / 7.0
        C, S = _basis_values(lam, xs)
        rows.extend(np.outer(C, vecs[2 * i]) + np.outer(S, vecs[2 * i + 1]))
    return np.array(rows)


def canonical_basis(samples: np.ndarray, rel_tol: float = 1e-6) -> np.ndarray:
    """Orthogonal ``m x m`` change of basis fixing a deterministic basis.

    ``samples`` holds the values of an L2-orthonormal basis at ordered sample
    points.  The first new function is the unit combination with the largest
    value at the first sample where the span does not vanish; the next one
    repeats this inside the orthogonal complement, and so on.  Each chosen
    function is positive at its sample point.
    """
    m = samples.shape[1]
    scale = float(np.max(np.linalg.norm(samples, axis=1))) if samples.size else 0.0
    basis: list[np.ndarray] = []
    for row in samples:
        if len(basis) == m:
            break
        r = row.copy()
        for b in basis:
            r -= (r @ b) * b
        nr = np.linalg.norm(r)
        if nr > rel_tol * scale:
            basis.append(r / nr)
    # complete with anything orthogonal (only if samples were degenerate)
    eye = np.eye(m)
    for col in eye:
        if len(basis) == m:
            break
        r = col.copy()
        for b in basis:
            r -= (r @ b) * b
        nr = np.linalg.norm(r)
        if nr > 1e-8:
            basis.append(r / nr)
    return np.array(basis).T


def _orthonormal_pairs(
    g: MetricGraph, lam: float, vecs: np.ndarray, rel_tol: float
) -> list[EigenPair]:
    lengths = np.array([e.length for e in g.edges])
    G = _gram(lam, lengths, vecs)
    G = 0.5 * (G + G.T)
    w, U = np.linalg.eigh(G)
    if w[0] <= 1e-300:
        raise errors.SolverFailure("zero eigenfunction from secular null space")
    ortho = vecs @ (U / np.sqrt(w))
    R = canonical_basis(_sample_matrix(g, lam, ortho), rel_tol)
    final = ortho @ R
    edge_len = {e.id: e.length for e in g.edges}
    pairs = []
    for j in range(final.shape[1]):
        coeffs = {
            e.id: coefficients_from_value_slope(lam, final[2 * i, j], final[2 * i + 1, j])
            for i, e in enumerate(g.edges)
        }
        pairs.append(EigenPair(float(lam), coeffs, edge_len, 1.0))
    return pairs


def _natural_constants(g: MetricGraph) -> np.ndarray:
    """Raw coefficient vectors of the component constants of all-natural components."""
    eidx = {e.id: i for i, e in enumerate(g.edges)}
    cols = []
    for verts, edges in g.components():
        if not edges or not all(g.condition(v).is_natural for v in verts):
            continue
        vec = np.zeros(2 * g.num_edges)
        for e in edges:
            vec[2 * eidx[e]] = 1.0
        cols.append(vec)
    return np.array(cols).T if cols else np.zeros((2 * g.num_edges, 0))


def eigenpairs_at(g: MetricGraph, lam: float, mult: int, cfg: SolverConfig) -> list[EigenPair]:
    """Orthonormal, canonically ordered eigenfunctions for a known eigenvalue."""
    if lam == 0.0:
        consts = _natural_constants(g)
        if consts.shape[1] == mult:
            return _orthonormal_pairs(g, 0.0, consts, cfg.cluster_rel_tol)
    vecs = secular_system(g).null_space(lam, mult)
    return _orthonormal_pairs(g, lam, vecs, cfg.cluster_rel_tol)


# root finding


@dataclass
class _Root:
    t: float
    width: float
    mult: int


def _polish(sys: SecularSystem, lo: float, mid: float, hi: float) -> tuple[float, float]:
    """Minimise sigma_min over ``[lo, hi]`` starting from ``mid``.

    sigma_min has a V-shaped (not smooth) minimum at a root, so Brent's
    parabolic steps stall near 1e-12; golden section gets to rounding level.
    """
    f = lambda t: sys.sigma_ratio(from_scan_variable(t))  # noqa: E731
    flo, fmid, fhi = f(lo), f(mid), f(hi)
    if not (fmid < flo and fmid < fhi):
        res = minimize_scalar(f, bounds=(lo, hi), method="bounded",
                              options={"xatol": 1e-14 * max(1.0, abs(mid))})
        lo, mid, hi = (max(lo, res.x - 1e-6), res.x, min(hi, res.x + 1e-6))
        fmid = float(res.fun)
        if not (lo < mid < hi and fmid < f(lo) and fmid < f(hi)):
            return float(res.x), fmid
    res = minimize_scalar(f, bracket=(lo, mid, hi), method="golden",
                          options={"xtol": 4e-16, "maxiter": 200})
    return float(res.x), float(res.fun)


def _roots_in_window(
    sys: SecularSystem, tl: float, th: float, step: float, cfg: SolverConfig
) -> list[_Root]:
    n = max(3, int(math.ceil((th - tl) / step)) + 1)
    ts = np.linspace(tl, th, n)
    if tl < 0.0 < th and not np.any(ts == 0.0):
        ts = np.sort(np.append(ts, 0.0))
    f = sys.scan(ts)
    found: list[tuple[float, float]] = []
    xtol_rel = 2e-15

    # exact zeros on the grid and sign changes
    for i in range(len(ts)):
        if f[i] == 0.0:
            found.append((ts[i], 0.0))
    for i in range(len(ts) - 1):
        a, b = f[i], f[i + 1]
        if a == 0.0 or b == 0.0 or (a > 0) == (b > 0):
            continue
        xtol = xtol_rel * max(1.0, abs(ts[i]), abs(ts[i + 1]))
        r, w = sys.bisect(ts[i], ts[i + 1], a, xtol)
        found.append((r, w))

    # local minima of |f| without a sign change nearby: even-order roots
    af = np.abs(f)
    for i in range(1, len(ts) - 1):
        if not (af[i] <= af[i - 1] and af[i] <= af[i + 1]):
            continue
        lo, hi = ts[i - 1], ts[i + 1]
        if any(lo <= r <= hi for r, _ in found):
            continue
        tm, s = _polish(sys, lo, ts[i], hi)
        if s < EVEN_ROOT_SIGMA:
            found.append((tm, 1e-14 * max(1.0, abs(tm))))
    # and at the window ends, where a double root just outside could hide
    for i, j in ((0, 1), (len(ts) - 1, len(ts) - 2)):
        if af[i] < af[j] and not any(min(ts[i], ts[j]) <= r <= max(ts[i], ts[j]) for r, _ in found):
            d = abs(ts[j] - ts[i])
            tm, s = _polish(sys, ts[i] - d, ts[i], ts[i] + d)
            if s < EVEN_ROOT_SIGMA and tl <= tm <= th:
                found.append((tm, 1e-14 * max(1.0, abs(tm))))

    found.sort()
    roots: list[_Root] = []
    for t, w in found:
        lam = from_scan_variable(t)
        sv = sys.singular_values(lam)
        if sv.size > 1 and sv[1] < POLISH_SIGMA:
            # odd multiple root: bisection is only accurate to eps^(1/m);
            # sigma_min is linear in the distance to the root, so minimise it
            half = max(1e-6 * max(1.0, abs(t)), 10 * w)
            t, _ = _polish(sys, t - half, t, t + half)
            w = 1e-14 * max(1.0, abs(t))
            lam = from_scan_variable(t)
            sv = sys.singular_values(lam)
        mult = int(np.count_nonzero(sv < cfg.cluster_rel_tol))
        if mult == 0:
            # a sign change across a pole-free cancellation can't happen for an
            # entire determinant; a failed sigma test means we are not close enough
            mult = 1
        if roots and abs(t - roots[-1].t) <= 1e-9 * max(1.0, abs(t)):
            if mult > roots[-1].mult:
                roots[-1] = _Root(t, w, mult)
            continue
        roots.append(_Root(t, w, mult))
    return roots


def _snap_zero(lam: float, cfg: SolverConfig) -> float:
    return 0.0 if abs(lam) <= cfg.eig_abs_tol else lam


def _lam_error(t: float, width: float) -> float:
    lam = from_scan_variable(t)
    return max(2.0 * abs(t) * width + width * width, 4e-16 * max(1.0, abs(lam)))


def refine_eigenvalue(
    g: MetricGraph, lambda_approx: float, cfg: SolverConfig | None = None
) -> tuple[float, int]:
    """Nearest secular root within ``3 * k_scan_step`` (in ``t``) of the guess."""
    cfg = cfg or SolverConfig()
    sys = secular_system(g)
    t0 = to_scan_variable(lambda_approx)
    half = 3.0 * cfg.k_scan_step
    roots = _roots_in_window(sys, t0 - half, t0 + half, cfg.k_scan_step / 4.0, cfg)
    if not roots:
        raise errors.NoRootInBracket(f"no eigenvalue within {half} of sqrt-scale {t0:.6g}")
    best = min(roots, key=lambda r: abs(r.t - t0))
    return _snap_zero(from_scan_variable(best.t), cfg), best.mult


# spectrum


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: list[tuple[float, int]]
    pairs: list[EigenPair]
    accuracy: list[float]
    method: Method
    truncated: bool = False
    warnings: list[str] = field(default_factory=list)

    @property
    def values(self) -> list[float]:
        """Eigenvalues repeated by multiplicity."""
        return [p.lam for p in self.pairs]

    def lam(self, k: int) -> float:
        """``lambda_k`` with 1-based ``k``."""
        return self.pairs[k - 1].lam

    def pair(self, k: int) -> EigenPair:
        return self.pairs[k - 1]

    def multiplicity_of(self, k: int) -> int:
        lam = self.lam(k)
        for v, m in self.eigenvalues:
            if v == lam:
                return m
        return 1

    def abs_errors(self) -> list[float]:
        """Per-pair error estimate (accuracy is stored per cluster)."""
        out = []
        for (_, m), acc in zip(self.eigenvalues, self.accuracy):
            out.extend([acc] * m)
        return out

    def to_dict(self) -> dict:
        return {
            "eigenvalues": [
                {"lambda": lam, "multiplicity": m, "abs_err": acc}
                for (lam, m), acc in zip(self.eigenvalues, self.accuracy)
            ],
            "method": self.method.value,
        }


def _extra_count(n: int) -> int:
    return max(4, n // 2)


def _cluster(values: list[float], rel_tol: float) -> list[list[int]]:
    groups: list[list[int]] = []
    for i, v in enumerate(values):
        if groups and abs(v - values[groups[-1][0]]) <= rel_tol * max(1.0, abs(v)):
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def solve_spectrum(g: MetricGraph, cfg: SolverConfig | None = None) -> Spectrum:
    """Lowest ``cfg.num_eigenvalues`` eigenvalues (with multiplicity) and eigenpairs."""
    cfg = cfg or SolverConfig()
    if g.num_edges == 0:
        raise errors.EmptyGraph("graph has no edges")
    n = cfg.num_eigenvalues
    want = n + _extra_count(n)
    lam_h, vecs, mesh = fem_eigenpairs(g, cfg.mesh_points_per_unit_length, want)
    if lam_h.size < n:
        raise errors.SolverFailure(
            f"mesh too coarse: {lam_h.size} discrete eigenvalues for {n} requested"
        )
    if not cfg.refine:
        return _fem_only(g, cfg, lam_h, vecs, mesh)

    sys = secular_system(g)
    step = cfg.k_scan_step
    windows = []
    for lh in lam_h:
        th = to_scan_variable(lh)
        tc = to_scan_variable(dispersion_corrected(lh, mesh.h_max))
        gap = max(0.0, th - tc)
        windows.append([tc - 3 * step - 0.1 * gap, th + 3 * step])
    merged: list[list] = []  # [lo, hi, count]
    for lo, hi in windows:
        if merged and lo <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], hi)
            merged[-1][2] += 1
        else:
            merged.append([lo, hi, 1])

    clusters: list[tuple[float, int, float]] = []  # (lam, mult, err)
    warnings: list[str] = []
    fem_fallback: list[int] = []
    for wi, (lo, hi, count) in enumerate(merged):
        last = wi == len(merged) - 1
        roots = None
        for refine_level in (1, 4, 16):
            cand = _roots_in_window(sys, lo, hi, step / refine_level, cfg)
            total = sum(r.mult for r in cand)
            if total == count or (last and total >= count):
                roots = cand
                break
        if roots is None:
            msg = (
                f"secular roots in [{from_scan_variable(lo):.6g}, {from_scan_variable(hi):.6g}] "
                f"do not match the FEM count {count}; kept FEM values there"
            )
            log.warning(msg)
            warnings.append(msg)
            start = sum(c for _, _, c in merged[:wi])
            fem_fallback.extend(range(start, start + count))
            for grp in _cluster(list(lam_h[start:start + count]), cfg.cluster_rel_tol):
                lh = float(np.mean(lam_h[start + grp[0]:start + grp[-1] + 1]))
                clusters.append((lh, len(grp), abs(lh - dispersion_corrected(lh, mesh.h_max))))
            continue
        for r in roots:
            lam = _snap_zero(from_scan_variable(r.t), cfg)
            clusters.append((lam, r.mult, _lam_error(r.t, r.width)))

    clusters.sort(key=lambda c: c[0])
    eigenvalues: list[tuple[float, int]] = []
    accuracy: list[float] = []
    pairs: list[EigenPair] = []
    truncated = False
    for lam, mult, err in clusters:
        if len(pairs) >= n:
            break
        take = min(mult, n - len(pairs))
        truncated = truncated or take < mult
        ps = _pairs_for_cluster(g, lam, mult, cfg, lam_h, vecs, mesh, fem_fallback)
        pairs.extend(ps[:take])
        eigenvalues.append((lam, take))
        accuracy.append(err)
    if len(pairs) < n:
        raise errors.SolverFailure(f"only {len(pairs)} of {n} eigenvalues resolved")
    return Spectrum(eigenvalues, pairs, accuracy, Method.SECULAR_REFINED, truncated, warnings)


def _pairs_for_cluster(g, lam, mult, cfg, lam_h, vecs, mesh, fem_fallback) -> list[EigenPair]:
    if fem_fallback:
        idx = [i for i in fem_fallback if abs(lam_h[i] - lam) <= cfg.cluster_rel_tol * max(1, abs(lam)) + 1e-12]
        if len(idx) == mult:
            return _fem_pairs(g, lam, vecs[:, idx], mesh, cfg)
    return eigenpairs_at(g, lam, mult, cfg)


def _fem_only(g, cfg, lam_h, vecs, mesh) -> Spectrum:
    n = cfg.num_eigenvalues
    groups = _cluster(list(lam_h), cfg.cluster_rel_tol)
    eigenvalues, accuracy, pairs = [], [], []
    truncated = False
    for grp in groups:
        if len(pairs) >= n:
            break
        lam = float(np.mean(lam_h[grp]))
        if abs(lam) <= cfg.eig_abs_tol:
            lam = 0.0
        take = min(len(grp), n - len(pairs))
        truncated = truncated or take < len(grp)
        ps = _fem_pairs(g, lam, vecs[:, grp], mesh, cfg)
        pairs.extend(ps[:take])
        eigenvalues.append((lam, take))
        accuracy.append(abs(float(lam_h[grp[0]]) - dispersion_corrected(float(lam_h[grp[0]]), mesh.h_max)))
    return Spectrum(eigenvalues, pairs, accuracy, Method.FEM_ONLY, truncated, [])


def _fem_pairs(g, lam, nodal: np.ndarray, mesh, cfg) -> list[EigenPair]:
    """Fit nodal FEM vectors edge by edge onto ``a C + s S`` at ``lam``."""
    cols = []
    for j in range(nodal.shape[1]):
        vec = np.zeros(2 * g.num_edges)
        for i, e in enumerate(g.edges):
            x = mesh.edge_x[e.id]
            C, S = _basis_values(lam, x)
            A = np.stack([C, S], axis=1)
            sol, *_ = np.linalg.lstsq(A, nodal[mesh.edge_nodes[e.id], j], rcond=None)
            vec[2 * i: 2 * i + 2] = sol
        cols.append(vec)
    return _orthonormal_pairs(g, lam, np.array(cols).T, cfg.cluster_rel_tol)


def mu(spec: Spectrum, g: MetricGraph) -> float:
    """Spectral gap: ``lambda_1`` if any vertex is Dirichlet or delta, else ``lambda_2``."""
    if not g.is_connected:
        raise errors.Disconnected("spectral gap needs a connected graph")
    if g.is_all_natural:
        if len(spec.pairs) < 2:
            raise ValueError("spectrum needs at least two eigenvalues")
        return spec.lam(2)
    return spec.lam(1)


def mu_index(g: MetricGraph) -> int:
    """1-based index of the spectral gap eigenvalue."""
    return 2 if g.is_all_natural else 1


def spectral_gap(g: MetricGraph, cfg: SolverConfig | None = None) -> float:
    """``mu(g)`` from a refined solve of just enough eigenvalues."""
    cfg = (cfg or SolverConfig()).with_(num_eigenvalues=mu_index(g))
    return mu(solve_spectrum(g, cfg), g)
