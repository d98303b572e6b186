"""Lower bounds on the spectral gap of all-natural graphs in terms of the total
length, the doubly connected part, the circumference and the girth."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from typing import Sequence

from . import errors
from .graph import MetricGraph
from .spectrum import SolverConfig, spectral_gap
from .topology import (
    circumference,
    doubly_connected_part,
    dumbbell_graph,
    girth,
    tadpole_graph,
)


@dataclass(frozen=True)
class BoundReport:
    L: float
    V_total: float
    V_largest_component: float
    circumference: float | None
    girth: float
    nicaise: float
    band_levy_applicable: bool
    band_levy: float | None
    dumbbell_bound: float
    tadpole_bound: float
    circumference_bound: float | None
    girth_bound: float | None
    lambda2: float
    margins: dict[str, float]
    notes: list[str] = field(default_factory=list)

    @property
    def worst_margin(self) -> float:
        return min(self.margins.values())

    def to_dict(self) -> dict:
        return asdict(self)


@lru_cache(maxsize=4096)
def _gap_cached(kind: str, a: float, L: float, cfg: SolverConfig) -> float:
    g = dumbbell_graph(a / 2, a / 2, L) if kind == "dumbbell" else tadpole_graph(L, a)
    return spectral_gap(g, cfg)


def dumbbell_gap(V: float, L: float, cfg: SolverConfig | None = None) -> float:
    """Gap of the dumbbell of total length ``L`` with two loops of length ``V/2``."""
    return _gap_cached("dumbbell", float(V), float(L), cfg or SolverConfig())


def tadpole_gap(V: float, L: float, cfg: SolverConfig | None = None) -> float:
    """Gap of the tadpole of total length ``L`` with loop length ``V``."""
    return _gap_cached("tadpole", float(V), float(L), cfg or SolverConfig())


def _clip(V: float, L: float) -> float:
    # sums of edge lengths may overshoot L by rounding
    return min(max(V, 0.0), L)


def lower_bounds(g: MetricGraph, cfg: SolverConfig | None = None) -> BoundReport:
    """Every lower bound on ``lambda_2`` together with ``lambda_2`` and the margins."""
    cfg = cfg or SolverConfig()
    if not g.is_connected:
        raise errors.Disconnected("bounds need a connected graph")
    if not g.is_all_natural:
        raise errors.NotAllNatural("bounds hold for natural conditions only")
    L = g.total_length
    dcp = doubly_connected_part(g)
    V = _clip(dcp.total_length, L)
    V_big = _clip(dcp.largest_component_length, L)
    notes: list[str] = []
    try:
        circ: float | None = _clip(circumference(g), L)
    except errors.TooManyEdgesForCircumference as exc:
        circ = None
        notes.append(f"circumference omitted: {exc}")
    s = girth(g)

    lam2 = spectral_gap(g, cfg)
    nicaise = math.pi**2 / L**2
    band_levy_ok = not dcp.bridges and abs(V - L) <= 1e-12 * L
    band_levy = 4 * math.pi**2 / L**2 if band_levy_ok else None
    db = dumbbell_gap(V, L, cfg)
    tp = tadpole_gap(V_big, L, cfg)
    cb = tadpole_gap(circ, L, cfg) if circ is not None else None
    gb = tadpole_gap(_clip(s, L), L, cfg)

    margins = {"nicaise": lam2 - nicaise, "dumbbell": lam2 - db, "tadpole": lam2 - tp, "girth": lam2 - gb}
    if band_levy is not None:
        margins["band_levy"] = lam2 - band_levy
    if cb is not None:
        margins["circumference"] = lam2 - cb
    return BoundReport(
        L=L,
        V_total=V,
        V_largest_component=V_big,
        circumference=circ,
        girth=s,
        nicaise=nicaise,
        band_levy_applicable=band_levy_ok,
        band_levy=band_levy,
        dumbbell_bound=db,
        tadpole_bound=tp,
        circumference_bound=cb,
        girth_bound=gb,
        lambda2=lam2,
        margins=margins,
        notes=notes,
    )


@dataclass(frozen=True)
class InterpolationRow:
    V: float
    dumbbell: float
    tadpole: float


@dataclass(frozen=True)
class InterpolationTable:
    L: float
    rows: list[InterpolationRow]
    monotone: bool
    tadpole_above: bool
    endpoints_ok: bool
    max_endpoint_error: float

    @property
    def ok(self) -> bool:
        return self.monotone and self.tadpole_above and self.endpoints_ok

    def to_csv(self) -> str:
        from .io import fmt

        lines = ["V,dumbbell,tadpole"]
        lines += [f"{fmt(r.V)},{fmt(r.dumbbell)},{fmt(r.tadpole)}" for r in self.rows]
        return "\n".join(lines) + "\n"


def interpolation_check(
    L: float, grid: Sequence[float], cfg: SolverConfig | None = None, tol: float = 1e-6
) -> InterpolationTable:
    """Tabulate the dumbbell and tadpole gaps over ``V``.

    Both columns must be nondecreasing in ``V``, the tadpole column must lie
    above the dumbbell one, and at ``V = 0`` and ``V = L`` the values must equal
    ``pi^2/L^2`` and ``4 pi^2/L^2``.
    """
    cfg = cfg or SolverConfig()
    if L <= 0:
        raise errors.BadSpec(f"L must be positive, got {L}")
    vs = sorted(float(v) for v in grid)
    if any(v < 0 or v > L for v in vs):
        raise errors.BadSpec("grid values must lie in [0, L]")
    rows = [InterpolationRow(v, dumbbell_gap(v, L, cfg), tadpole_gap(v, L, cfg)) for v in vs]
    monotone = all(
        b.dumbbell >= a.dumbbell - tol and b.tadpole >= a.tadpole - tol for a, b in zip(rows, rows[1:])
    )
    above = all(r.tadpole >= r.dumbbell - tol for r in rows)
    err = 0.0
    for r in rows:
        if r.V == 0:
            err = max(err, abs(r.dumbbell - math.pi**2 / L**2), abs(r.tadpole - math.pi**2 / L**2))
        if r.V == L:
            err = max(err, abs(r.dumbbell - 4 * math.pi**2 / L**2), abs(r.tadpole - 4 * math.pi**2 / L**2))
    return InterpolationTable(L, rows, monotone, above, err <= tol, err)
