"""JSON and CSV formats: graphs, spectra, surgery results and eigenfunction samples."""

from __future__ import annotations

import csv
import io as _io
import json
import math
from pathlib import Path
from typing import Any

import numpy as np

from . import errors
from .graph import DIRICHLET, NATURAL, Edge, MetricGraph, Vertex, delta, raise_if_invalid

SIG = 12


def fmt(x: float) -> str:
    """Number formatted to 12 significant digits, locale independent."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if math.isnan(x):
        return "nan"
    s = f"{x:.{SIG}g}"
    return "0" if s in ("-0", "0") else s


def rounded(x: float) -> float:
    """``x`` rounded to 12 significant digits (for JSON output)."""
    x = float(x)
    if not math.isfinite(x) or x == 0.0:
        return 0.0 if x == 0.0 else x
    return float(f"{x:.{SIG}g}")


# graphs


def condition_to_json(c) -> Any:
    if c.is_delta:
        return {"delta": c.gamma}
    return c.kind.value


def condition_from_json(obj) -> Any:
    if obj is None or obj == "natural":
        return NATURAL
    if obj == "dirichlet":
        return DIRICHLET
    if isinstance(obj, dict) and set(obj) == {"delta"}:
        try:
            gam = float(obj["delta"])
        except (TypeError, ValueError) as exc:
            raise errors.ParseError(f"bad delta strength {obj['delta']!r}") from exc
        return delta(gam)
    raise errors.ParseError(f"unknown vertex condition {obj!r}")


def graph_to_dict(g: MetricGraph) -> dict:
    return {
        "vertices": [{"id": v.id, "condition": condition_to_json(v.condition)} for v in g.vertices],
        "edges": [
            {"id": e.id, "from": e.endpoints[0], "to": e.endpoints[1], "length": e.length}
            for e in g.edges
        ],
    }


def graph_from_dict(obj: dict) -> MetricGraph:
    """Parse and validate the graph JSON object."""
    if not isinstance(obj, dict) or "vertices" not in obj or "edges" not in obj:
        raise errors.ParseError("graph JSON needs 'vertices' and 'edges'")
    try:
        verts = tuple(
            Vertex(str(v["id"]), condition_from_json(v.get("condition"))) for v in obj["vertices"]
        )
        edges = tuple(
            Edge(str(e["id"]), (str(e["from"]), str(e["to"])), float(e["length"]))
            for e in obj["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise errors.ParseError(f"malformed graph JSON: {exc}") from exc
    return raise_if_invalid(MetricGraph(verts, edges))


def dump_graph(g: MetricGraph) -> str:
    return json.dumps(graph_to_dict(g), indent=2)


def load_graph(path: str | Path) -> MetricGraph:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise errors.ParseError(f"{path}: invalid JSON ({exc})") from exc
    return graph_from_dict(obj)


# spectra and eigenfunctions


def spectrum_to_dict(spec) -> dict:
    return {
        "eigenvalues": [
            {"lambda": rounded(lam), "multiplicity": m, "abs_err": rounded(acc)}
            for (lam, m), acc in zip(spec.eigenvalues, spec.accuracy)
        ],
        "method": spec.method.value,
    }


def eigenfunction_csv(p, points_per_edge: int = 101) -> str:
    """CSV rows ``edge_id,x,value`` on a uniform grid of every edge."""
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["edge_id", "x", "value"])
    for e, ell in p.lengths.items():
        xs = np.linspace(0.0, ell, points_per_edge)
        vals = p.value(e, xs)
        for x, v in zip(xs, vals):
            w.writerow([e, fmt(x), fmt(v)])
    return buf.getvalue()


def surgery_result_to_dict(res) -> dict:
    return {
        "graph": graph_to_dict(res.graph),
        "vertex_map": {k: list(v) for k, v in res.vertex_map.items()},
        "edge_map": {k: list(v) for k, v in res.edge_map.items()},
        "notes": list(res.notes),
    }
