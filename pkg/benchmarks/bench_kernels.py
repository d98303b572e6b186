"""Numba kernels against their numpy fallbacks.

Times the determinant scan, FEM assembly and the even-subgraph search on fixed
graphs, checks that both backends agree, and prints one line per kernel.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from graphsurgery._kernels import HAVE_NUMBA, get_backend
from graphsurgery.fem import build_mesh
from graphsurgery.graph import create_graph
from graphsurgery.secular import secular_system
from graphsurgery.topology import pumpkin_graph


def _complete_graph(n: int, rng):
    verts = [f"v{i}" for i in range(n)]
    edges = [(f"e{i}_{j}", (verts[i], verts[j]), float(rng.uniform(0.5, 1.5)))
             for i in range(n) for j in range(i + 1, n)]
    return create_graph(verts, edges)


def _best(fn, repeat: int) -> float:
    fn()  # warm up (JIT compilation)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t)
    return min(times)


def _cases(rng):
    g = _complete_graph(6, rng)  # 15 edges
    sys_ = secular_system(g)
    ts = np.linspace(-3.0, 30.0, 4000)
    args = sys_._args

    mesh_graph = pumpkin_graph([1.0] * 8)
    mesh = build_mesh(mesh_graph, 4000)
    n_int = np.array([len(mesh.edge_x[e.id]) - 1 for e in mesh_graph.edges], dtype=np.int64)
    h = np.array([e.length for e in mesh_graph.edges]) / n_int
    nodes = np.concatenate([mesh.edge_nodes[e.id] for e in mesh_graph.edges]).astype(np.int64)
    offsets = np.concatenate(([0], np.cumsum(n_int + 1)[:-1])).astype(np.int64)

    from graphsurgery.topology import cycle_space_basis

    cg = _complete_graph(6, rng)
    basis = np.array(cycle_space_basis(cg), dtype=np.int64)
    idx = {v: i for i, v in enumerate(cg.vertex_ids)}
    eu = np.array([idx[e.endpoints[0]] for e in cg.edges], dtype=np.int64)
    ev = np.array([idx[e.endpoints[1]] for e in cg.edges], dtype=np.int64)
    lengths = np.array([e.length for e in cg.edges])

    return {
        "scan_secular (15 edges, 4000 points)": lambda b: b.scan_secular(ts, *args),
        "p1_assemble (8 x 4000 elements)": lambda b: b.p1_assemble(n_int, h, nodes, offsets),
        "max_even_subgraph (K6, 2^10 subsets)": lambda b: b.max_even_subgraph(basis, lengths, eu, ev, len(idx)),
    }


def _agree(a, b) -> bool:
    if isinstance(a, tuple):
        return all(_agree(x, y) for x, y in zip(a, b))
    return bool(np.allclose(np.asarray(a, dtype=float), np.asarray(b, dtype=float), rtol=1e-9, atol=1e-12))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    rng = np.random.default_rng(0)
    cases = _cases(rng)
    nb, npb = get_backend(True), get_backend(False)
    print(f"{'kernel':40s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>8s}  agree")
    for name, fn in cases.items():
        t_np = _best(lambda: fn(npb), args.repeat)
        t_nb = _best(lambda: fn(nb), args.repeat)
        ok = _agree(fn(npb), fn(nb))
        print(f"{name:40s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} {t_np / t_nb:8.1f}  {ok}")


if __name__ == "__main__":
    main()
