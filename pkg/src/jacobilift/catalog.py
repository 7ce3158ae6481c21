"""Small named base graphs and a seeded generator of random Jacobi data."""

from __future__ import annotations

import numpy as np

from .graph_core import JacobiData, build_multigraph


def loop_base(a: float = 1.0, b: float = 0.0) -> JacobiData:
    g = build_multigraph(["v"], [("e1", "v", "v")])
    return JacobiData(g, {"e1": a}, {"v": b})


def bouquet(ell: int, a=1.0, b: float = 0.0) -> JacobiData:
    """One vertex with ``ell`` loops; its lifts are 2*ell-regular graphs."""
    weights = np.broadcast_to(np.asarray(a, dtype=float), (ell,))
    g = build_multigraph(["v"], [(f"e{i + 1}", "v", "v") for i in range(ell)])
    return JacobiData(g, {f"e{i + 1}": float(weights[i]) for i in range(ell)}, {"v": b})


def parallel_edges(weights, b=(0.0, 0.0)) -> JacobiData:
    """Two vertices joined by ``len(weights)`` parallel edges."""
    g = build_multigraph(["u", "v"], [(f"e{i + 1}", "u", "v") for i in range(len(weights))])
    return JacobiData(
        g, {f"e{i + 1}": float(w) for i, w in enumerate(weights)}, {"u": b[0], "v": b[1]}
    )


def triangle(a=(1.0, 1.0, 1.0), b=(0.0, 0.0, 0.0)) -> JacobiData:
    g = build_multigraph(
        ["v1", "v2", "v3"], [("e1", "v1", "v2"), ("e2", "v2", "v3"), ("e3", "v1", "v3")]
    )
    return JacobiData(
        g, {f"e{i + 1}": float(w) for i, w in enumerate(a)}, {f"v{i + 1}": float(x) for i, x in enumerate(b)}
    )


def random_base(
    rng: np.random.Generator,
    max_p: int = 6,
    max_ell: int = 4,
    a_range: tuple[float, float] = (0.1, 3.0),
    b_range: tuple[float, float] = (-2.0, 2.0),
    *,
    p: int | None = None,
    ell: int | None = None,
) -> JacobiData:
    """Connected leafless multigraph: a random tree plus ``ell`` extra edges
    (loops and parallels allowed), redrawn until no vertex has degree 1."""
    p = p if p is not None else int(rng.integers(1, max_p + 1))
    ell = ell if ell is not None else int(rng.integers(1, max_ell + 1))
    names = [f"v{i + 1}" for i in range(p)]
    while True:
        edges = []
        for i in range(1, p):
            edges.append((names[int(rng.integers(0, i))], names[i]))
        for _ in range(ell):
            edges.append((names[int(rng.integers(0, p))], names[int(rng.integers(0, p))]))
        deg = [0] * p
        for u, v in edges:
            deg[names.index(u)] += 1
            deg[names.index(v)] += 1
        if 1 not in deg:
            break
    records = [(f"e{k + 1}", u, v) for k, (u, v) in enumerate(edges)]
    g = build_multigraph(names, records)
    a = {eid: float(rng.uniform(*a_range)) for eid, _, _ in records}
    b = {v: float(rng.uniform(*b_range)) for v in names}
    return JacobiData(g, a, b)
