"""Finite multigraphs with loops and parallel edges, and the Jacobi matrices on them."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

from .errors import DisconnectedGraph, DuplicateEdgeId, InputError, LeafVertex


@dataclass(frozen=True)
class Edge:
    id: str
    u: str
    v: str

    @property
    def is_loop(self) -> bool:
        return self.u == self.v


@dataclass(frozen=True)
class MultiGraph:
    """Undirected multigraph. Loops are stored once; ``u == v`` marks a loop.

    Build through :func:`build_multigraph`, which validates; the bare
    constructor does not.
    """

    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    index: Mapping[str, int] = field(init=False, repr=False, compare=False)
    edge_index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {v: i for i, v in enumerate(self.vertices)})
        object.__setattr__(self, "edge_index", {e.id: i for i, e in enumerate(self.edges)})

    @property
    def p(self) -> int:
        return len(self.vertices)

    def edge(self, edge_id: str) -> Edge:
        return self.edges[self.edge_index[edge_id]]

    def endpoints(self, edge_id: str) -> tuple[int, int]:
        e = self.edge(edge_id)
        return self.index[e.u], self.index[e.v]

    def is_connected(self) -> bool:
        return _connected(self.p, ((self.index[e.u], self.index[e.v]) for e in self.edges))

    def edge_records(self) -> list[tuple[str, str, str]]:
        return [(e.id, e.u, e.v) for e in self.edges]


def _connected(n: int, pairs: Iterable[tuple[int, int]]) -> bool:
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in pairs:
        if i != j:
            adj[i].append(j)
            adj[j].append(i)
    seen = [False] * n
    seen[0] = True
    queue = deque([0])
    count = 1
    while queue:
        i = queue.popleft()
        for j in adj[i]:
            if not seen[j]:
                seen[j] = True
                count += 1
                queue.append(j)
    return count == n


def build_multigraph(
    vertex_ids: Iterable[str],
    edge_records: Iterable,
    *,
    allow_disconnected: bool = False,
) -> MultiGraph:
    """Validate and build a multigraph.

    ``edge_records`` holds ``(id, u, v)`` triples or mappings with those keys.
    Vertex order is the input order and fixes every matrix built later.
    """
    vertices = tuple(str(v) for v in vertex_ids)
    if not vertices:
        raise InputError("graph must have at least one vertex")
    if len(set(vertices)) != len(vertices):
        raise InputError("duplicate vertex id")
    known = set(vertices)
    edges: list[Edge] = []
    seen_ids: set[str] = set()
    for rec in edge_records:
        if isinstance(rec, Mapping):
            eid, u, v = rec["id"], rec["u"], rec["v"]
        else:
            eid, u, v = rec
        eid, u, v = str(eid), str(u), str(v)
        if eid in seen_ids:
            raise DuplicateEdgeId(f"edge id {eid!r} appears twice")
        if u not in known or v not in known:
            raise InputError(f"edge {eid!r} references an unknown vertex")
        seen_ids.add(eid)
        edges.append(Edge(eid, u, v))
    graph = MultiGraph(vertices, tuple(edges))
    if not allow_disconnected and not graph.is_connected():
        raise DisconnectedGraph("graph is not connected")
    deg = degree_profile(graph)
    leaves = [v for v, k in deg.items() if k == 1]
    if leaves:
        raise LeafVertex(f"vertices of degree 1 are not allowed: {leaves}")
    return graph


def degree_profile(graph: MultiGraph) -> dict[str, int]:
    deg = {v: 0 for v in graph.vertices}
    for e in graph.edges:
        deg[e.u] += 1
        deg[e.v] += 1  # a loop lands here twice
    return deg


@dataclass(frozen=True)
class JacobiData:
    graph: MultiGraph
    a: Mapping[str, float]
    b: Mapping[str, float]

    def __post_init__(self) -> None:
        edge_ids = {e.id for e in self.graph.edges}
        if set(self.a) != edge_ids:
            raise InputError("edge weights must cover every edge exactly once")
        if set(self.b) != set(self.graph.vertices):
            raise InputError("potentials must cover every vertex exactly once")
        for eid, w in self.a.items():
            if not np.isfinite(w) or w <= 0:
                raise InputError(f"edge weight for {eid!r} must be positive, got {w}")
        for vid, w in self.b.items():
            if not np.isfinite(w):
                raise InputError(f"potential at {vid!r} is not finite")
        object.__setattr__(self, "a", {k: float(v) for k, v in self.a.items()})
        object.__setattr__(self, "b", {k: float(v) for k, v in self.b.items()})

    def with_weights(self, a: Mapping[str, float], b: Mapping[str, float]) -> "JacobiData":
        return JacobiData(self.graph, a, b)


def jacobi_matrix(data: JacobiData) -> np.ndarray:
    """Dense p x p Jacobi matrix: ``b_v + 2 * sum(loops)`` on the diagonal,
    summed parallel weights off it."""
    g = data.graph
    J = np.zeros((g.p, g.p))
    for v, i in g.index.items():
        J[i, i] += data.b[v]
    for e in g.edges:
        i, j = g.index[e.u], g.index[e.v]
        w = data.a[e.id]
        if i == j:
            J[i, i] += 2.0 * w
        else:
            J[i, j] += w
            J[j, i] += w
    return J


def offdiagonal_support_connected(M: np.ndarray) -> bool:
    n = M.shape[0]
    if n == 1:
        return True
    rows, cols = np.nonzero(M)
    return _connected(n, zip(rows.tolist(), cols.tolist()))


# -- JSON interchange -------------------------------------------------------

def jacobi_from_dict(doc: Mapping) -> JacobiData:
    try:
        vertices = doc["vertices"]
        edges = doc["edges"]
        b = doc.get("b", {})
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed graph document: {exc}") from exc
    graph = build_multigraph(vertices, edges)
    try:
        a = {str(e["id"]): float(e["a"]) for e in edges}
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"every edge needs a numeric 'a': {exc}") from exc
    potentials = {v: float(b.get(v, 0.0)) for v in graph.vertices}
    return JacobiData(graph, a, potentials)


def jacobi_to_dict(data: JacobiData) -> dict:
    return {
        "vertices": list(data.graph.vertices),
        "edges": [
            {"id": e.id, "u": e.u, "v": e.v, "a": data.a[e.id]} for e in data.graph.edges
        ],
        "b": {v: data.b[v] for v in data.graph.vertices},
    }


def load_jacobi(path: str | Path) -> JacobiData:
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read graph file {path}: {exc}") from exc
    return jacobi_from_dict(doc)


def load_weights(path: str | Path, graph: MultiGraph) -> JacobiData:
    """Weight file: ``{"a": {edge: value}, "b": {vertex: value}}`` over an existing graph."""
    try:
        doc = json.loads(Path(path).read_text())
        a = {str(k): float(v) for k, v in doc["a"].items()}
        b = {str(k): float(v) for k, v in doc.get("b", {}).items()}
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"cannot read weight file {path}: {exc}") from exc
    b = {v: b.get(v, 0.0) for v in graph.vertices}
    return JacobiData(graph, a, b)
