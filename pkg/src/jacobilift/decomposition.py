"""Spanning-tree choices and the block ("lego") form ``J0 = B + sum(A_i + A_i^T)``."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, InvalidChoice, NotASpanningTree
from .graph_core import JacobiData, MultiGraph, jacobi_matrix

DEFAULT_ENUMERATION_CAP = 10_000


def betti_number(graph: MultiGraph) -> int:
    return len(graph.edges) - graph.p + 1


@dataclass(frozen=True)
class SpanningChoice:
    tree_edges: frozenset[str]
    cut_edges: tuple[str, ...]
    orientation: Mapping[str, tuple[str, str]]

    def key(self) -> str:
        return "+".join(sorted(self.tree_edges)) or "<empty>"

    def to_dict(self) -> dict:
        return {
            "tree_edges": sorted(self.tree_edges),
            "cut_edges": [
                {"id": e, "from": self.orientation[e][0], "to": self.orientation[e][1]}
                for e in self.cut_edges
            ],
        }


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        self.parent[ri] = rj
        return True


def _complete_choice(graph: MultiGraph, tree: set[str]) -> SpanningChoice:
    cut = tuple(e.id for e in graph.edges if e.id not in tree)
    orientation = {}
    for eid in cut:
        i, j = graph.endpoints(eid)
        lo, hi = min(i, j), max(i, j)
        orientation[eid] = (graph.vertices[lo], graph.vertices[hi])
    return SpanningChoice(frozenset(tree), cut, orientation)


def _check_tree(graph: MultiGraph, tree: set[str]) -> None:
    unknown = tree - set(graph.edge_index)
    if unknown:
        raise NotASpanningTree(f"unknown edge ids: {sorted(unknown)}")
    if len(tree) != graph.p - 1:
        raise NotASpanningTree(f"a spanning tree has {graph.p - 1} edges, got {len(tree)}")
    uf = _UnionFind(graph.p)
    for eid in tree:
        i, j = graph.endpoints(eid)
        if i == j:
            raise NotASpanningTree(f"loop {eid!r} cannot be a tree edge")
        if not uf.union(i, j):
            raise NotASpanningTree(f"edge {eid!r} closes a cycle")


def choose_spanning_tree(graph: MultiGraph, tree_edges: Iterable[str] | None = None) -> SpanningChoice:
    """BFS from the first vertex (edges scanned in input order) unless an
    explicit tree edge set is given."""
    if tree_edges is not None:
        tree = {str(e) for e in tree_edges}
        _check_tree(graph, tree)
        return _complete_choice(graph, tree)

    incident: list[list[int]] = [[] for _ in range(graph.p)]
    for k, e in enumerate(graph.edges):
        i, j = graph.index[e.u], graph.index[e.v]
        incident[i].append(k)
        if j != i:
            incident[j].append(k)
    seen = [False] * graph.p
    seen[0] = True
    tree: set[str] = set()
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for k in sorted(incident[i]):
            e = graph.edges[k]
            a, b = graph.index[e.u], graph.index[e.v]
            other = b if a == i else a
            if not seen[other]:
                seen[other] = True
                tree.add(e.id)
                queue.append(other)
    return _complete_choice(graph, tree)


def enumerate_spanning_choices(graph: MultiGraph, limit: int = DEFAULT_ENUMERATION_CAP) -> list[SpanningChoice]:
    """All spanning trees in lexicographic order of edge positions, capped at ``limit``.

    Include/exclude recursion over the non-loop edges; including an edge
    contracts it (union-find), excluding deletes it.
    """
    if limit < 1:
        raise InputError("limit must be >= 1")
    candidates = [k for k, e in enumerate(graph.edges) if not e.is_loop]
    need = graph.p - 1
    found: list[SpanningChoice] = []

    def rec(pos: int, chosen: list[int], parent: list[int]) -> None:
        if len(found) >= limit:
            return
        if len(chosen) == need:
            found.append(_complete_choice(graph, {graph.edges[k].id for k in chosen}))
            return
        if len(candidates) - pos < need - len(chosen):
            return
        k = candidates[pos]
        i, j = graph.endpoints(graph.edges[k].id)

        def root(x: int) -> int:
            while parent[x] != x:
                x = parent[x]
            return x

        ri, rj = root(i), root(j)
        if ri != rj:
            contracted = parent.copy()
            contracted[ri] = rj
            rec(pos + 1, chosen + [k], contracted)
        rec(pos + 1, chosen, parent)

    rec(0, [], list(range(graph.p)))
    return found


@dataclass(frozen=True)
class BlockForm:
    data: JacobiData
    choice: SpanningChoice
    B: np.ndarray
    A_list: tuple[np.ndarray, ...]
    A: np.ndarray

    @property
    def p(self) -> int:
        return self.B.shape[0]

    @property
    def ell(self) -> int:
        return len(self.A_list)

    @property
    def d(self) -> int:
        return 2 * self.ell

    @property
    def J0(self) -> np.ndarray:
        return jacobi_matrix(self.data)

    def cut_endpoints(self, i: int) -> tuple[int, int]:
        """(initial, terminal) base-vertex indices of the i-th cut edge (0-based)."""
        u, v = self.choice.orientation[self.choice.cut_edges[i]]
        g = self.data.graph
        return g.index[u], g.index[v]

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "ell": self.ell,
            "d": self.d,
            "vertices": list(self.data.graph.vertices),
            "choice": self.choice.to_dict(),
            "B": self.B.tolist(),
            "A_list": [Ai.tolist() for Ai in self.A_list],
            "A": self.A.tolist(),
        }


def block_decomposition(data: JacobiData, choice: SpanningChoice) -> BlockForm:
    g = data.graph
    all_ids = [e.id for e in g.edges]
    if set(choice.tree_edges) | set(choice.cut_edges) != set(all_ids) or (
        set(choice.tree_edges) & set(choice.cut_edges)
    ):
        raise InvalidChoice("tree and cut edges must partition the edge set")
    try:
        _check_tree(g, set(choice.tree_edges))
    except NotASpanningTree as exc:
        raise InvalidChoice(str(exc)) from exc
    if not choice.cut_edges:
        raise InvalidChoice("the graph is a tree (no cycles), so the skeleton degree would be 0")

    p = g.p
    B = np.zeros((p, p))
    for v, i in g.index.items():
        B[i, i] = data.b[v]
    for eid in (e.id for e in g.edges if e.id in choice.tree_edges):
        i, j = g.endpoints(eid)
        B[i, j] += data.a[eid]
        B[j, i] += data.a[eid]

    A_list = []
    A = np.zeros((p, p))
    for eid in choice.cut_edges:
        u, v = choice.orientation[eid]
        if {u, v} != {g.edge(eid).u, g.edge(eid).v}:
            raise InvalidChoice(f"orientation of {eid!r} does not match its endpoints")
        i, j = g.index[u], g.index[v]
        Ai = np.zeros((p, p))
        Ai[i, j] = data.a[eid]
        A_list.append(Ai)
        if i == j:
            A[i, i] += 2.0 * data.a[eid]
        else:
            A[i, j] += data.a[eid]
            A[j, i] += data.a[eid]
    return BlockForm(data, choice, B, tuple(A_list), A)


def default_block_form(data: JacobiData) -> BlockForm:
    return block_decomposition(data, choose_spanning_tree(data.graph))
