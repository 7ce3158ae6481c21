"""Finite lifts by permutation voltages, their skeletons, and truncated universal-cover balls.

A cover of size ``n`` places one copy of the base block on each sheet
``k = 0..n-1``. The i-th cut edge on sheet ``k`` is glued to sheet
``sigma[i][k]``, so block ``(k, sigma_i(k))`` of the lifted matrix gains
``A_i`` and the transposed block gains ``A_i^T``. Lifted vertex ``v`` on sheet
``k`` has index ``k * p + v``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np
import scipy.linalg
import scipy.sparse
from scipy.sparse.csgraph import shortest_path

from .decomposition import BlockForm
from .errors import ConnectivityUnreachable, InputError, NotAPermutation, VerificationError
from .graph_core import JacobiData, MultiGraph, _connected, build_multigraph, jacobi_matrix

LAMBDA1_TOL = 1e-9
MAX_CONNECT_ATTEMPTS = 1000
MAX_TREE_VERTICES = 200_000


def _check_permutation(s: Sequence[int], n: int) -> tuple[int, ...]:
    t = tuple(int(x) for x in s)
    if len(t) != n or sorted(t) != list(range(n)):
        raise NotAPermutation(f"not a permutation of 0..{n - 1}: {list(t)[:12]}")
    return t


def top_eigenvalue(M: np.ndarray) -> float:
    N = M.shape[0]
    return float(scipy.linalg.eigh(M, eigvals_only=True, subset_by_index=[N - 1, N - 1])[0])


class Cover:
    """An n-sheeted lift of a block form. Immutable by convention."""

    def __init__(self, base: BlockForm, sigma: Sequence[Sequence[int]], *, check: bool = True):
        if len(sigma) != base.ell:
            raise NotAPermutation(f"need {base.ell} permutations, got {len(sigma)}")
        if not sigma or len(sigma[0]) < 1:
            raise NotAPermutation("sheet count must be >= 1")
        n = len(sigma[0])
        self.base = base
        self.n = n
        self.sigma: tuple[tuple[int, ...], ...] = tuple(_check_permutation(s, n) for s in sigma)
        self.lifted_matrix = self._build_matrix()
        self.lifted_matrix.setflags(write=False)
        if check:
            lam = top_eigenvalue(self.lifted_matrix)
            lam0 = top_eigenvalue(base.J0)
            if abs(lam - lam0) > LAMBDA1_TOL:
                raise VerificationError(
                    f"top eigenvalue of lift {lam!r} differs from base {lam0!r}"
                )

    @property
    def p(self) -> int:
        return self.base.p

    @property
    def size(self) -> int:
        return self.base.p * self.n

    def _build_matrix(self) -> np.ndarray:
        p, n = self.base.p, self.n
        sheets = np.arange(n)
        diag = np.kron(np.eye(n), self.base.B)
        X = np.zeros((p * n, p * n))
        for i, s in enumerate(self.sigma):
            init, term = self.base.cut_endpoints(i)
            w = self.base.A_list[i][init, term]
            np.add.at(X, (sheets * p + init, np.asarray(s) * p + term), w)
        return diag + (X + X.T)

    # -- skeleton ----------------------------------------------------------

    @cached_property
    def skeleton_edges(self) -> tuple[tuple[int, int, int], ...]:
        """``(k, sigma_i(k), i)`` with 1-based label ``i``; read from ``k`` the
        edge carries ``A_i``, read from the other end it carries ``A_i^T``."""
        return tuple(
            (k, s[k], i + 1) for i, s in enumerate(self.sigma) for k in range(self.n)
        )

    @cached_property
    def skeleton_distances(self) -> np.ndarray:
        n = self.n
        rows = [k for k, m, _ in self.skeleton_edges]
        cols = [m for k, m, _ in self.skeleton_edges]
        adj = scipy.sparse.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n)).tocsr()
        dist = shortest_path(adj, method="D", directed=False, unweighted=True)
        dist[np.isinf(dist)] = -1
        return dist.astype(np.int64)

    def skeleton_diameter(self) -> int | None:
        D = self.skeleton_distances
        return None if (D < 0).any() else int(D.max())

    # -- lifted graph ------------------------------------------------------

    @cached_property
    def lifted_graph(self) -> MultiGraph:
        return self.lifted_data.graph

    @cached_property
    def lifted_data(self) -> JacobiData:
        """The lift as an explicit weighted multigraph (an independent route to
        ``lifted_matrix`` through :func:`jacobi_matrix`)."""
        g = self.base.data.graph
        choice = self.base.choice
        names = [f"{v}@{k + 1}" for k in range(self.n) for v in g.vertices]
        edges, a = [], {}
        for e in g.edges:
            if e.id in choice.tree_edges:
                for k in range(self.n):
                    eid = f"{e.id}@{k + 1}"
                    edges.append((eid, f"{e.u}@{k + 1}", f"{e.v}@{k + 1}"))
                    a[eid] = self.base.data.a[e.id]
        for i, cid in enumerate(choice.cut_edges):
            u, v = choice.orientation[cid]
            for k in range(self.n):
                eid = f"{cid}@{k + 1}"
                edges.append((eid, f"{u}@{k + 1}", f"{v}@{self.sigma[i][k] + 1}"))
                a[eid] = self.base.data.a[cid]
        b = {f"{v}@{k + 1}": self.base.data.b[v] for k in range(self.n) for v in g.vertices}
        graph = build_multigraph(names, edges, allow_disconnected=True)
        return JacobiData(graph, a, b)

    @cached_property
    def connected(self) -> bool:
        p = self.p
        pairs = []
        for eid in self.base.choice.tree_edges:
            i, j = self.base.data.graph.endpoints(eid)
            pairs.extend((k * p + i, k * p + j) for k in range(self.n))
        for i, s in enumerate(self.sigma):
            init, term = self.base.cut_endpoints(i)
            pairs.extend((k * p + init, s[k] * p + term) for k in range(self.n))
        return _connected(self.size, pairs)

    def sigma_one_based(self) -> list[list[int]]:
        return [[x + 1 for x in s] for s in self.sigma]

    def summary(self) -> dict:
        return {
            "n": self.n,
            "sheets": self.n,
            "vertices": self.size,
            "connected": self.connected,
            "skeleton_diameter": self.skeleton_diameter(),
            "sigma": self.sigma_one_based(),
        }


def lift_by_permutations(base: BlockForm, sigma: Sequence[Sequence[int]], *, check: bool = True) -> Cover:
    """Lift with 0-based permutation images ``sigma[i][k]``."""
    return Cover(base, sigma, check=check)


def sigma_from_spec(doc: dict) -> list[list[int]]:
    """Read a cover spec ``{"n": int, "sigma": [[...], ...]}`` with 1-based images."""
    try:
        n = int(doc["n"])
        sigma = [[int(x) - 1 for x in s] for s in doc["sigma"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed cover spec: {exc}") from exc
    for s in sigma:
        _check_permutation(s, n)
    return sigma


def _fisher_yates(rng: np.random.Generator, n: int) -> list[int]:
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def _sattolo(rng: np.random.Generator, n: int) -> list[int]:
    """Uniform random n-cycle."""
    perm = list(range(n))
    for i in range(n - 1, 0, -1):
        j = int(rng.integers(0, i))
        perm[i], perm[j] = perm[j], perm[i]
    return perm


def random_cover(
    base: BlockForm,
    n: int,
    seed: int,
    require_connected: bool = True,
    *,
    cyclic: bool = False,
    max_attempts: int = MAX_CONNECT_ATTEMPTS,
    check: bool = True,
) -> Cover:
    """Seeded random n-lift.

    ``cyclic=True`` draws every voltage uniformly among n-cycles, which makes
    the lift connected by construction.
    """
    if n < 1:
        raise InputError("n must be >= 1")
    rng = np.random.default_rng(seed)
    draw = _sattolo if cyclic else _fisher_yates
    for _ in range(max_attempts):
        sigma = [draw(rng, n) for _ in range(base.ell)]
        cover = Cover(base, sigma, check=False)
        if not require_connected or cover.connected:
            if check:
                cover = Cover(base, sigma, check=True)
            return cover
    raise ConnectivityUnreachable(f"no connected {n}-cover after {max_attempts} attempts")


def skeleton_distance(cover: Cover, sheet_u: int, sheet_v: int) -> int:
    """BFS distance between two sheets in the skeleton (-1 if disconnected)."""
    return int(cover.skeleton_distances[sheet_u, sheet_v])


# -- truncated universal cover --------------------------------------------

@dataclass(frozen=True)
class TruncatedTree:
    """Ball in the d-regular skeleton tree of the universal cover.

    ``parent[t]`` / ``symbol[t]`` record how tree vertex ``t`` was reached:
    ``symbol = (i, s)`` means ``t = parent + s*e_i`` (1-based ``i``,
    ``s = +-1``). ``entry_label[t]`` is ``i`` for every vertex except a
    vertex-center root (0). For an edge center both roots carry the center
    label.
    """

    base: BlockForm
    center_label: int | None
    radius: int
    parent: np.ndarray
    symbol: tuple[tuple[int, int], ...]
    shell: np.ndarray
    entry_label: np.ndarray
    operator: scipy.sparse.csr_matrix = field(repr=False)

    @property
    def n_vertices(self) -> int:
        return len(self.shell)

    def shell_sizes(self) -> list[int]:
        return np.bincount(self.shell, minlength=self.radius + 1).tolist()

    def shell_label_sizes(self) -> list[list[int]]:
        """``[k][j-1] = |V_{k,j}|``."""
        out = np.zeros((self.radius + 1, self.base.ell), dtype=np.int64)
        for k, lab in zip(self.shell, self.entry_label):
            if lab > 0:
                out[k, lab - 1] += 1
        return out.tolist()

    def neighbor_symbols(self) -> list[list[tuple[int, int]]]:
        """Symbols of every tree edge at each vertex (both directions)."""
        nb: list[list[tuple[int, int]]] = [[] for _ in range(self.n_vertices)]
        for t in range(self.n_vertices):
            par = int(self.parent[t])
            if par >= 0:
                i, s = self.symbol[t]
                nb[par].append((i, s))
                nb[t].append((i, -s))
        if self.center_label is not None:
            nb[0].append((self.center_label, +1))
            nb[1].append((self.center_label, -1))
        return nb

    def dense(self) -> np.ndarray:
        return self.operator.toarray()


def tree_ball(base: BlockForm, radius: int, center_label: int | None = None) -> TruncatedTree:
    """Radius-``radius`` ball around a root vertex, or around an edge with the
    1-based label ``center_label`` (shells counted from the edge's ends).

    Edges leaving the ball are dropped.
    """
    if radius < 0:
        raise InputError("radius must be >= 0")
    d, ell, p = base.d, base.ell, base.p
    if center_label is not None and not 1 <= center_label <= ell:
        raise InputError(f"center label must be in 1..{ell}")
    roots = 1 if center_label is None else 2
    est = roots * sum((d - 1) ** k for k in range(radius + 1)) if d > 1 else roots
    if est > MAX_TREE_VERTICES:
        raise InputError(f"tree ball would have about {est} vertices; use shell arithmetic instead")

    symbols_all = [(i, s) for i in range(1, ell + 1) for s in (+1, -1)]
    parent = [-1] * roots
    symbol: list[tuple[int, int]] = [(0, 0)] * roots
    shell = [0] * roots
    entry = [0] if center_label is None else [center_label, center_label]
    # symbol leading back toward the root side, per vertex
    back: list[tuple[int, int] | None] = [None] if center_label is None else [
        (center_label, +1),
        (center_label, -1),
    ]
    frontier = list(range(roots))
    for k in range(1, radius + 1):
        nxt = []
        for t in frontier:
            for sym in symbols_all:
                if sym == back[t]:
                    continue
                parent.append(t)
                symbol.append(sym)
                shell.append(k)
                entry.append(sym[0])
                back.append((sym[0], -sym[1]))
                nxt.append(len(parent) - 1)
        frontier = nxt

    N = len(parent)
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []
    bi, bj = np.nonzero(base.B)
    bv = base.B[bi, bj]
    offs = np.arange(N) * p
    rows.append((offs[:, None] + bi[None, :]).ravel())
    cols.append((offs[:, None] + bj[None, :]).ravel())
    vals.append(np.tile(bv, N))

    def add_edge(t_from: int, t_to: int, label: int) -> None:
        # the edge from t_from to t_to = t_from + e_label carries A_label
        init, term = base.cut_endpoints(label - 1)
        w = base.A_list[label - 1][init, term]
        rows.append(np.array([t_from * p + init, t_to * p + term]))
        cols.append(np.array([t_to * p + term, t_from * p + init]))
        vals.append(np.array([w, w]))

    if center_label is not None:
        add_edge(0, 1, center_label)
    for t in range(roots, N):
        i, s = symbol[t]
        if s > 0:
            add_edge(parent[t], t, i)
        else:
            add_edge(t, parent[t], i)
    op = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(N * p, N * p)
    ).tocsr()
    return TruncatedTree(
        base=base,
        center_label=center_label,
        radius=radius,
        parent=np.asarray(parent),
        symbol=tuple(symbol),
        shell=np.asarray(shell),
        entry_label=np.asarray(entry),
        operator=op,
    )


def disjoint_union_cover(base: BlockForm, copies: int) -> Cover:
    """``copies`` disconnected copies of the base (identity voltages)."""
    return Cover(base, [list(range(copies))] * base.ell, check=True)


def lifted_matrix_reference(cover: Cover) -> np.ndarray:
    return jacobi_matrix(cover.lifted_data)
