import math
from collections import deque

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobilift.catalog import bouquet, loop_base, parallel_edges, random_base, triangle
from jacobilift.decomposition import default_block_form
from jacobilift.errors import InputError, NotAPermutation
from jacobilift.graph_core import jacobi_matrix
from jacobilift.lifting import (
    Cover,
    disjoint_union_cover,
    lifted_matrix_reference,
    random_cover,
    sigma_from_spec,
    skeleton_distance,
    tree_ball,
)
from jacobilift.spectra import eigenvalues_desc


def shift(n, s=1):
    return [(k + s) % n for k in range(n)]


def test_loop_lift_along_cycle_is_cycle_adjacency():
    base = default_block_form(loop_base())
    M = Cover(base, [shift(8)]).lifted_matrix
    C8 = np.zeros((8, 8))
    for k in range(8):
        C8[k, (k + 1) % 8] = C8[(k + 1) % 8, k] = 1
    assert np.array_equal(M, C8)


def test_circulant_spectrum_closed_form():
    n, steps = 12, (1, 5)
    base = default_block_form(bouquet(2))
    ev = eigenvalues_desc(Cover(base, [shift(n, s) for s in steps]).lifted_matrix).eigenvalues
    expected = sorted(
        (sum(2 * math.cos(2 * math.pi * m * s / n) for s in steps) for m in range(n)), reverse=True
    )
    assert np.allclose(ev, expected, atol=1e-12)


def test_cube_as_cover_of_theta():
    # Q3 is a 4-sheeted cover of three parallel edges; char poly (x-3)(x-1)^3(x+1)^3(x+3)
    base = default_block_form(parallel_edges([1, 1, 1]))
    ev = eigenvalues_desc(Cover(base, [[1, 0, 3, 2], [2, 3, 0, 1]]).lifted_matrix).eigenvalues
    assert np.allclose(ev, [3, 1, 1, 1, -1, -1, -1, -3], atol=1e-12)


def test_identity_voltages_give_disjoint_copies():
    base = default_block_form(triangle())
    cover = disjoint_union_cover(base, 3)
    assert not cover.connected
    assert np.array_equal(cover.lifted_matrix, np.kron(np.eye(3), base.J0))


def test_reject_non_permutations():
    base = default_block_form(loop_base())
    with pytest.raises(NotAPermutation):
        Cover(base, [[0, 0, 1]])
    with pytest.raises(NotAPermutation):
        sigma_from_spec({"n": 3, "sigma": [[1, 2, 4]]})
    with pytest.raises(InputError):
        sigma_from_spec({"sigma": [[1]]})


def test_sigma_spec_is_one_based():
    assert sigma_from_spec({"n": 3, "sigma": [[2, 3, 1]]}) == [[1, 2, 0]]


def test_random_cover_reproducible():
    base = default_block_form(triangle())
    a = random_cover(base, 10, seed=7)
    b = random_cover(base, 10, seed=7)
    assert a.sigma == b.sigma and a.connected


def test_cyclic_mode_draws_single_cycles():
    base = default_block_form(loop_base())
    cover = random_cover(base, 17, seed=3, cyclic=True)
    s, k, seen = cover.sigma[0], 0, set()
    while k not in seen:
        seen.add(k)
        k = s[k]
    assert len(seen) == 17


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(2, 9))
def test_three_routes_to_the_lift_agree(seed, n):
    rng = np.random.default_rng(seed)
    base = default_block_form(random_base(rng, max_p=4, max_ell=3))
    cover = random_cover(base, n, seed, require_connected=False)
    ref = lifted_matrix_reference(cover)
    explicit = jacobi_matrix(cover.lifted_data)
    tol = 1e-14 * max(1.0, np.abs(ref).max())
    assert np.allclose(cover.lifted_matrix, ref, atol=tol)
    assert np.allclose(cover.lifted_matrix, explicit, atol=tol)
    if cover.connected:
        assert abs(eigenvalues_desc(cover.lifted_matrix).lambda1 - eigenvalues_desc(base.J0).lambda1) <= 1e-9


def bfs_all_pairs(n, edges):
    adj = [[] for _ in range(n)]
    for u, v, _ in edges:
        adj[u].append(v)
        adj[v].append(u)
    out = np.full((n, n), -1)
    for s in range(n):
        out[s, s] = 0
        q = deque([s])
        while q:
            x = q.popleft()
            for y in adj[x]:
                if out[s, y] < 0:
                    out[s, y] = out[s, x] + 1
                    q.append(y)
    return out


def floyd_warshall(n, edges):
    D = np.full((n, n), np.inf)
    np.fill_diagonal(D, 0)
    for u, v, _ in edges:
        if u != v:
            D[u, v] = D[v, u] = 1
    for k in range(n):
        D = np.minimum(D, D[:, k:k + 1] + D[k:k + 1, :])
    return np.where(np.isinf(D), -1, D).astype(int)


@pytest.mark.parametrize("seed", range(5))
def test_skeleton_distances_two_oracles(seed):
    base = default_block_form(bouquet(2))
    cover = random_cover(base, 20, seed, require_connected=False)
    edges = cover.skeleton_edges
    bfs = bfs_all_pairs(cover.n, edges)
    assert np.array_equal(bfs, floyd_warshall(cover.n, edges))
    assert np.array_equal(cover.skeleton_distances, bfs)
    assert skeleton_distance(cover, 0, 5) == bfs[0, 5]


def test_skeleton_edge_labels_are_one_based():
    base = default_block_form(bouquet(2))
    cover = Cover(base, [shift(4), shift(4, 2)])
    assert {lab for _, _, lab in cover.skeleton_edges} == {1, 2}
    assert cover.skeleton_diameter() == 1  # +-1, +-2 reach all of Z_4


@pytest.mark.parametrize("d_half, radius", [(1, 4), (2, 3), (3, 2)])
def test_tree_ball_shell_sizes(d_half, radius):
    base = default_block_form(bouquet(d_half))
    d = 2 * d_half
    vertex = tree_ball(base, radius)
    assert vertex.shell_sizes() == [1] + [d * (d - 1) ** (k - 1) for k in range(1, radius + 1)]
    edge = tree_ball(base, radius, center_label=1)
    assert edge.shell_sizes() == [2 * (d - 1) ** k for k in range(radius + 1)]


def test_tree_ball_of_loop_is_path():
    base = default_block_form(loop_base(a=0.7, b=0.1))
    ball = tree_ball(base, 3)
    ev = np.sort(np.linalg.eigvalsh(ball.dense()))
    expected = np.sort([0.1 + 2 * 0.7 * math.cos(math.pi * k / 8) for k in range(1, 8)])
    assert np.allclose(ev, expected, atol=1e-12)


def test_tree_ball_size_cap():
    base = default_block_form(bouquet(4))
    with pytest.raises(InputError):
        tree_ball(base, 12)
