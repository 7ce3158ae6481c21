import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobilift.catalog import bouquet, loop_base, parallel_edges, random_base, triangle
from jacobilift.decomposition import (
    betti_number,
    block_decomposition,
    choose_spanning_tree,
    default_block_form,
    enumerate_spanning_choices,
)
from jacobilift.errors import InvalidChoice, NotASpanningTree
from jacobilift.graph_core import JacobiData, build_multigraph, jacobi_matrix


def matrix_tree_count(data):
    """Kirchhoff: spanning trees = any cofactor of the (loopless) Laplacian."""
    g = data.graph
    L = np.zeros((g.p, g.p))
    for e in g.edges:
        if e.is_loop:
            continue
        i, j = g.index[e.u], g.index[e.v]
        L[i, i] += 1
        L[j, j] += 1
        L[i, j] -= 1
        L[j, i] -= 1
    return round(np.linalg.det(L[1:, 1:])) if g.p > 1 else 1


def k4():
    names = ["a", "b", "c", "d"]
    edges = [(f"e{k}", u, v) for k, (u, v) in enumerate(
        [(names[i], names[j]) for i in range(4) for j in range(i + 1, 4)], start=1)]
    g = build_multigraph(names, edges)
    return JacobiData(g, {e[0]: 1.0 for e in edges}, {v: 0.0 for v in names})


@pytest.mark.parametrize(
    "data, ell, count",
    [
        (loop_base(), 1, 1),
        (bouquet(3), 3, 1),
        (triangle(), 1, 3),
        (parallel_edges([1, 1, 1]), 2, 3),
        (k4(), 3, 16),
    ],
)
def test_betti_and_tree_counts(data, ell, count):
    assert betti_number(data.graph) == ell
    choices = enumerate_spanning_choices(data.graph)
    assert len(choices) == count == matrix_tree_count(data)
    assert len({c.key() for c in choices}) == count


def test_loop_base_blocks():
    base = default_block_form(loop_base(a=1.5, b=-0.5))
    assert (base.ell, base.d, base.p) == (1, 2, 1)
    assert base.B.tolist() == [[-0.5]]
    assert base.A_list[0].tolist() == [[1.5]]
    assert base.A.tolist() == [[3.0]]
    assert base.J0.tolist() == [[2.5]]


def test_cut_edges_oriented_low_to_high():
    data = parallel_edges([1.0, 2.0, 3.0])
    base = block_decomposition(data, choose_spanning_tree(data.graph, ["e2"]))
    assert base.choice.cut_edges == ("e1", "e3")
    assert base.cut_endpoints(0) == (0, 1)
    assert base.A_list[0].tolist() == [[0, 1.0], [0, 0]]
    assert base.A_list[1].tolist() == [[0, 3.0], [0, 0]]
    assert base.B.tolist() == [[0, 2.0], [2.0, 0]]


def test_default_tree_is_bfs_first():
    assert sorted(choose_spanning_tree(triangle().graph).tree_edges) == ["e1", "e3"]


def test_bad_tree_specs():
    g = triangle().graph
    with pytest.raises(NotASpanningTree):
        choose_spanning_tree(g, ["e1"])
    with pytest.raises(NotASpanningTree):
        choose_spanning_tree(g, ["e1", "zz"])
    g2 = parallel_edges([1, 1]).graph
    with pytest.raises(NotASpanningTree):
        choose_spanning_tree(g2, ["e1", "e2"])


def test_tree_base_rejected():
    g = build_multigraph(["a", "b"], [("e1", "a", "b"), ("e2", "a", "a"), ("e3", "b", "b")])
    data = JacobiData(g, {"e1": 1, "e2": 1, "e3": 1}, {"a": 0, "b": 0})
    base = default_block_form(data)
    assert base.ell == 2
    choice = choose_spanning_tree(g)
    bogus = type(choice)(frozenset({"e1", "e2"}), ("e3",), choice.orientation)
    with pytest.raises(InvalidChoice):
        block_decomposition(data, bogus)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 100_000))
def test_recomposition(seed):
    data = random_base(np.random.default_rng(seed))
    J = jacobi_matrix(data)
    for choice in enumerate_spanning_choices(data.graph, 20):
        base = block_decomposition(data, choice)
        assert base.d == 2 * betti_number(data.graph)
        assert np.allclose(base.J0, J, rtol=1e-15, atol=1e-15 * np.abs(J).max())
        assert np.array_equal(base.B, base.B.T)
        assert all((Ai >= 0).all() for Ai in base.A_list)
