import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobilift.catalog import loop_base, random_base, triangle
from jacobilift.errors import DisconnectedGraph, DuplicateEdgeId, InputError, LeafVertex
from jacobilift.graph_core import (
    JacobiData,
    build_multigraph,
    degree_profile,
    jacobi_from_dict,
    jacobi_matrix,
    jacobi_to_dict,
    load_jacobi,
    load_weights,
    offdiagonal_support_connected,
)


def test_loop_contributes_twice_to_diagonal():
    J = jacobi_matrix(loop_base(a=1.5, b=0.25))
    assert J.tolist() == [[3.25]]


def test_triangle_matrix_by_hand():
    J = jacobi_matrix(triangle(a=(1, 2, 3), b=(0.5, -1, 0)))
    expected = np.array([[0.5, 1, 3], [1, -1, 2], [3, 2, 0]])
    assert np.array_equal(J, expected)


def test_parallel_edges_sum():
    g = build_multigraph(["u", "v"], [("e1", "u", "v"), ("e2", "v", "u")])
    J = jacobi_matrix(JacobiData(g, {"e1": 1.0, "e2": 2.5}, {"u": 0.0, "v": 0.0}))
    assert J[0, 1] == J[1, 0] == 3.5


def test_degree_profile_counts_loops_twice():
    g = build_multigraph(["v", "w"], [("e1", "v", "v"), ("e2", "v", "w"), ("e3", "v", "w")])
    assert degree_profile(g) == {"v": 4, "w": 2}


@pytest.mark.parametrize(
    "vertices, edges, exc",
    [
        (["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c"), ("e3", "b", "b")], LeafVertex),
        (["a", "b"], [("e1", "a", "a"), ("e2", "b", "b")], DisconnectedGraph),
        (["a"], [("e1", "a", "a"), ("e1", "a", "a")], DuplicateEdgeId),
        (["a"], [("e1", "a", "z")], InputError),
        ([], [], InputError),
    ],
)
def test_validation_errors(vertices, edges, exc):
    with pytest.raises(exc):
        build_multigraph(vertices, edges)


def test_weights_must_be_positive_and_complete():
    g = build_multigraph(["v"], [("e1", "v", "v")])
    with pytest.raises(InputError):
        JacobiData(g, {"e1": 0.0}, {"v": 0.0})
    with pytest.raises(InputError):
        JacobiData(g, {}, {"v": 0.0})


def test_json_round_trip(tmp_path):
    data = triangle(a=(1, 2, 3), b=(0.1, 0.2, 0.3))
    path = tmp_path / "g.json"
    path.write_text(json.dumps(jacobi_to_dict(data)))
    again = load_jacobi(path)
    assert np.array_equal(jacobi_matrix(again), jacobi_matrix(data))
    assert jacobi_from_dict(jacobi_to_dict(data)).graph == data.graph


def test_load_weights_and_errors(tmp_path, data_dir):
    data = load_jacobi(data_dir / "triangle.json")
    w = load_weights(data_dir / "triangle_weights_double.json", data.graph)
    assert np.allclose(jacobi_matrix(w), 2 * jacobi_matrix(data))
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(InputError):
        load_jacobi(bad)
    with pytest.raises(InputError):
        load_weights(bad, data.graph)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_random_bases_symmetric_and_connected(seed):
    data = random_base(np.random.default_rng(seed))
    J = jacobi_matrix(data)
    assert np.array_equal(J, J.T)
    assert data.graph.is_connected()
    assert offdiagonal_support_connected(J)
    assert min(degree_profile(data.graph).values()) >= 2

