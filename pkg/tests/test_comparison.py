import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobilift.catalog import random_base, triangle
from jacobilift.comparison import (
    comparison_ratios,
    constant_perron_condition,
    ground_state_form,
    ground_state_quadratic,
    minmax_gap,
    verify_comparison,
)
from jacobilift.errors import GraphMismatch, NotGroundState, NotPositive
from jacobilift.graph_core import JacobiData, jacobi_matrix
from jacobilift.spectra import perron_pair


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_ground_state_identity(seed):
    rng = np.random.default_rng(seed)
    data = random_base(rng)
    lam, psi = perron_pair(jacobi_matrix(data))
    f = rng.normal(size=data.graph.p)
    lhs = ground_state_form(data, psi, lam, f)
    rhs = ground_state_quadratic(data, psi, lam, f)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_ground_state_preconditions():
    data = triangle()
    lam, psi = perron_pair(jacobi_matrix(data))
    with pytest.raises(NotPositive):
        ground_state_quadratic(data, -psi, lam, [1, 2, 3])
    with pytest.raises(NotGroundState):
        ground_state_quadratic(data, psi, lam + 1, [1, 2, 3])


@pytest.mark.parametrize("seed", range(10))
def test_minmax_gap_consistency(seed):
    data = random_base(np.random.default_rng(seed))
    for k in range(1, data.graph.p + 1):
        minmax_gap(data, k)  # raises on disagreement


def test_identical_weights_give_unit_ratios():
    data = triangle(a=(1, 2, 3), b=(0.5, 0, -1))
    S, I, _, _ = comparison_ratios(data, data)
    assert abs(S - 1) < 1e-12 and abs(I - 1) < 1e-12
    assert verify_comparison(data, data).all_pass


def test_doubled_weights_two_sided():
    data = triangle(a=(1, 2, 3), b=(0.5, 0, -1))
    doubled = JacobiData(data.graph, {k: 2 * v for k, v in data.a.items()}, {k: 2 * v for k, v in data.b.items()})
    rep = verify_comparison(doubled, data)
    assert rep.two_sided is not None and all(rep.two_sided)
    assert np.allclose(rep.gaps, 2 * np.array(rep.gaps_tilde))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_comparison_never_violated(seed):
    rng = np.random.default_rng(seed)
    data = random_base(rng)
    other = JacobiData(
        data.graph,
        {k: float(rng.uniform(0.1, 3)) for k in data.a},
        {k: float(rng.uniform(-2, 2)) for k in data.b},
    )
    assert verify_comparison(data, other).all_pass


def test_graph_mismatch():
    with pytest.raises(GraphMismatch):
        comparison_ratios(triangle(), random_base(np.random.default_rng(0), p=2))


def test_constant_perron_condition():
    data = triangle(a=(1, 1, 1), b=(0.5, 0.5, 0.5))
    assert constant_perron_condition(data) == 2.5
    _, psi = perron_pair(jacobi_matrix(data))
    assert np.allclose(psi, 3**-0.5, atol=1e-10)
    assert constant_perron_condition(triangle(a=(1, 2, 1))) is None
