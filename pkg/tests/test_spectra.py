import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from jacobilift.catalog import bouquet, loop_base, parallel_edges, random_base
from jacobilift.decomposition import default_block_form
from jacobilift.errors import Disconnected, InputError, NegativeMoment, NotNonnegative
from jacobilift.graph_core import jacobi_matrix
from jacobilift.spectra import (
    counting_measure,
    eigenvalues_desc,
    gauss_nodes_from_moments,
    merge_measures,
    moment,
    perron_pair,
    support_sup_from_moments,
    tree_moments,
    tree_moments_explicit,
)


def test_cycle_spectrum():
    n = 9
    C = np.roll(np.eye(n), 1, axis=1)
    C = C + C.T
    ev = eigenvalues_desc(C).eigenvalues
    expected = sorted((2 * math.cos(2 * math.pi * k / n) for k in range(n)), reverse=True)
    assert np.allclose(ev, expected, atol=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-5, 5))
def test_two_by_two_closed_form(a, b, c):
    M = np.array([[a, b], [b, c]])
    mid, rad = (a + c) / 2, math.hypot((a - c) / 2, b)
    ev = eigenvalues_desc(M).eigenvalues
    assert np.allclose(ev, [mid + rad, mid - rad], atol=1e-12)


def test_rejects_asymmetric():
    with pytest.raises(InputError):
        eigenvalues_desc(np.array([[0.0, 1.0], [0.0, 0.0]]))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_perron_pair_of_jacobi_matrices(seed):
    J = jacobi_matrix(random_base(np.random.default_rng(seed)))
    lam, psi = perron_pair(J)
    assert (psi > 0).all()
    assert abs(np.linalg.norm(psi) - 1) < 1e-12
    assert abs(lam - eigenvalues_desc(J).lambda1) <= 1e-9 * max(1, abs(lam))
    assert np.max(np.abs(J @ psi - lam * psi)) <= 1e-9 * max(1, np.abs(J).max())


def test_perron_errors():
    with pytest.raises(NotNonnegative):
        perron_pair(np.array([[0.0, -1.0], [-1.0, 0.0]]))
    with pytest.raises(Disconnected):
        perron_pair(np.diag([1.0, 2.0]))


def test_counting_measure():
    mu = counting_measure([3.0, -1.0, 1.0, 1.0])
    assert mu.total_mass == 1.0
    assert mu.cdf(1.0) == 0.75
    assert mu.cdf(-2.0) == 0.0
    assert mu.moment(1) == 1.0
    assert np.allclose(mu.histogram([-2, 0, 2, 4]), [0.25, 0.5, 0.25])
    assert mu.support().tolist() == [-1.0, 1.0, 3.0]
    mixed = merge_measures([mu, counting_measure([0.0])], [0.5, 0.5])
    assert abs(mixed.total_mass - 1) < 1e-15 and mixed.cdf(0.0) == 0.625


def test_moment_matches_matrix_power():
    J = jacobi_matrix(random_base(np.random.default_rng(4)))
    for k in range(6):
        assert np.isclose(moment(J, 0, k), np.linalg.matrix_power(J, k)[0, 0])


def test_loop_tree_moments_are_central_binomials():
    m = tree_moments(default_block_form(loop_base()), 12)
    assert [int(x) for x in m] == [math.comb(k, k // 2) if k % 2 == 0 else 0 for k in range(13)]


def test_three_regular_tree_return_counts():
    # closed walks at a vertex of the 3-regular tree
    m = tree_moments(default_block_form(parallel_edges([1, 1, 1])), 8)
    assert [int(x) for x in m[::2]] == [1, 3, 15, 87, 543]


@pytest.mark.parametrize("seed", range(6))
def test_tree_moments_against_explicit_ball(seed):
    base = default_block_form(random_base(np.random.default_rng(seed), max_p=3, max_ell=2))
    exact = [float(x) for x in tree_moments(base, 6, shift=0.3)]
    ball = tree_moments_explicit(base, 6, shift=0.3)
    assert np.allclose(exact, ball, rtol=1e-12, atol=1e-12)


def test_support_sequence_and_errors():
    # half mass at 1 and half at 2
    est = support_sup_from_moments([1, 1.5, 2.5, 4.5, 8.5])
    assert np.allclose(est.sequence, [2.5**0.5, 8.5**0.25])
    assert est.monotone and est.limit < 2
    with pytest.raises(NegativeMoment):
        support_sup_from_moments([1, -0.5, 1])


def test_gauss_nodes_recover_discrete_measure():
    atoms, w = np.array([-2.0, 0.5, 3.0]), np.array([0.2, 0.5, 0.3])
    moments = [float(np.sum(w * atoms**k)) for k in range(10)]
    lo, hi = gauss_nodes_from_moments(moments)[-1]
    assert abs(lo + 2) < 1e-10 and abs(hi - 3) < 1e-10


def test_gauss_nodes_bracket_semicircle_support():
    # loop base: arcsine law on [-2, 2]
    m = tree_moments(default_block_form(bouquet(1)), 40)
    nodes = gauss_nodes_from_moments(m)
    his = [hi for _, hi in nodes]
    assert all(b >= a for a, b in zip(his, his[1:]))
    assert 1.95 < his[-1] < 2
