"""Spectra, Perron vectors, counting measures and moment-based support estimates."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np
import scipy.linalg

from .decomposition import BlockForm
from .errors import ConvergenceFailure, Disconnected, InputError, NegativeMoment, NotNonnegative
from .graph_core import offdiagonal_support_connected

EIG_TOL = 1e-10
PERRON_STEP_TOL = 1e-12
PERRON_MAX_ITER = 200_000
MOMENT_DPS = 100


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray  # descending
    residual: float
    vectors: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.eigenvalues)

    @property
    def lambda1(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda2(self) -> float:
        if len(self.eigenvalues) < 2:
            raise InputError("a 1x1 matrix has no second eigenvalue")
        return float(self.eigenvalues[1])

    def gap(self, k: int) -> float:
        """``lambda_1 - lambda_k`` with 1-based ``k``."""
        return float(self.eigenvalues[0] - self.eigenvalues[k - 1])


def eigenvalues_desc(M: np.ndarray, tol: float = EIG_TOL, *, vectors: bool = False) -> Spectrum:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InputError("matrix must be square")
    if not np.array_equal(M, M.T):
        raise InputError("matrix must be exactly symmetric")
    w, V = np.linalg.eigh(M)
    w, V = w[::-1], V[:, ::-1]
    resid = float(np.max(np.linalg.norm(M @ V - V * w, axis=0))) if len(w) else 0.0
    scale = max(1.0, float(np.max(np.abs(M))) * M.shape[0])
    if resid > tol * scale:
        raise ConvergenceFailure(f"eigen residual {resid:.3e} exceeds {tol:.1e} * {scale:.3g}")
    return Spectrum(w.copy(), resid, V.copy() if vectors else None)


def perron_pair(M: np.ndarray, *, max_iter: int = PERRON_MAX_ITER) -> tuple[float, np.ndarray]:
    """Top eigenpair of a symmetric matrix with nonnegative off-diagonal entries
    and connected off-diagonal support, as ``(lambda_1, psi)`` with ``psi > 0``.

    Power iteration on ``M + m I`` with ``m = 1 + max row abs sum``, seeded
    with the dense solver's top vector and stopped when successive iterates
    agree to ``1e-12`` in sup-norm.
    """
    M = np.asarray(M, dtype=float)
    off = M - np.diag(np.diag(M))
    if (off < 0).any():
        raise NotNonnegative("off-diagonal entries must be nonnegative")
    if not offdiagonal_support_connected(off):
        raise Disconnected("off-diagonal support is disconnected; the Perron vector is not unique")
    n = M.shape[0]
    if n == 1:
        return float(M[0, 0]), np.ones(1)
    shift = 1.0 + float(np.max(np.abs(M).sum(axis=1)))
    S = M + shift * np.eye(n)
    _, v = scipy.linalg.eigh(M, subset_by_index=[n - 1, n - 1])
    x = np.abs(v[:, 0])
    x /= np.linalg.norm(x)
    for _ in range(max_iter):
        y = S @ x
        y /= np.linalg.norm(y)
        if np.max(np.abs(y - x)) < PERRON_STEP_TOL:
            x = y
            break
        x = y
    else:
        raise ConvergenceFailure("Perron power iteration did not settle")
    if (x <= 0).any():
        raise ConvergenceFailure("Perron vector has a non-positive entry")
    lam = float(x @ M @ x)
    if np.max(np.abs(M @ x - lam * x)) > 1e-10 * max(1.0, shift):
        raise ConvergenceFailure("Perron residual too large")
    return lam, x


def perron_vector(M: np.ndarray) -> np.ndarray:
    return perron_pair(M)[1]


# -- counting measures -----------------------------------------------------

@dataclass(frozen=True)
class CountingMeasure:
    atoms: np.ndarray  # ascending, with multiplicity
    weights: np.ndarray

    @property
    def total_mass(self) -> float:
        return float(self.weights.sum())

    def cdf(self, x: float) -> float:
        """Right-continuous F(x) = mass of (-inf, x]."""
        k = int(np.searchsorted(self.atoms, x, side="right"))
        return float(self.weights[:k].sum())

    def moment(self, k: int) -> float:
        return float(np.sum(self.weights * self.atoms**k))

    def histogram(self, edges: Sequence[float]) -> np.ndarray:
        """Mass per bin ``[e_i, e_{i+1})``; the last bin is closed."""
        h, _ = np.histogram(self.atoms, bins=np.asarray(edges), weights=self.weights)
        return h

    def support(self, tol: float = 1e-9) -> np.ndarray:
        """Distinct atom locations (clustered at ``tol``)."""
        out: list[float] = []
        for a in self.atoms:
            if not out or a - out[-1] > tol:
                out.append(float(a))
        return np.asarray(out)


def counting_measure(s: Spectrum | Sequence[float]) -> CountingMeasure:
    vals = s.eigenvalues if isinstance(s, Spectrum) else np.asarray(s, dtype=float)
    atoms = np.sort(vals)
    return CountingMeasure(atoms, np.full(len(atoms), 1.0 / len(atoms)))


def merge_measures(measures: Sequence[CountingMeasure], masses: Sequence[float]) -> CountingMeasure:
    atoms = np.concatenate([m.atoms for m in measures])
    weights = np.concatenate([m.weights * w for m, w in zip(measures, masses)])
    order = np.argsort(atoms, kind="stable")
    return CountingMeasure(atoms[order], weights[order])


# -- moments ----------------------------------------------------------------

def moment(M, v: int, power: int) -> float:
    """``<delta_v, M^power delta_v>`` by repeated matrix-vector products."""
    if power < 0:
        raise InputError("power must be >= 0")
    x = np.zeros(M.shape[0])
    x[v] = 1.0
    e = x.copy()
    for _ in range(power):
        x = M @ x
    return float(e @ x)


@dataclass(frozen=True)
class SupportEstimate:
    sequence: list[float]  # s_l = (m_{2l} / m_0)^(1/(2l)), l = 1..L
    monotone: bool

    @property
    def limit(self) -> float:
        return self.sequence[-1]


def support_sup_from_moments(moments: Sequence) -> SupportEstimate:
    """Even-power root sequence of a positive measure given ``moments[n] = int x^n``.

    For a measure on ``[a, b]`` with ``a >= 0`` the sequence increases to ``b``.
    A negative moment means the measure reaches the negative axis, i.e. the
    positivity shift was not applied.
    """
    if len(moments) < 3:
        raise InputError("need moments up to power 2 at least")
    if any(m < 0 for m in moments):
        raise NegativeMoment("negative moment: shift the operator to be positive first")
    m0 = mpmath.mpf(moments[0])
    if m0 <= 0:
        raise NegativeMoment("zero total mass")
    seq = [
        float((mpmath.mpf(moments[2 * l]) / m0) ** (mpmath.mpf(1) / (2 * l)))
        for l in range(1, (len(moments) - 1) // 2 + 1)
    ]
    monotone = all(b >= a - 1e-12 * max(1.0, abs(a)) for a, b in zip(seq, seq[1:]))
    return SupportEstimate(seq, monotone)


def gauss_nodes_from_moments(moments: Sequence) -> list[tuple[float, float]]:
    """Extreme Gauss quadrature nodes ``(smallest, largest)`` for k = 1, 2, ... nodes.

    Recurrence coefficients come from the Chebyshev algorithm on raw
    moments in high precision. The nodes of every rule lie strictly inside
    the convex hull of the support; the largest node increases with k and
    the smallest decreases.
    """
    mu = [mpmath.mpf(m) for m in moments]
    n = len(mu) // 2
    if n < 1 or mu[0] <= 0:
        raise InputError("need a positive zeroth moment")
    alpha = [mu[1] / mu[0]]
    beta = [mu[0]]
    prev = [mpmath.mpf(0)] * len(mu)
    cur = list(mu)
    for k in range(1, n):
        nxt = [mpmath.mpf(0)] * len(mu)
        for l in range(k, 2 * n - k):
            nxt[l] = cur[l + 1] - alpha[k - 1] * cur[l] - beta[k - 1] * prev[l]
        if nxt[k] <= 0:
            break  # measure has only k atoms
        alpha.append(nxt[k + 1] / nxt[k] - cur[k] / cur[k - 1])
        beta.append(nxt[k] / cur[k - 1])
        prev, cur = cur, nxt
    out = []
    for k in range(1, len(alpha) + 1):
        a = np.array([float(x) for x in alpha[:k]])
        b = np.array([float(mpmath.sqrt(x)) for x in beta[1:k]])
        nodes = scipy.linalg.eigvalsh_tridiagonal(a, b) if k > 1 else a
        out.append((float(nodes[0]), float(nodes[-1])))
    return out


def _half_edges(base: BlockForm):
    g = base.data.graph
    tails, heads, weights = [], [], []
    for e in g.edges:
        i, j = g.index[e.u], g.index[e.v]
        w = base.data.a[e.id]
        tails += [i, j]
        heads += [j, i]
        weights += [w, w]
    return tails, heads, weights  # half-edge h and h ^ 1 are reverses


def tree_moments(base: BlockForm, max_power: int, shift: float = 0.0, dps: int = MOMENT_DPS) -> list:
    """Exact density-of-states moments of the universal-cover operator.

    Returns ``mu[n] = (1/p) sum_w <delta_w, (J_T + shift)^n delta_w>`` as
    mpmath numbers, ``n = 0..max_power``. Closed walks on the tree are
    decomposed into excursions into branches; a branch entered through
    half-edge ``h`` is a copy of the branch type of ``h``, so

        R_h = 1 / (1 - c_y z - sum_{g out of y, g != rev h} a_g^2 z^2 R_g)

    with ``y`` the head of ``h`` and ``c_y = b_y + shift``.
    """
    with mpmath.workdps(dps):
        g = base.data.graph
        tails, heads, weights = _half_edges(base)
        H = len(tails)
        out_of: list[list[int]] = [[] for _ in range(g.p)]
        for h in range(H):
            out_of[tails[h]].append(h)
        c = [mpmath.mpf(base.data.b[v]) + mpmath.mpf(shift) for v in g.vertices]
        w2 = [mpmath.mpf(w) ** 2 for w in weights]
        R = [[mpmath.mpf(1)] for _ in range(H)]
        for n in range(1, max_power + 1):
            new = []
            for h in range(H):
                y = heads[h]
                val = c[y] * R[h][n - 1]
                for gg in out_of[y]:
                    if gg == h ^ 1:
                        continue
                    val += w2[gg] * mpmath.fsum(R[gg][m] * R[h][n - 2 - m] for m in range(n - 1))
                new.append(val)
            for h in range(H):
                R[h].append(new[h])
        mu = [mpmath.mpf(0)] * (max_power + 1)
        for w in range(g.p):
            Mw = [mpmath.mpf(1)]
            for n in range(1, max_power + 1):
                val = c[w] * Mw[n - 1]
                for gg in out_of[w]:
                    val += w2[gg] * mpmath.fsum(R[gg][m] * Mw[n - 2 - m] for m in range(n - 1))
                Mw.append(val)
            for n in range(max_power + 1):
                mu[n] += Mw[n]
        return [x / g.p for x in mu]


def tree_moments_explicit(base: BlockForm, max_power: int, shift: float = 0.0) -> list[float]:
    """Same moments by matrix powers on a vertex-centered ball of radius
    ``ceil(max_power / 2) + 1``; closed walks cannot reach its boundary."""
    from .lifting import tree_ball

    ball = tree_ball(base, radius=math.ceil(max_power / 2) + 1)
    op = ball.operator + shift * _sparse_eye(ball.operator.shape[0])
    mu = np.zeros(max_power + 1)
    for w in range(base.p):
        x = np.zeros(op.shape[0])
        x[w] = 1.0
        e = x.copy()
        for n in range(max_power + 1):
            mu[n] += e @ x
            x = op @ x
    return (mu / base.p).tolist()


def _sparse_eye(n: int):
    import scipy.sparse

    return scipy.sparse.identity(n, format="csr")


def positivity_shift(J0: np.ndarray) -> float:
    return 1.0 + float(np.max(np.abs(J0).sum(axis=1)))


@dataclass(frozen=True)
class TreeSupReport:
    shift: float
    powers: list[int]
    raw_estimates: list[float]  # s_l - m, increasing lower estimates
    gauss_estimates: list[float]  # largest Gauss node per rule size, increasing
    gauss_inf_estimates: list[float]  # smallest Gauss node per rule size, decreasing
    lower_bound: float
    upper_bound: float

    @property
    def estimate(self) -> float:
        return self.gauss_estimates[-1]

    @property
    def inf_estimate(self) -> float:
        return self.gauss_inf_estimates[-1]

    def to_dict(self) -> dict:
        return {
            "shift": self.shift,
            "powers": self.powers,
            "raw_estimates": self.raw_estimates,
            "gauss_estimates": self.gauss_estimates,
            "gauss_inf_estimates": self.gauss_inf_estimates,
            "estimate": self.estimate,
            "inf_estimate": self.inf_estimate,
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
        }


def tree_sup_estimate(base: BlockForm, ell_max: int = 40) -> TreeSupReport:
    """Moment-based lower estimates of ``sup sigma(J_T)`` bracketed by the
    spanning-tree lower bound and ``lambda_1(J0)``."""
    from .bounds import tree_sup_lower_bound

    if ell_max < 2 or ell_max % 2:
        raise InputError("ell_max must be an even integer >= 2")
    J0 = base.J0
    m = positivity_shift(J0)
    shifted = tree_moments(base, ell_max, shift=m)
    raw = support_sup_from_moments(shifted)
    nodes = gauss_nodes_from_moments(tree_moments(base, ell_max, shift=0.0))
    lower = tree_sup_lower_bound(base).value
    upper = eigenvalues_desc(J0).lambda1
    return TreeSupReport(
        shift=m,
        powers=[2 * l for l in range(1, len(raw.sequence) + 1)],
        raw_estimates=[s - m for s in raw.sequence],
        gauss_estimates=[hi for _, hi in nodes],
        gauss_inf_estimates=[lo for lo, _ in nodes],
        lower_bound=lower,
        upper_bound=upper,
    )
