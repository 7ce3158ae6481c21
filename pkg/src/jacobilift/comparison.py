"""Ground-state representation and eigenvalue-gap comparison between two
Jacobi matrices on the same multigraph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import GraphMismatch, InputError, NotGroundState, NotPositive, VerificationError
from .graph_core import JacobiData, jacobi_matrix
from .spectra import eigenvalues_desc, perron_pair

GROUND_STATE_TOL = 1e-9
MINMAX_TOL = 1e-8
COMPARISON_SLACK = 1e-9
PROPORTIONAL_TOL = 1e-8


def _edge_arrays(data: JacobiData):
    g = data.graph
    i = np.array([g.index[e.u] for e in g.edges], dtype=int)
    j = np.array([g.index[e.v] for e in g.edges], dtype=int)
    a = np.array([data.a[e.id] for e in g.edges])
    return i, j, a


def ground_state_quadratic(data: JacobiData, psi, lam1: float, f) -> float:
    """Weighted Dirichlet sum ``sum_e a_e psi_v psi_w (f_v - f_w)^2`` (loops give 0)."""
    psi = np.asarray(psi, dtype=float)
    f = np.asarray(f, dtype=float)
    if (psi <= 0).any():
        raise NotPositive("ground state must be strictly positive")
    J = jacobi_matrix(data)
    resid = np.max(np.abs(J @ psi - lam1 * psi))
    if resid > GROUND_STATE_TOL * max(1.0, np.max(np.abs(J))):
        raise NotGroundState(f"J psi != lambda psi (residual {resid:.2e})")
    i, j, a = _edge_arrays(data)
    return float(np.sum(a * psi[i] * psi[j] * (f[i] - f[j]) ** 2))


def ground_state_form(data: JacobiData, psi, lam1: float, f) -> float:
    """``<f psi, (lambda_1 - J) f psi>`` evaluated directly."""
    g = np.asarray(f, dtype=float) * np.asarray(psi, dtype=float)
    J = jacobi_matrix(data)
    return float(lam1 * (g @ g) - g @ J @ g)


def ground_state_laplacian(data: JacobiData, psi) -> np.ndarray:
    """Matrix of ``f -> sum_e a_e psi_v psi_w (f_v - f_w)^2``."""
    psi = np.asarray(psi, dtype=float)
    L = np.zeros((data.graph.p, data.graph.p))
    for u, v, a in zip(*_edge_arrays(data)):
        if u == v:
            continue
        w = a * psi[u] * psi[v]
        L[u, u] += w
        L[v, v] += w
        L[u, v] -= w
        L[v, u] -= w
    return L


def minmax_gap(data: JacobiData, k: int) -> float:
    """``lambda_1 - lambda_k`` from the eigensolver, cross-checked against the
    k-th smallest eigenvalue of the ground-state pencil ``(L_psi, diag(psi^2))``."""
    p = data.graph.p
    if not 1 <= k <= p:
        raise InputError(f"k must be in 1..{p}")
    J = jacobi_matrix(data)
    direct = eigenvalues_desc(J).gap(k)
    _, psi = perron_pair(J)
    mu = scipy.linalg.eigh(ground_state_laplacian(data, psi), np.diag(psi**2), eigvals_only=True)
    via_ground_state = float(mu[k - 1])
    if abs(direct - via_ground_state) > MINMAX_TOL:
        raise VerificationError(
            f"min-max gap mismatch: {direct!r} vs {via_ground_state!r}"
        )
    return direct


def _same_graph(J: JacobiData, Jt: JacobiData) -> None:
    if J.graph != Jt.graph:
        raise GraphMismatch("both Jacobi matrices must live on the same multigraph")


def comparison_ratios(J: JacobiData, Jt: JacobiData):
    """``(S, I, psi, psi_tilde)`` with normalized Perron vectors."""
    _same_graph(J, Jt)
    _, psi = perron_pair(jacobi_matrix(J))
    _, psit = perron_pair(jacobi_matrix(Jt))
    i, j, a = _edge_arrays(J)
    _, _, at = _edge_arrays(Jt)
    S = float(np.max(a * psi[i] * psi[j] / (at * psit[i] * psit[j])))
    I = float(np.min(psi**2 / psit**2))
    return S, I, psi, psit


@dataclass(frozen=True)
class ComparisonReport:
    S: float
    I: float
    ks: list[int]
    gaps: list[float]
    gaps_tilde: list[float]
    checks: list[bool]
    proportional: float | None = None
    ratio_min: float | None = None
    ratio_max: float | None = None
    two_sided: list[bool] | None = None

    @property
    def all_pass(self) -> bool:
        return all(self.checks) and (self.two_sided is None or all(self.two_sided))

    def to_dict(self) -> dict:
        return {
            "S": self.S,
            "I": self.I,
            "table": [
                {"k": k, "gap": g, "gap_tilde": gt, "bound": self.S / self.I * gt, "ok": ok}
                for k, g, gt, ok in zip(self.ks, self.gaps, self.gaps_tilde, self.checks)
            ],
            "proportional": self.proportional,
            "ratio_min": self.ratio_min,
            "ratio_max": self.ratio_max,
            "two_sided": self.two_sided,
            "all_pass": self.all_pass,
        }


def verify_comparison(J: JacobiData, Jt: JacobiData, k_range=None, slack: float = COMPARISON_SLACK) -> ComparisonReport:
    S, I, psi, psit = comparison_ratios(J, Jt)
    p = J.graph.p
    ks = list(k_range) if k_range is not None else list(range(1, p + 1))
    if any(not 1 <= k <= p for k in ks):
        raise InputError(f"k values must lie in 1..{p}")
    ev = eigenvalues_desc(jacobi_matrix(J))
    evt = eigenvalues_desc(jacobi_matrix(Jt))
    gaps = [ev.gap(k) for k in ks]
    gapt = [evt.gap(k) for k in ks]
    checks = [g <= S / I * gt + slack for g, gt in zip(gaps, gapt)]
    rep = ComparisonReport(S, I, ks, gaps, gapt, checks)
    if np.max(np.abs(psi - psit)) <= PROPORTIONAL_TOL:
        _, _, a = _edge_arrays(J)
        _, _, at = _edge_arrays(Jt)
        lo, hi = float(np.min(a / at)), float(np.max(a / at))
        two = [lo * gt - slack <= g <= hi * gt + slack for g, gt in zip(gaps, gapt)]
        c = float(np.linalg.norm(psi) / np.linalg.norm(psit))
        rep = ComparisonReport(S, I, ks, gaps, gapt, checks, c, lo, hi, two)
    return rep


def constant_perron_condition(data: JacobiData, tol: float = 1e-12) -> float | None:
    """Common value C of ``b_v + 2 sum(loops at v) + sum(edges at v)`` if it is
    the same at every vertex, else None."""
    g = data.graph
    rows = {v: data.b[v] for v in g.vertices}
    for e in g.edges:
        w = data.a[e.id]
        if e.is_loop:
            rows[e.u] += 2 * w
        else:
            rows[e.u] += w
            rows[e.v] += w
    vals = np.array(list(rows.values()))
    if np.max(vals) - np.min(vals) <= tol * max(1.0, float(np.max(np.abs(vals)))):
        return float(vals.mean())
    return None
