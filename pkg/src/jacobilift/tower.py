"""Towers of covers: second-eigenvalue trend toward the tree spectrum and
histogram evidence about the limiting eigenvalue distribution."""

from __future__ import annotations

import csv
import io
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .bounds import ab_bound, admissible_r_any, tree_sup_lower_bound
from .decomposition import BlockForm
from .errors import ConnectivityUnreachable, InputError, InsufficientLevels
from .lifting import MAX_CONNECT_ATTEMPTS, Cover, random_cover
from .spectra import counting_measure, eigenvalues_desc, tree_sup_estimate, TreeSupReport

MODES = ("random", "cyclic", "iterated-2-lift", "union")
DEFAULT_BINS = 40
LAMBDA1_TOL = 1e-9


@dataclass
class TowerLevel:
    n: int
    connected: bool
    lambda1: float
    lambda2: float | None
    histogram: list[float]
    distinct_atoms: int
    admissible_r: int
    admissible_j: int
    ab_value: float | None
    sigma: list[list[int]] = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)

    def to_dict(self, include_spectrum: bool = False) -> dict:
        d = {
            "n": self.n,
            "connected": self.connected,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "sup_support_estimate": self.lambda2,
            "histogram": self.histogram,
            "distinct_atoms": self.distinct_atoms,
            "admissible_r": self.admissible_r,
            "admissible_j": self.admissible_j,
            "ab_bound": self.ab_value,
        }
        if include_spectrum:
            d["eigenvalues"] = self.eigenvalues.tolist()
        return d


@dataclass
class TowerReport:
    mode: str
    seed: int
    bin_edges: list[float]
    lambda1_base: float
    tree_lower_bound: float
    tree_y: list[float]
    tree: TreeSupReport
    levels: list[TowerLevel]

    def to_dict(self, include_spectrum: bool = False) -> dict:
        return {
            "mode": self.mode,
            "seed": self.seed,
            "bin_edges": self.bin_edges,
            "lambda1_base": self.lambda1_base,
            "tree": {**self.tree.to_dict(), "lower_bound_y": self.tree_y},
            "levels": [lv.to_dict(include_spectrum) for lv in self.levels],
            "lambda1_invariant": all(
                abs(lv.lambda1 - self.lambda1_base) <= LAMBDA1_TOL for lv in self.levels
            ),
        }

    def histogram_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "bin_lo", "bin_hi", "mass"])
        for lv in self.levels:
            for lo, hi, m in zip(self.bin_edges, self.bin_edges[1:], lv.histogram):
                w.writerow([lv.n, repr(lo), repr(hi), repr(m)])
        return buf.getvalue()


def default_bin_edges(base: BlockForm, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Uniform bins over ``[-lambda_1(J0 with b -> -b) - 0.5, lambda_1(J0) + 0.5]``.

    Every lift satisfies ``lambda_min(J_n) >= -lambda_1`` of the lift of the
    base with negated potential, whose top eigenvalue is the base's.
    """
    J0 = base.J0
    flipped = J0 - 2 * np.diag(np.diag(base.B))
    lo = -eigenvalues_desc(flipped).lambda1 - 0.5
    hi = eigenvalues_desc(J0).lambda1 + 0.5
    return np.linspace(lo, hi, bins + 1)


def _two_lift(prev: Cover, rng: np.random.Generator) -> Cover:
    n = prev.n
    for _ in range(MAX_CONNECT_ATTEMPTS):
        sigma = []
        for s in prev.sigma:
            flips = rng.integers(0, 2, size=n)
            new = [0] * (2 * n)
            for t in (0, 1):
                for k in range(n):
                    new[t * n + k] = ((t ^ int(flips[k])) * n) + s[k]
            sigma.append(new)
        cover = Cover(prev.base, sigma, check=False)
        if cover.connected:
            return Cover(prev.base, sigma, check=True)
    raise ConnectivityUnreachable(f"no connected 2-lift of an {n}-cover found")


def _measure_level(cover: Cover, edges: np.ndarray, y_star: np.ndarray) -> TowerLevel:
    spec = eigenvalues_desc(cover.lifted_matrix)
    mu = counting_measure(spec)
    adm = admissible_r_any(cover)
    ab = ab_bound(cover.base, y_star, adm.j, adm.r).value if adm.r >= 1 else None
    return TowerLevel(
        n=cover.n,
        connected=cover.connected,
        lambda1=spec.lambda1,
        lambda2=spec.lambda2 if len(spec) > 1 else None,
        histogram=mu.histogram(edges).tolist(),
        distinct_atoms=len(mu.support()),
        admissible_r=adm.r,
        admissible_j=adm.j,
        ab_value=ab,
        sigma=cover.sigma_one_based(),
        eigenvalues=spec.eigenvalues,
    )


def run_tower(
    base: BlockForm,
    sizes,
    seed: int,
    mode: str = "random",
    *,
    bins: int = DEFAULT_BINS,
    ell_max: int = 40,
    jobs: int = 1,
) -> TowerReport:
    """Build one cover per size and record its spectrum.

    Modes: ``random`` (uniform voltages, resampled until connected),
    ``cyclic`` (uniform n-cycle voltages), ``iterated-2-lift`` (each level a
    random connected 2-lift of the previous one), ``union`` (disconnected
    copies of the base, a diagnostic). Level ``i`` of the random modes uses
    seed ``seed + i``.
    """
    sizes = [int(n) for n in sizes]
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}")
    if not sizes or any(n < 1 for n in sizes):
        raise InputError("sizes must be positive")
    if any(b <= a for a, b in zip(sizes, sizes[1:])) and not all(n == sizes[0] for n in sizes):
        raise InputError("sizes must be increasing")
    edges = default_bin_edges(base, bins)
    tb = tree_sup_lower_bound(base)
    y_star = np.asarray(tb.y)

    if mode == "iterated-2-lift":
        if any(b != 2 * a for a, b in zip(sizes, sizes[1:])):
            raise InputError("iterated 2-lifts need each size to double the previous one")
        rng = np.random.default_rng(seed)
        covers = [random_cover(base, sizes[0], seed)]
        for _ in sizes[1:]:
            covers.append(_two_lift(covers[-1], rng))
        levels = [_measure_level(c, edges, y_star) for c in covers]
    else:
        def build(idx_n):
            idx, n = idx_n
            if mode == "union":
                cover = Cover(base, [list(range(n))] * base.ell)
            else:
                cover = random_cover(base, n, seed + idx, require_connected=True, cyclic=mode == "cyclic")
            return _measure_level(cover, edges, y_star)

        with ThreadPoolExecutor(max_workers=max(1, jobs)) as ex:
            levels = list(ex.map(build, enumerate(sizes)))

    return TowerReport(
        mode=mode,
        seed=seed,
        bin_edges=edges.tolist(),
        lambda1_base=eigenvalues_desc(base.J0).lambda1,
        tree_lower_bound=tb.value,
        tree_y=list(tb.y),
        tree=tree_sup_estimate(base, ell_max),
        levels=levels,
    )


def greenberg_margin(report: TowerReport) -> list[dict]:
    """Per level: ``lambda_2 - tree lower bound`` and, where some r is
    admissible, ``lambda_2`` minus the finite-size bound at that r."""
    out = []
    for lv in report.levels:
        margin = None if lv.lambda2 is None else lv.lambda2 - report.tree_lower_bound
        corrected = None
        if lv.lambda2 is not None and lv.ab_value is not None:
            corrected = lv.lambda2 - lv.ab_value
        out.append({"n": lv.n, "margin": margin, "corrected_margin": corrected, "r": lv.admissible_r})
    return out


def spectra_nested(small: np.ndarray, large: np.ndarray, tol: float = 1e-9) -> bool:
    """Multiset containment of ``small`` in ``large`` up to ``tol``."""
    a = np.sort(small)
    b = np.sort(large)
    used = np.zeros(len(b), dtype=bool)
    for x in a:
        lo = int(np.searchsorted(b, x - tol, side="left"))
        hi = int(np.searchsorted(b, x + tol, side="right"))
        free = [k for k in range(lo, hi) if not used[k]]
        if not free:
            return False
        used[min(free, key=lambda k: abs(b[k] - x))] = True
    return True


@dataclass(frozen=True)
class ProbeReport:
    bracket: tuple[float, float]
    bins: list[tuple[float, float]]
    masses: list[list[float]]  # [level][bin]
    interesting: list[tuple[float, float]]
    sizes: list[int]

    def to_dict(self) -> dict:
        return {
            "label": "evidence only; not a test of the conjecture",
            "bracket": list(self.bracket),
            "sizes": self.sizes,
            "bins": [
                {"lo": lo, "hi": hi, "mass_by_level": [m[k] for m in self.masses],
                 "persistently_empty": (lo, hi) in self.interesting}
                for k, (lo, hi) in enumerate(self.bins)
            ],
        }


def conjecture_probe(report: TowerReport, persist_levels: int | None = None) -> ProbeReport:
    """Mass per histogram bin lying inside the moment bracket of the tree
    spectrum, over the connected levels. Bins empty at each of the last
    ``persist_levels`` levels (default: half of them, at least 2) are marked
    as candidate gaps; this is descriptive output, never a verdict."""
    levels = [lv for lv in report.levels if lv.connected]
    if len(levels) < 2:
        raise InsufficientLevels("the probe needs at least two connected levels")
    lo, hi = report.tree.inf_estimate, report.tree.estimate
    edges = report.bin_edges
    inside = [k for k in range(len(edges) - 1) if edges[k] >= lo and edges[k + 1] <= hi]
    masses = [[lv.histogram[k] for k in inside] for lv in levels]
    tail = persist_levels or max(2, len(levels) // 2)
    tail = min(tail, len(levels))
    empty = [
        (edges[k], edges[k + 1])
        for idx, k in enumerate(inside)
        if all(m[idx] == 0.0 for m in masses[-tail:])
    ]
    return ProbeReport(
        bracket=(lo, hi),
        bins=[(edges[k], edges[k + 1]) for k in inside],
        masses=masses,
        interesting=empty,
        sizes=[lv.n for lv in levels],
    )
