"""Command-line interface.

JSON reports go to stdout (or ``--out``); human-readable tables go to stderr.
Exit codes: 0 success, 2 input error, 3 precondition unmet, 4 internal
verification failure.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import (
    BOUND_SLACK,
    BoundReport,
    ab_bound,
    admissible_r,
    asymptotic_matrix,
    check_test_vector,
    gap_upper_bound,
    verify_ab,
)
from .comparison import verify_comparison
from .decomposition import (
    DEFAULT_ENUMERATION_CAP,
    betti_number,
    block_decomposition,
    choose_spanning_tree,
    enumerate_spanning_choices,
)
from .errors import BoundViolation, InputError, InsufficientLevels, JacobiLiftError, NotAdmissible
from .graph_core import load_jacobi, load_weights
from .lifting import Cover, random_cover, sigma_from_spec
from .spectra import EIG_TOL, eigenvalues_desc, perron_pair
from .tower import MODES, conjecture_probe, greenberg_margin, run_tower


def _emit(report: dict, args) -> None:
    report = {**report, "created": _dt.datetime.now(_dt.timezone.utc).isoformat()}
    text = json.dumps(report, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _table(rows: list[list], header: list[str]) -> None:
    widths = [max(len(str(h)), *(len(_fmt(r[i])) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)), file=sys.stderr)
    for r in rows:
        print("  ".join(_fmt(x).rjust(w) for x, w in zip(r, widths)), file=sys.stderr)


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.6f}"
    return str(x)


def _block_form(args):
    data = load_jacobi(args.graph)
    tree = None
    if getattr(args, "tree", None):
        tree = [t for t in args.tree.split(",") if t]
    elif getattr(args, "tree_file", None):
        try:
            tree = json.loads(Path(args.tree_file).read_text())["tree_edges"]
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"cannot read tree spec: {exc}") from exc
    return block_decomposition(data, choose_spanning_tree(data.graph, tree))


def _cover(args, base) -> Cover:
    if args.cover:
        try:
            doc = json.loads(Path(args.cover).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read cover spec: {exc}") from exc
        return Cover(base, sigma_from_spec(doc))
    if args.random is not None:
        if args.seed is None:
            raise InputError("--random requires --seed")
        return random_cover(
            base, args.random, args.seed, require_connected=not args.allow_disconnected, cyclic=args.cyclic
        )
    return Cover(base, [[0]] * base.ell)


def _read_y(spec: str, base) -> tuple[np.ndarray, str]:
    if spec == "perron":
        return perron_pair(asymptotic_matrix(base))[1], "perron"
    if spec == "perron-j0":
        return perron_pair(base.J0)[1], "perron-j0"
    if spec == "uniform":
        return np.full(base.p, base.p**-0.5), "uniform"
    try:
        raw = np.asarray(json.loads(Path(spec).read_text()), dtype=float).ravel()
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        raise InputError(f"--y must be perron, perron-j0, uniform or a JSON file: {exc}") from exc
    if raw.shape != (base.p,):
        raise InputError(f"--y file must hold {base.p} numbers")
    if (raw < 0).any():
        check_test_vector(raw, base.p)  # raises NegativeEntry
    norm = np.linalg.norm(raw)
    if norm == 0:
        raise InputError("--y vector is zero")
    return raw / norm, spec


# -- subcommands ------------------------------------------------------------

def cmd_decompose(args) -> int:
    base = _block_form(args)
    report = {"betti_number": betti_number(base.data.graph), "block_form": base.to_dict()}
    if args.enumerate:
        choices = enumerate_spanning_choices(base.data.graph, args.limit)
        report["choices"] = [c.to_dict() for c in choices]
        report["choice_count"] = len(choices)
    print(f"ell={base.ell} d={base.d} p={base.p} cut={list(base.choice.cut_edges)}", file=sys.stderr)
    _emit(report, args)
    return 0


def cmd_lift(args) -> int:
    base = _block_form(args)
    cover = _cover(args, base)
    report = {"cover": cover.summary(), "lifted_matrix": cover.lifted_matrix.tolist() if args.matrix else None}
    print(f"n={cover.n} vertices={cover.size} connected={cover.connected} "
          f"skeleton_diameter={cover.skeleton_diameter()}", file=sys.stderr)
    _emit(report, args)
    return 0


def cmd_spectrum(args) -> int:
    base = _block_form(args)
    cover = _cover(args, base)
    spec = eigenvalues_desc(cover.lifted_matrix, tol=args.eig_tol)
    report = {
        "n": cover.n,
        "eigenvalues": spec.eigenvalues.tolist(),
        "residual": spec.residual,
        "lambda1": spec.lambda1,
        "lambda2": spec.lambda2 if len(spec) > 1 else None,
        "lambda1_base": eigenvalues_desc(base.J0, tol=args.eig_tol).lambda1,
    }
    print(f"lambda1={spec.lambda1:.12g} lambda2={report['lambda2']}", file=sys.stderr)
    _emit(report, args)
    return 0


def cmd_bound(args) -> int:
    base = _block_form(args)
    y, y_name = _read_y(args.y, base)
    cover = _cover(args, base)
    spec = eigenvalues_desc(cover.lifted_matrix, tol=args.eig_tol)
    labels = [args.j] if args.j else list(range(1, base.ell + 1))
    rows, checks = [], []
    best: tuple | None = None
    for j in labels:
        adm = admissible_r(cover, j)
        r_values = [args.r] if args.r else list(range(1, adm.r + 1))
        for r in r_values:
            if r > adm.r:
                continue
            v = verify_ab(cover, y, j, r, spectrum=spec, admissibility=adm, slack=args.bound_slack)
            rows.append([j, r, v.bound.value, v.lambda2, v.margin])
            checks.append(v)
            if best is None or v.bound.value > best[0].bound.value:
                best = (v, adm)
    if rows:
        _table(rows, ["j", "r", "bound", "lambda2", "margin"])
    if not checks:
        wanted = f"r={args.r}" if args.r else "any r >= 1"
        raise NotAdmissible(
            f"{wanted} is not admissible on this cover (n={cover.n}): no two same-label edges are far enough apart"
        )
    v, adm = best
    gap = gap_upper_bound(base, v.bound.r, v.bound.j)
    report = {
        "y_mode": y_name,
        "cover": cover.summary(),
        "lambda1": spec.lambda1,
        "lambda2": spec.lambda2,
        "best": v.to_dict(),
        "checks": [c.to_dict() for c in checks],
        "gap_upper_bound": gap.value,
        "gap": spec.lambda1 - spec.lambda2,
        "all_hold": all(c.holds for c in checks),
    }
    _emit(report, args)
    if not report["all_hold"]:
        raise BoundViolation("lambda2 fell below the lower bound beyond slack")
    return 0


def _parse_k_range(text: str | None, p: int):
    if not text:
        return None
    if ":" in text:
        lo, hi = text.split(":")
        return list(range(int(lo), int(hi) + 1))
    return [int(k) for k in text.split(",")]


def cmd_compare(args) -> int:
    data = load_jacobi(args.graph)
    J = load_weights(args.weights_a, data.graph)
    Jt = load_weights(args.weights_b, data.graph)
    try:
        ks = _parse_k_range(args.k_range, data.graph.p)
    except ValueError as exc:
        raise InputError(f"bad --k-range: {exc}") from exc
    rep = verify_comparison(J, Jt, ks, slack=args.bound_slack)
    d = rep.to_dict()
    _table([[t["k"], t["gap"], t["gap_tilde"], t["bound"], t["ok"]] for t in d["table"]],
           ["k", "gap", "gap~", "(S/I)gap~", "ok"])
    _emit(d, args)
    if not rep.all_pass:
        raise BoundViolation("comparison inequality violated beyond slack")
    return 0


def cmd_tower(args) -> int:
    base = _block_form(args)
    try:
        sizes = [int(s) for s in args.sizes.split(",") if s]
    except ValueError as exc:
        raise InputError(f"bad --sizes: {exc}") from exc
    if not sizes or max(sizes) < 2:
        raise InsufficientLevels("a tower needs at least one cover with n >= 2")
    rep = run_tower(base, sizes, args.seed, args.mode, bins=args.bins, ell_max=args.ell_max, jobs=args.jobs)
    margins = greenberg_margin(rep)
    _table([[m["n"], m["r"], m["margin"] if m["margin"] is not None else "-",
             m["corrected_margin"] if m["corrected_margin"] is not None else "-"] for m in margins],
           ["n", "r", "lambda2-tree", "lambda2-bound(r)"])
    out = {**rep.to_dict(), "margins": margins}
    if args.probe_conjecture:
        out["conjecture_probe"] = conjecture_probe(rep).to_dict()
    if args.csv:
        Path(args.csv).write_text(rep.histogram_csv())
    _emit(out, args)
    if not out["lambda1_invariant"]:
        raise BoundViolation("top eigenvalue changed along the tower")
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("graph", help="graph JSON file")
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--eig-tol", type=float, default=EIG_TOL)
    common.add_argument("--bound-slack", type=float, default=BOUND_SLACK)
    common.add_argument("--tree", help="comma-separated spanning-tree edge ids")
    common.add_argument("--tree-file", help='JSON file {"tree_edges": [...]}')

    cover_opts = argparse.ArgumentParser(add_help=False)
    cover_opts.add_argument("--cover", help='cover spec JSON {"n": int, "sigma": [[...]]}, 1-based')
    cover_opts.add_argument("--random", type=int, metavar="N", help="random N-sheeted cover")
    cover_opts.add_argument("--seed", type=int)
    cover_opts.add_argument("--cyclic", action="store_true", help="draw voltages among n-cycles")
    cover_opts.add_argument("--allow-disconnected", action="store_true")

    p = argparse.ArgumentParser(prog="jacobilift", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("decompose", parents=[common], help="spanning tree and block form")
    s.add_argument("--enumerate", action="store_true", help="list all spanning choices")
    s.add_argument("--limit", type=int, default=DEFAULT_ENUMERATION_CAP)
    s.set_defaults(func=cmd_decompose)

    s = sub.add_parser("lift", parents=[common, cover_opts], help="build a finite cover")
    s.add_argument("--matrix", action="store_true", help="include the lifted matrix")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("spectrum", parents=[common, cover_opts], help="eigenvalues of a cover")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("bound", parents=[common, cover_opts], help="check the lower bound on lambda2")
    s.add_argument("--r", type=int)
    s.add_argument("--j", type=int)
    s.add_argument("--y", default="perron", help="perron | perron-j0 | uniform | JSON file")
    s.set_defaults(func=cmd_bound)

    s = sub.add_parser("compare", help="gap comparison of two weightings of one graph")
    s.add_argument("graph")
    s.add_argument("weights_a")
    s.add_argument("weights_b")
    s.add_argument("--k-range", help="e.g. 1:5 or 2,3")
    s.add_argument("--out")
    s.add_argument("--bound-slack", type=float, default=BOUND_SLACK)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("tower", parents=[common], help="tower of covers")
    s.add_argument("--sizes", required=True, help="comma-separated sheet counts")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--mode", choices=MODES, default="random")
    s.add_argument("--bins", type=int, default=40)
    s.add_argument("--ell-max", type=int, default=40)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--probe-conjecture", action="store_true")
    s.add_argument("--csv", help="write per-level histograms as CSV")
    s.set_defaults(func=cmd_tower)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except JacobiLiftError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
