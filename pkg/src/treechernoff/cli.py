"""Command-line front end.

Exit codes: 0 success, 1 invalid model or pair, 2 I/O or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from treechernoff.exceptions import ModelError, TreeParseError
from treechernoff.experiment import (
    SIMULATION_HEADER,
    SURFACE_HEADER,
    normalized_ci,
    ratio_surface,
    simulate_exponent,
    write_simulation_csv,
    write_surface_csv,
)
from treechernoff.info_engine import chernoff, scalar_g
from treechernoff.lt_observe import optimize_alpha_numeric
from treechernoff.reduction import lambda_max, reduce_pair
from treechernoff.tree_model import (
    build_covariance,
    detect_graft,
    graft,
    parse_tree,
    serialize_tree,
    tree_determinant,
)


def _fmt(value) -> str:
    return f"{value:.12g}"


def _read_tree(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc
    return parse_tree(text)


def _read_pair(args):
    t1, t2 = _read_tree(args.tree1), _read_tree(args.tree2)
    if t1.n != t2.n:
        raise ModelError(f"trees have different node counts ({t1.n} vs {t2.n})")
    return t1, t2


def _report(pairs, out=None):
    width = max(len(k) for k, _ in pairs)
    for key, value in pairs:
        text = _fmt(value) if isinstance(value, float) else str(value)
        print(f"{key:<{width}}  {text}")
    if out:
        payload = {k: (v if not isinstance(v, np.ndarray) else v.tolist()) for k, v in pairs}
        Path(out).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_ci(args):
    t1, t2 = _read_pair(args)
    res = chernoff(build_covariance(t1), build_covariance(t2))
    _report(
        [
            ("chernoff_information", res.value),
            ("lambda_star", res.lambda_star),
            ("kl_to_1", res.kl_to_1),
            ("kl_to_2", res.kl_to_2),
            ("det1", tree_determinant(t1)),
            ("det2", tree_determinant(t2)),
        ],
        args.out,
    )


def cmd_reduce(args):
    t1, t2 = _read_pair(args)
    pair = detect_graft(t1, t2)
    cp = reduce_pair(pair)
    nc = normalized_ci(cp)
    i, j = pair.cut_edge
    _report(
        [
            ("cut_edge", f"{t1.label(i)}-{t1.label(j)}"),
            ("attach_node", t1.label(pair.attach_node)),
            ("w1", cp.w1),
            ("w2", cp.w2),
            ("beta", cp.beta),
            ("lambda_max", lambda_max(cp)),
            ("ci1", nc.ci1),
            ("ci2", nc.ci2),
            ("ratio", nc.ratio),
            ("normalized_ratio", nc.normalized_ratio),
        ],
        args.out,
    )


def cmd_graft(args):
    tree = _read_tree(args.tree)
    i, j, k = (tree.node_of(x) for x in (args.i, args.j, args.k))
    pair = graft(tree, (i, j), k)
    Path(args.out).write_text(serialize_tree(pair.tree2), encoding="utf-8")
    if args.out_original:
        Path(args.out_original).write_text(serialize_tree(pair.tree1), encoding="utf-8")
    _report([("w1", pair.w1), ("w2", pair.w2), ("written", args.out)])


def cmd_lt(args):
    t1, t2 = _read_pair(args)
    sol = optimize_alpha_numeric(build_covariance(t1), build_covariance(t2))
    alpha = "undefined" if sol.alpha is None else " ".join(_fmt(a) for a in sol.normalized_alpha)
    rows = [("alpha", alpha), ("ratio", sol.ratio), ("ci1", sol.ci)]
    try:
        cp = reduce_pair(detect_graft(t1, t2))
    except ModelError:
        cp = None
    if cp is not None:
        closed = scalar_g(lambda_max(cp))
        rows += [("ci1_closed_form", closed), ("closed_form_abs_diff", abs(closed - sol.ci))]
    _report(rows, args.out)


def cmd_simulate(args):
    t1, t2 = _read_pair(args)
    if args.tmin < 1 or args.tstep < 1 or args.tmax < args.tmin:
        raise ValueError("need 1 <= tmin <= tmax and tstep >= 1")
    grid = range(args.tmin, args.tmax + 1, args.tstep)
    est = simulate_exponent(
        build_covariance(t1),
        build_covariance(t2),
        mode=args.mode,
        t_grid=grid,
        trials=args.trials,
        seed=args.seed,
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_simulation_csv(est, fh)
    else:
        write_simulation_csv(est, sys.stdout)
    report = sys.stderr if not args.out else sys.stdout
    print(f"slope {_fmt(est.slope)}  stderr {_fmt(est.slope_stderr)}  raw_slope {_fmt(est.raw_slope)}", file=report)
    print(f"ci_reference {_fmt(est.ci_reference)}  lower_bound_only {est.lower_bound_only}", file=report)


def cmd_surface(args):
    if args.w1_steps < 1 or args.w2_steps < 1:
        raise ValueError("grid step counts must be positive")
    if not 0.0 < args.limit < 1.0:
        raise ValueError("--limit must lie in (0, 1)")
    w1 = np.linspace(-args.limit, args.limit, args.w1_steps)
    w2 = np.linspace(-args.limit, args.limit, args.w2_steps)
    rows = ratio_surface(w1, w2)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            write_surface_csv(rows, fh)
        ratios = [r.ratio for r in rows if r.valid]
        print(f"rows {len(rows)}  min_ratio {_fmt(min(ratios))}  max_ratio {_fmt(max(ratios))}")
    else:
        write_surface_csv(rows, sys.stdout)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="treechernoff",
        description="Chernoff information between Gaussian trees one graft apart.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def pair_command(name, func, help_text):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("tree1")
        p.add_argument("tree2")
        p.set_defaults(func=func)
        return p

    p = pair_command("ci", cmd_ci, "Chernoff information, lambda*, KL divergences and determinants")
    p.add_argument("--out", help="also write the report as JSON")
    p = pair_command("reduce", cmd_reduce, "reduce a grafted pair to its 3-node parameters")
    p.add_argument("--out", help="also write the report as JSON")
    p = pair_command("lt", cmd_lt, "optimal 1-D linear observation")
    p.add_argument("--out", help="also write the report as JSON")

    p = pair_command(
        "simulate",
        cmd_simulate,
        "Monte Carlo error rates; CSV columns: " + ", ".join(SIMULATION_HEADER),
    )
    p.add_argument("--mode", choices=("full", "lt"), default="full")
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--tmin", type=int, default=20)
    p.add_argument("--tmax", type=int, default=200)
    p.add_argument("--tstep", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("graft", help="cut edge I-J and reattach J's subtree at K")
    p.add_argument("tree")
    p.add_argument("i")
    p.add_argument("j")
    p.add_argument("k")
    p.add_argument("--out", required=True, help="path for the grafted tree")
    p.add_argument("--out-original", help="optional path for the normalized input tree")
    p.set_defaults(func=cmd_graft)

    p = sub.add_parser(
        "surface",
        help="CI2/CI1 over a (w1, w2) grid; CSV columns: " + ", ".join(SURFACE_HEADER),
    )
    p.add_argument("--w1-steps", type=int, default=50)
    p.add_argument("--w2-steps", type=int, default=50)
    p.add_argument("--limit", type=float, default=0.9, help="grid spans [-limit, limit]")
    p.add_argument("--out", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_surface)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (TreeParseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ModelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0
