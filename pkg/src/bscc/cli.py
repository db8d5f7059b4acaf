"""Command-line interface.

Exit codes: 0 success, 2 usage or parse error, 3 infeasible configuration
(too many stragglers), 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import bounds
from .coded_pipeline import TARGET_FUNCTIONS, chebyshev_nodes_second_kind
from .errors import BSCCError, InvalidInput, InvalidStragglerCount, IoError, ReconstructionInfeasible
from .experiments import BACC, BSCC, ExperimentConfig, emit_csv, load_config, run_experiment, run_trial
from .spline_core import eval_basis, make_clamped_knots
from .spline_fit import fit_natural_cubic

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


def _float_list(text: str) -> list[float]:
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}") from None
    if not values:
        raise argparse.ArgumentTypeError("empty list")
    return values


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def cmd_basis(args, out) -> int:
    kv = make_clamped_knots(args.points, args.degree)
    z = np.asarray(args.at, dtype=float)
    first, values = eval_basis(kv, z)
    table = np.zeros((z.size, kv.n_basis))
    for row, (f, v) in enumerate(zip(first, values)):
        table[row, f : f + args.degree + 1] = v
    print(",".join(["z"] + [f"B{j}" for j in range(kv.n_basis)]), file=out)
    for zi, row in zip(z, table):
        print(",".join(_fmt(v) for v in [zi, *row]), file=out)
    return EXIT_OK


def cmd_fit(args, out) -> int:
    if len(args.nodes) != len(args.values):
        raise UsageError(f"--nodes has {len(args.nodes)} entries but --values has {len(args.values)}")
    spline = fit_natural_cubic(args.nodes, args.values)
    lo, hi = spline.span
    z = np.asarray(args.at, dtype=float)
    if np.any(z < lo) or np.any(z > hi):
        raise UsageError(f"--at points must lie in [{lo}, {hi}]")
    print("z,s", file=out)
    for zi, v in zip(z, spline(z)):
        print(f"{_fmt(zi)},{_fmt(v)}", file=out)
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    cfg = ExperimentConfig(
        N=args.n, K=args.k, block_rows=args.rows, block_cols=args.cols, s_values=(args.s,), trials=1,
        seed=args.seed, encoder=args.encoder, function=args.function, lo=args.lo, hi=args.hi,
    )
    print(f"N={cfg.N} K={cfg.K} S={args.s} function={cfg.function} encoder={cfg.encoder} seed={cfg.seed}", file=out)
    print("scheme,e_rel,e_rel_db,beta_clamped", file=out)
    for scheme in (BSCC, BACC):
        r = run_trial(cfg, scheme, args.s, 0)
        if r.error:
            raise ReconstructionInfeasible(r.error)
        print(f"{scheme},{_fmt(r.e_rel)},{_fmt(r.e_rel_db)},{str(r.clamped_beta_flag).lower()}", file=out)
    return EXIT_OK


_BOUND_FLAGS = {
    "bacc": (),
    "bscc-cheby": ("c", "c1", "g4sup"),
    "corollary": ("c", "c1", "g4sup", "hmin", "hmax"),
    "theorem2": ("c1", "dinf", "hmin", "hmax"),
}


def cmd_bounds(args, out) -> int:
    missing = [f"--{name}" for name in _BOUND_FLAGS[args.which] if getattr(args, name) is None]
    if missing:
        raise UsageError(f"--which {args.which} requires {', '.join(missing)}")
    if args.which == "bacc":
        value = bounds.bacc_bound(args.n, args.s)
    else:
        inputs = bounds.BoundInputs(
            args.n, args.s, C=args.c if args.c is not None else 1.0, C1=args.c1,
            g4_sup=args.g4sup or 0.0, D_inf=args.dinf,
        )
        if args.which == "bscc-cheby":
            h_min = args.hmin
            if h_min is None:
                h_min = bounds.knot_spacing_stats(chebyshev_nodes_second_kind(args.n)).h_min
            value = bounds.bscc_cheby_bound(inputs, h_min)
        else:
            if not 0 < args.hmin <= args.hmax:
                raise UsageError("need 0 < --hmin <= --hmax")
            stats = bounds.KnotSpacingStats(args.hmax, args.hmin)
            fn = bounds.corollary_bound if args.which == "corollary" else bounds.theorem2_bound
            value = fn(inputs, stats)
    print(_fmt(value), file=out)
    return EXIT_OK


def cmd_experiment(args, out) -> int:
    cfg = load_config(args.config)
    outdir = Path(args.out)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoError(outdir, exc.strerror or str(exc)) from exc
    result = run_experiment(cfg)
    emit_csv(result.records, result.aggregates, outdir / "trials.csv")
    for a in result.aggregates:
        print(
            f"{a.scheme} encoder={a.encoder} S={a.S} mean_e_rel={_fmt(a.mean_e_rel)} "
            f"mean_db={a.mean_db:.3f} std_db={a.std_db:.3f} trials={a.trials}",
            file=out,
        )
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="bscc", description="B-spline assisted coded computing toolkit")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("basis", help="tabulate clamped B-spline basis values")
    p.add_argument("--points", type=_float_list, required=True, help="strictly increasing breakpoints")
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--at", type=_float_list, required=True, help="evaluation points")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("fit", help="natural cubic spline through (node, value) pairs")
    p.add_argument("--nodes", type=_float_list, required=True)
    p.add_argument("--values", type=_float_list, required=True)
    p.add_argument("--at", type=_float_list, required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("simulate", help="one paired BSCC/BACC trial")
    p.add_argument("--n", type=int, required=True, help="number of workers")
    p.add_argument("--k", type=int, required=True, help="number of data blocks")
    p.add_argument("--s", type=int, default=0, help="number of stragglers")
    p.add_argument("--function", choices=sorted(TARGET_FUNCTIONS), default="xsinx")
    p.add_argument("--encoder", choices=["lagrange", "berrut"], default="lagrange")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rows", type=int, default=5)
    p.add_argument("--cols", type=int, default=5)
    p.add_argument("--lo", type=float, default=0.0)
    p.add_argument("--hi", type=float, default=1.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bounds", help="evaluate an error bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--s", type=int, default=0)
    p.add_argument("--which", choices=sorted(_BOUND_FLAGS), required=True)
    p.add_argument("--c", type=float)
    p.add_argument("--c1", type=float)
    p.add_argument("--g4sup", type=float)
    p.add_argument("--hmin", type=float)
    p.add_argument("--hmax", type=float)
    p.add_argument("--dinf", type=float)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment from a key=value config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True, help="output directory for the CSV files")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, out)
    except UsageError as exc:
        print(f"bscc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidStragglerCount, ReconstructionInfeasible) as exc:
        print(f"bscc: infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (IoError, OSError) as exc:
        print(f"bscc: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (InvalidInput, BSCCError) as exc:
        print(f"bscc: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return EXIT_OK if not exc.code else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
