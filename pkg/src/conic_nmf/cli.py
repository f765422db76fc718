"""Command-line front end.

Subcommands::

    conic-nmf generate   --config FILE --out PREFIX [--KEY VALUE ...]
    conic-nmf factorize  MATRIX --K K [--solver S] [--init I] [--iters N] ...
    conic-nmf estimate-k MATRIX [--k-min A] [--k-max B] [--normalize]
    conic-nmf benchmark  --config FILE --report FILE [--KEY VALUE ...]

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .baselines import INITIALIZERS, SOLVERS, initialize
from .bench import BENCH_DEFAULTS, GENERATOR_DEFAULTS, build_generator_config, run_benchmark
from .cones import check_geometric_assumption
from .cr1nmf import factorize
from .errors import InputError, NumericalError, SingleCone
from .io import (
    read_config,
    read_matrix,
    write_json,
    write_labels,
    write_matrix,
)
from .rank import estimate_k
from .synth import generate

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3

GENERATOR_KEYS = list(GENERATOR_DEFAULTS) + ["beta", "mixing"]
BENCH_KEYS = list(BENCH_DEFAULTS) + ["beta", "mixing"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors already; keep messages on stderr
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _merged(args, keys):
    params = read_config(args.config) if args.config else {}
    for key in keys:
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    return params


def cmd_generate(args):
    params = _merged(args, GENERATOR_KEYS)
    cfg = build_generator_config(params)
    data = generate(cfg)
    prefix = args.out
    write_matrix(prefix + ".csv", data.V)
    write_labels(prefix + ".labels", data.labels)
    cones = cfg.cones
    meta = {
        "F": cfg.F,
        "N": cfg.N,
        "K": cfg.K,
        "seed": cfg.seed,
        "project": cfg.project,
        "alphas": cones.alphas,
        "lambdas": cfg.lambdas,
        "mixing": cfg.mixing,
        "beta": cones.beta,
        "bases": cones.bases,
        "params": params,
    }
    if cfg.K >= 2:
        holds, margin = check_geometric_assumption(cones)
        meta["assumption_holds"], meta["assumption_margin"] = holds, margin
    write_json(prefix + ".meta.json", meta)
    return EXIT_OK


def cmd_factorize(args):
    V = read_matrix(args.matrix)
    if V.size == 0:
        raise InputError(f"{args.matrix} holds an empty matrix")
    outdir = args.outdir
    os.makedirs(outdir, exist_ok=True)
    report_path = args.report or os.path.join(outdir, "report.json")
    rng = np.random.default_rng(args.seed)
    report = {"solver": args.solver, "K": args.K, "seed": args.seed}
    t0 = time.perf_counter()
    if args.solver == "cr1":
        pair, part = factorize(V, args.K)
        wall = time.perf_counter() - t0
        W, H, err = pair.W, pair.H, pair.relative_error
        report.update(
            trace=[err],
            sigmas=pair.info["sigmas"],
            cluster_sizes=pair.info["sizes"],
            empty_clusters=pair.info["empty_clusters"],
        )
    else:
        W0, H0 = initialize(args.init, V, args.K, rng)
        t_init = time.perf_counter() - t0
        res, trace = SOLVERS[args.solver](V, W0, H0, args.iters)
        wall = time.perf_counter() - t0
        W, H, err = res.W, res.H, res.relative_error
        report.update(init=args.init, iters=trace.iterations, trace=trace.errors,
                      trace_times=trace.times, init_time=t_init)
        with open(os.path.join(outdir, "trace.csv"), "w") as fh:
            fh.write("iteration,error\n")
            for i, e in enumerate(trace.errors):
                fh.write(f"{i},{e:.17g}\n")
    report.update(relative_error=err, wall_clock=wall)
    write_matrix(os.path.join(outdir, "W.csv"), W)
    write_matrix(os.path.join(outdir, "H.csv"), H)
    write_json(report_path, report)
    print(f"relative_error {err:.17g}")
    return EXIT_OK


def cmd_estimate_k(args):
    V = read_matrix(args.matrix, nonnegative=False)
    k_hat, ratios = estimate_k(V, args.k_min, args.k_max, normalize=args.normalize)
    k_min = k_hat - int(np.argmax(ratios))
    out = {"k_hat": k_hat, "k_min": k_min, "ratios": ratios}
    if args.report:
        write_json(args.report, out)
    write_json("-", out)
    return EXIT_OK


def cmd_benchmark(args):
    params = _merged(args, BENCH_KEYS)
    rows = run_benchmark(params)
    summary = {}
    for r in rows:
        key = f"{r['solver']}/{r['init']}/N={r['N']}"
        s = summary.setdefault(key, {"time_to_cr1": [], "relative_error": [], "wall_clock": []})
        for field in s:
            s[field].append(r[field])
    write_json(args.report, {"params": params, "rows": rows, "summary": summary})
    csv_path = os.path.splitext(args.report)[0] + ".csv"
    cols = ["N", "seed", "solver", "init", "relative_error", "wall_clock",
            "time_to_cr1", "iterations"]
    with open(csv_path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join(str(r[c]) for c in cols) + "\n")
    return EXIT_OK


def _add_keys(p, keys):
    for key in keys:
        p.add_argument(f"--{key}", default=None, help=f"override config key {key!r}")


def build_parser():
    parser = _Parser(prog="conic-nmf", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="sample a labeled dataset from a cone mixture")
    p.add_argument("--config", help="key = value file")
    p.add_argument("--out", required=True, help="output prefix")
    _add_keys(p, GENERATOR_KEYS)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("factorize", help="factorize a nonnegative matrix")
    p.add_argument("matrix", help="CSV or MatrixMarket file")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--solver", choices=["cr1"] + sorted(SOLVERS), default="cr1")
    p.add_argument("--init", choices=sorted(INITIALIZERS), default="cr1")
    p.add_argument("--iters", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--outdir", default=".")
    p.add_argument("--report", default=None, help="report path (default OUTDIR/report.json)")
    p.set_defaults(func=cmd_factorize)

    p = sub.add_parser("estimate-k", help="estimate the number of cones")
    p.add_argument("matrix")
    p.add_argument("--k-min", type=int, default=None)
    p.add_argument("--k-max", type=int, default=None)
    p.add_argument("--normalize", action="store_true",
                   help="scale columns to unit norm first")
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_estimate_k)

    p = sub.add_parser("benchmark", help="time solvers on generated data")
    p.add_argument("--config", help="key = value file")
    p.add_argument("--report", required=True, help="JSON report; a CSV is written next to it")
    _add_keys(p, BENCH_KEYS)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, SingleCone, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
