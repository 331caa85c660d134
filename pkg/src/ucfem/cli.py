"""Command-line front end.

Exit codes: 0 pass, 2 expectation failure, 3 solver failure, 4 config error.
"""

import argparse
import os
import sys

import numpy as np

from . import config as cfg
from . import presets as preset_mod
from . import solutions
from .analysis import convergence_study
from .linalg import SingularSystemError
from .necessity import naive_fit_demo, NecessityError
from .solver import SolverError

EXIT_OK, EXIT_EXPECT, EXIT_SOLVER, EXIT_CONFIG = 0, 2, 3, 4


def _write_csv(path, table):
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(table.to_csv())


def _perturbation_field(name):
    if name == "none":
        return None
    if name == "cos2":
        return lambda x, y: 0.025 * (np.exp(y) - y) * np.cos(2.0 * np.pi * x)
    raise cfg.ConfigError("unknown perturbation %r" % (name,))


def cmd_list_presets(_args):
    for p in preset_mod.PRESETS:
        print("%-18s %s" % (p.name, p.anchor))
    return EXIT_OK


def cmd_run(args):
    try:
        conf = _load_config(args)
    except cfg.ConfigError as err:
        print("config error: %s" % err, file=sys.stderr)
        return EXIT_CONFIG

    out_dir = args.out or conf["out"]
    preset_name = args.preset or conf["preset"]
    try:
        if preset_name:
            return _run_preset(preset_name, out_dir, args.parallel)
        return _run_generic(conf, out_dir)
    except (SolverError, SingularSystemError) as err:
        print("solver failure: %s" % err, file=sys.stderr)
        return EXIT_SOLVER


def _load_config(args):
    if args.config:
        with open(args.config) as fh:
            conf = cfg.parse(fh.read())
    else:
        conf = cfg.from_overrides()
    overrides = {
        "fem.degree": args.degree,
        "fem.n_levels": args.n_levels,
        "stab.gamma": args.gamma,
        "trace.N": args.trace_n,
        "noise.eps": args.eps,
        "noise.seed": args.seed,
        "method": args.method,
    }
    return cfg.from_overrides(conf, **overrides)


def _run_preset(name, out_dir, parallel):
    try:
        preset = preset_mod.by_name(name)
    except KeyError as err:
        print("config error: %s" % err, file=sys.stderr)
        return EXIT_CONFIG
    if name == "necessity":
        return cmd_necessity(argparse.Namespace(n=8))

    tables = preset.run(parallel=parallel)
    for label, table in tables.items():
        path = os.path.join(out_dir, "%s__%s.csv" % (name, label))
        _write_csv(path, table)
        print("wrote %s (slope=%.3f)" % (path, table.slope()))
    ok = True
    for check_name, passed, detail in preset.check(tables):
        print("[%s] %s: %s" % ("PASS" if passed else "FAIL", check_name, detail))
        ok = ok and passed
    return EXIT_OK if ok else EXIT_EXPECT


def _run_generic(conf, out_dir):
    sol = solutions.by_name(conf["solution"])
    table = convergence_study(
        sol, conf.levels(), method=conf["method"], degree=conf["fem.degree"],
        gamma=conf["stab.gamma"], trace_n=conf["trace.N"],
        eps=conf["noise.eps"], seed=conf["noise.seed"],
        q_delta=_perturbation_field(conf["data.perturbation"]))
    path = os.path.join(out_dir, "run.csv")
    _write_csv(path, table)
    print("wrote %s (slope=%.3f)" % (path, table.slope()))
    return EXIT_OK


def cmd_necessity(args):
    try:
        report = naive_fit_demo(args.n)
    except NecessityError as err:
        print("necessity check failed: %s" % err, file=sys.stderr)
        return EXIT_EXPECT
    print("n=%d" % report["n"])
    print("null space dimension: %d" % report["null_dim"])
    print("coupling rank: %d (nonzero rows: %d)"
          % (report["coupling_rank"], report["coupling_nonzero_rows"]))
    print("interior residual: %.3e" % report["interior_residual"])
    print("boundary load mean residual: %.3e" % report["load_mean_residual"])
    print("fit objective vs ghost multiple:")
    for m, obj in zip(report["multiples"], report["objectives"]):
        print("  multiple %8g -> %.12f" % (m, obj))
    print("relative objective spread: %.3e" % report["objective_spread"])
    return EXIT_OK if report["objective_spread"] <= 1e-10 else EXIT_EXPECT


def build_parser():
    parser = argparse.ArgumentParser(prog="ucfem")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a preset or config-driven experiment")
    run.add_argument("--preset")
    run.add_argument("--config")
    run.add_argument("--out")
    run.add_argument("--degree", type=int)
    run.add_argument("--n-levels", type=int)
    run.add_argument("--gamma", type=float)
    run.add_argument("--trace-n", type=int)
    run.add_argument("--eps", type=float)
    run.add_argument("--seed", type=int)
    run.add_argument("--method")
    run.add_argument("--parallel", action="store_true")
    run.set_defaults(func=cmd_run)

    lp = sub.add_parser("list-presets", help="list experiment presets")
    lp.set_defaults(func=cmd_list_presets)

    nec = sub.add_parser("necessity", help="run the naive-fit counterexample")
    nec.add_argument("--n", type=int, default=8)
    nec.set_defaults(func=cmd_necessity)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
