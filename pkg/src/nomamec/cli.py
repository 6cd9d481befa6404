"""Command-line entry point: ``nomamec <verb> ...``.

Exit status is 0 on success, 2 for invalid configs or arguments, 3 when the
scenario admits no solution (deadline too short, solver failure) and 1 for
I/O errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict

from .analytic import closed_form_ps, thresholds
from .errors import ConfigError, DegeneratePlan, InfeasibleDeadline, SolverError
from .experiments import PRESETS, McSettings, dump_config, load_config, load_network, reproduce, run_experiment
from .model import OffloadingPlan, time_feasible
from .montecarlo import estimate_ps
from .optimizer import optimal_plan

EXIT_IO, EXIT_CONFIG, EXIT_SOLVER = 1, 2, 3


def _parse_plan(text: str) -> OffloadingPlan:
    try:
        parts = [float(p) for p in text.split(",")]
    except ValueError:
        raise ConfigError(f"--plan expects five comma-separated numbers, got {text!r}") from None
    if len(parts) != 5:
        raise ConfigError(f"--plan expects t1,t2,beta_a,beta_b,lambda; got {len(parts)} values")
    return OffloadingPlan(*parts)


def _plan_dict(plan: OffloadingPlan) -> dict:
    out = asdict(plan)
    out["lambda"] = out.pop("lam")
    out["latency"] = plan.latency
    return out


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_optimize(args) -> None:
    cfg = load_network(args.config)
    plan, ps = optimal_plan(cfg)
    _emit({"plan": _plan_dict(plan), "ps": ps, "mode": "local" if plan.t1 == 0 else "offload"})


def cmd_evaluate(args) -> None:
    cfg = load_network(args.config)
    plan = _parse_plan(args.plan)
    thr = thresholds(cfg, plan)
    _emit({
        "plan": _plan_dict(plan),
        "time_feasible": time_feasible(cfg, plan),
        "gamma1": thr.gamma1,
        "gamma2": thr.gamma2,
        "ps": closed_form_ps(cfg, plan),
    })


def cmd_simulate(args) -> None:
    cfg = load_network(args.config)
    plan = _parse_plan(args.plan) if args.plan else optimal_plan(cfg)[0]
    est = estimate_ps(cfg, plan, args.n, args.seed, args.workers)
    _emit({
        "plan": _plan_dict(plan),
        "p_hat": est.p_hat,
        "stderr": est.stderr,
        "n": est.n,
        "seed": est.seed,
        "workers": est.workers,
        "ps_analytic": closed_form_ps(cfg, plan),
    })


def cmd_sweep(args) -> None:
    cfg = load_config(args.config)
    if args.echo:
        sys.stdout.write(dump_config(cfg))
        return
    rows, paths = run_experiment(cfg, args.out_dir)
    for path in paths:
        print(path)


def cmd_reproduce(args) -> None:
    mc = McSettings(args.n, args.seed, args.workers) if args.n is not None else None
    rows, paths = reproduce(args.figure, args.out_dir, mc)
    for path in paths:
        print(path)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nomamec",
        description="Success probability and optimal offloading for two-user uplink-NOMA edge computing.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="print the optimal plan and its success probability")
    p.add_argument("config")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("evaluate", help="closed-form success probability of a given plan")
    p.add_argument("config")
    p.add_argument("--plan", required=True, metavar="T1,T2,BETA_A,BETA_B,LAMBDA", help="SI units")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("simulate", help="Monte Carlo estimate (optimal plan unless --plan)")
    p.add_argument("config")
    p.add_argument("--plan", metavar="T1,T2,BETA_A,BETA_B,LAMBDA")
    p.add_argument("--n", type=int, default=1_000_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run an experiment config and write its CSV/SVG")
    p.add_argument("config")
    p.add_argument("--out-dir", default=None, help="directory for relative output paths")
    p.add_argument("--echo", action="store_true", help="print the normalized config and exit")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="run a shipped figure preset")
    p.add_argument("figure", choices=PRESETS)
    p.add_argument("--out-dir", default=".")
    p.add_argument("--n", type=int, default=None, help="override Monte Carlo sample count")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        args.func(args)
    except (ConfigError, DegeneratePlan) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (InfeasibleDeadline, SolverError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    return 0


if __name__ == "__main__":
    sys.exit(main())
