"""Command-line front end.

Subcommands: generate, simulate, solve-rmf, solve-tmf, compare, scenario,
replica, transfer.  Everything is deterministic under fixed seeds; output
is CSV by default, JSON with --format json.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from .fixedpoint import SolverConfig
from .harness import (
    run_comparison,
    run_replica_convergence,
    run_scenario,
    scenario_names,
)
from .model import gen_feedforward, gen_random_recurrent, load_network, save_network
from .rmf import solve_rmf
from .simulator import SimConfig, simulate_lgl, simulate_replica
from .tmf import solve_tmf
from .transfer import TransferQuery, transfer_sweep


def _parse_tau(text: str) -> float:
    if text.lower() in ("inf", "infinite", "none"):
        return math.inf
    return float(text)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_spec(path: str):
    return load_network(Path(path).read_text())


def _solver_config(args) -> SolverConfig:
    return SolverConfig(
        fp_tol=args.fp_tol, max_iter=args.max_iter, damping=args.damping
    )


def _sim_config(args) -> SimConfig:
    return SimConfig(
        max_events=args.events, burn_in_fraction=args.burn_in, seed=args.seed
    )


def _add_solver_flags(p) -> None:
    p.add_argument("--max-iter", type=int, default=60)
    p.add_argument("--fp-tol", type=float, default=1e-8)
    p.add_argument("--damping", type=float, default=1.0)


def _add_sim_flags(p) -> None:
    p.add_argument("--events", type=int, default=1_000_000)
    p.add_argument("--burn-in", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)


def _add_io_flags(p, spec_required=True) -> None:
    if spec_required:
        p.add_argument("--spec", required=True, help="network document path")
    p.add_argument("--out", default=None, help="output path (stdout if omitted)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")


def _report_text(report, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {
                "beta": report.beta.tolist(),
                "iterations": report.iterations,
                "converged": bool(report.converged),
                "final_residual": report.final_residual,
            }
        )
    return report.to_csv()


def _sim_text(res, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(
            {
                "rates": res.rates.tolist(),
                "spike_counts": res.spike_counts.tolist(),
                "elapsed_time": res.elapsed_time,
            }
        )
    return res.to_csv()


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        prog="rmfnet",
        description="Mean-field analysis and exact simulation of excitatory "
        "intensity-based spiking networks",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="emit a benchmark network document")
    g.add_argument("--topology", choices=("recurrent", "feedforward"), required=True)
    g.add_argument("--K", type=int, default=100)
    g.add_argument("--layers", type=int, default=10)
    g.add_argument("--width", type=int, default=40)
    g.add_argument("--in-degree", type=int, required=True)
    g.add_argument("--weight-max", type=float, required=True)
    g.add_argument("--base", type=float, default=1.0)
    g.add_argument("--tau", type=_parse_tau, default=math.inf)
    g.add_argument("--seed", type=int, default=0)
    _add_io_flags(g, spec_required=False)

    s = sub.add_parser("simulate", help="discrete-event simulation")
    _add_io_flags(s)
    _add_sim_flags(s)
    s.add_argument(
        "--replicas", type=int, default=0,
        help="simulate this many replicas with randomized routing (0 = plain run)",
    )

    for name in ("solve-rmf", "solve-tmf"):
        p = sub.add_parser(name, help=f"{name[6:].upper()} self-consistency solve")
        _add_io_flags(p)
        _add_solver_flags(p)

    c = sub.add_parser("compare", help="simulate, solve both models, tabulate errors")
    _add_io_flags(c)
    _add_sim_flags(c)
    _add_solver_flags(c)

    sc = sub.add_parser("scenario", help="run a named benchmark scenario")
    sc.add_argument("--name", required=True, choices=scenario_names())
    sc.add_argument("--seed", type=int, default=0)
    sc.add_argument("--events", type=int, default=None)
    sc.add_argument("--out", default=None)
    sc.add_argument("--format", choices=("csv", "json"), default="csv")

    r = sub.add_parser("replica", help="finite-replica convergence table")
    _add_io_flags(r)
    _add_sim_flags(r)
    r.add_argument("--M", type=int, nargs="+", required=True)

    t = sub.add_parser("transfer", help="rate-transfer function sweep")
    t.add_argument("--tau", type=_parse_tau, default=1.0)
    t.add_argument("--base", type=float, default=1.0)
    t.add_argument("--reset", type=float, default=None)
    t.add_argument(
        "--input", action="append", required=True, metavar="RATE:WEIGHT",
        help="one input stream as rate:weight (repeatable)",
    )
    t.add_argument("--sweep", choices=("rates", "weights"), required=True)
    t.add_argument("--sweep-min", type=float, required=True)
    t.add_argument("--sweep-max", type=float, required=True)
    t.add_argument("--sweep-points", type=int, default=20)
    t.add_argument("--linear", action="store_true", help="linear grid (default log)")
    t.add_argument("--out", default=None)

    args = ap.parse_args(argv)

    if args.command == "generate":
        if args.topology == "recurrent":
            spec = gen_random_recurrent(
                args.K, args.in_degree, args.weight_max, args.base, args.tau,
                args.seed,
            )
        else:
            spec = gen_feedforward(
                args.layers, args.width, args.in_degree, args.weight_max,
                args.base, args.tau, args.seed,
            )
        _emit(save_network(spec) + "\n", args.out)

    elif args.command == "simulate":
        spec = _read_spec(args.spec)
        cfg = _sim_config(args)
        if args.replicas:
            res = simulate_replica(spec, args.replicas, cfg)
        else:
            res = simulate_lgl(spec, cfg)
        _emit(_sim_text(res, args.format), args.out)

    elif args.command in ("solve-rmf", "solve-tmf"):
        spec = _read_spec(args.spec)
        solver = solve_rmf if args.command == "solve-rmf" else solve_tmf
        report = solver(spec, _solver_config(args))
        _emit(_report_text(report, args.format), args.out)

    elif args.command in ("compare", "scenario"):
        if args.command == "compare":
            spec = _read_spec(args.spec)
            report = run_comparison(spec, _sim_config(args), _solver_config(args))
        else:
            report = run_scenario(args.name, args.seed, events=args.events)
        if args.format == "json":
            _emit(report.to_json() + "\n", args.out)
        elif args.out:
            Path(args.out).write_text(report.to_csv())
            Path(args.out + ".summary.csv").write_text(report.summary_csv())
        else:
            sys.stdout.write(report.to_csv())
            sys.stdout.write(report.summary_csv())

    elif args.command == "replica":
        spec = _read_spec(args.spec)
        rows = run_replica_convergence(spec, args.M, _sim_config(args))
        lines = ["M,class,rate_sim,rel_gap"]
        for row in rows:
            for c, (rate, gap) in enumerate(zip(row.rates, row.gaps)):
                lines.append(f"{row.M},{c},{float(rate)!r},{float(gap)!r}")
        _emit("\n".join(lines) + "\n", args.out)

    elif args.command == "transfer":
        inputs = []
        for item in args.input:
            rate, weight = item.split(":")
            inputs.append((float(rate), float(weight)))
        reset = args.base if args.reset is None else args.reset
        q = TransferQuery(args.tau, args.base, reset, tuple(inputs))
        import numpy as np

        if args.linear:
            values = np.linspace(args.sweep_min, args.sweep_max, args.sweep_points)
        else:
            values = np.geomspace(args.sweep_min, args.sweep_max, args.sweep_points)
        rows = transfer_sweep(q, args.sweep, values)
        lines = ["sweep_value,F,sqrt_asymptote,beta_bar,corrected"]
        for val, f, asym, bound, corr in rows:
            lines.append(f"{val!r},{f!r},{asym!r},{bound!r},{corr!r}")
        _emit("\n".join(lines) + "\n", args.out)

    return 0


if __name__ == "__main__":
    raise SystemExit(main())
