"""Benchmark orchestration: run the simulator and both mean-field solvers
on one network and tabulate per-neuron relative errors.

Error metric: per neuron, |rate_solver - rate_sim| / rate_sim; aggregates
are the arithmetic mean and the max over neurons with at least one
presynaptic partner (driving neurons fire as plain Poisson processes and
carry no approximation content).  Runs are deterministic given all seeds.
"""

from __future__ import annotations

import hashlib
import importlib.resources
import json
import math
from dataclasses import dataclass

import numpy as np

from .fixedpoint import SolveReport, SolverConfig
from .model import NetworkSpec, gen_feedforward, gen_random_recurrent, save_network
from .rmf import solve_rmf
from .simulator import SimConfig, SimResult, simulate_lgl, simulate_replica
from .tmf import solve_tmf

__all__ = [
    "ComparisonReport",
    "ReplicaGap",
    "run_comparison",
    "run_scenario",
    "run_replica_convergence",
    "scenario_names",
    "scenario_spec",
]

# desk-scale default for scenario runs; full reproduction uses 10x more
_DEFAULT_SCENARIO_EVENTS = 1_000_000


def _fmt(x) -> str:
    return repr(float(x))


def spec_digest(spec: NetworkSpec) -> str:
    return hashlib.sha256(save_network(spec).encode()).hexdigest()[:16]


@dataclass
class ComparisonReport:
    """Per-neuron rates from simulation and both solvers, with error
    aggregates over non-driving neurons and an echo of the run config."""

    rate_sim: np.ndarray
    rate_rmf: np.ndarray
    rate_tmf: np.ndarray
    err_rmf: np.ndarray
    err_tmf: np.ndarray
    driving: np.ndarray
    mean_err_rmf: float
    max_err_rmf: float
    mean_err_tmf: float
    max_err_tmf: float
    spec_hash: str
    seed: int
    events: int
    fp_tol: float
    max_iter: int
    rmf_report: SolveReport
    tmf_report: SolveReport
    sim: SimResult

    def to_csv(self) -> str:
        lines = ["neuron,rate_sim,rate_rmf,rate_tmf,err_rmf,err_tmf"]
        for i in range(len(self.rate_sim)):
            lines.append(
                f"{i},{_fmt(self.rate_sim[i])},{_fmt(self.rate_rmf[i])},"
                f"{_fmt(self.rate_tmf[i])},{_fmt(self.err_rmf[i])},"
                f"{_fmt(self.err_tmf[i])}"
            )
        return "\n".join(lines) + "\n"

    def summary_csv(self) -> str:
        return (
            "method,mean_rel_err,max_rel_err\n"
            f"rmf,{_fmt(self.mean_err_rmf)},{_fmt(self.max_err_rmf)}\n"
            f"tmf,{_fmt(self.mean_err_tmf)},{_fmt(self.max_err_tmf)}\n"
        )

    def to_json(self) -> str:
        return json.dumps(
            {
                "spec_hash": self.spec_hash,
                "seed": self.seed,
                "events": self.events,
                "fp_tol": self.fp_tol,
                "max_iter": self.max_iter,
                "rmf_converged": bool(self.rmf_report.converged),
                "tmf_converged": bool(self.tmf_report.converged),
                "mean_err_rmf": self.mean_err_rmf,
                "max_err_rmf": self.max_err_rmf,
                "mean_err_tmf": self.mean_err_tmf,
                "max_err_tmf": self.max_err_tmf,
                "rate_sim": self.rate_sim.tolist(),
                "rate_rmf": self.rate_rmf.tolist(),
                "rate_tmf": self.rate_tmf.tolist(),
            }
        )


def run_comparison(
    spec: NetworkSpec,
    sim_cfg: SimConfig | None = None,
    solver_cfg: SolverConfig | None = None,
) -> ComparisonReport:
    """Simulate and solve the same network; solver non-convergence is
    reported in the embedded SolveReports, never raised."""
    sim_cfg = sim_cfg or SimConfig()
    solver_cfg = solver_cfg or SolverConfig()
    sim = simulate_lgl(spec, sim_cfg)
    rmf = solve_rmf(spec, solver_cfg)
    tmf = solve_tmf(spec, solver_cfg)
    err_rmf = np.abs(rmf.beta - sim.rates) / sim.rates
    err_tmf = np.abs(tmf.beta - sim.rates) / sim.rates
    has_input = np.zeros(spec.K, dtype=bool)
    for i, _, _ in spec.synapses:
        has_input[i] = True
    # with no synapses at all every neuron is driving; aggregate over all
    scored = has_input if has_input.any() else np.ones(spec.K, dtype=bool)
    return ComparisonReport(
        rate_sim=sim.rates,
        rate_rmf=rmf.beta,
        rate_tmf=tmf.beta,
        err_rmf=err_rmf,
        err_tmf=err_tmf,
        driving=~has_input,
        mean_err_rmf=float(err_rmf[scored].mean()),
        max_err_rmf=float(err_rmf[scored].max()),
        mean_err_tmf=float(err_tmf[scored].mean()),
        max_err_tmf=float(err_tmf[scored].max()),
        spec_hash=spec_digest(spec),
        seed=sim_cfg.seed,
        events=sim_cfg.max_events,
        fp_tol=solver_cfg.fp_tol,
        max_iter=solver_cfg.max_iter,
        rmf_report=rmf,
        tmf_report=tmf,
        sim=sim,
    )


def _load_scenarios() -> dict:
    text = (
        importlib.resources.files("rmfnet").joinpath("scenarios.json").read_text()
    )
    return json.loads(text)


def scenario_names() -> list[str]:
    return sorted(_load_scenarios()["scenarios"].keys())


def scenario_spec(name: str, seed: int) -> NetworkSpec:
    """Instantiate one of the named benchmark topologies."""
    cfg = _load_scenarios()
    try:
        sc = cfg["scenarios"][name]
    except KeyError:
        raise ValueError(
            f"unknown scenario {name!r}; known: {', '.join(scenario_names())}"
        ) from None
    base = cfg["base_rate"]
    if sc["topology"] == "recurrent":
        return gen_random_recurrent(
            K=sc["K"],
            in_degree=sc["in_degree"],
            weight_max=sc["weight_max"],
            base=base,
            tau=math.inf,
            seed=seed,
        )
    return gen_feedforward(
        layers=sc["layers"],
        width=sc["width"],
        in_degree=sc["in_degree"],
        weight_max=sc["weight_max"],
        base=base,
        tau=math.inf,
        seed=seed,
    )


def run_scenario(
    name: str,
    seed: int,
    events: int | None = None,
    solver_cfg: SolverConfig | None = None,
) -> ComparisonReport:
    """Generate a benchmark topology and run the full comparison on it."""
    spec = scenario_spec(name, seed)
    sim_cfg = SimConfig(max_events=events or _DEFAULT_SCENARIO_EVENTS, seed=seed)
    solver_cfg = solver_cfg or SolverConfig(fp_tol=1e-8, max_iter=60)
    return run_comparison(spec, sim_cfg, solver_cfg)


@dataclass
class ReplicaGap:
    """Class rates of one finite-replica run and their relative gaps to the
    mean-field rates (one gap per class; sup_gap is their maximum)."""

    M: int
    rates: np.ndarray
    gaps: np.ndarray
    sup_gap: float


def run_replica_convergence(
    spec: NetworkSpec,
    M_list,
    sim_cfg: SimConfig | None = None,
    solver_cfg: SolverConfig | None = None,
):
    """Simulate the finite-replica network for each M and report the
    relative gap of the class rates to the mean-field prediction."""
    sim_cfg = sim_cfg or SimConfig()
    solver_cfg = solver_cfg or SolverConfig(fp_tol=1e-10, max_iter=200)
    beta = solve_rmf(spec, solver_cfg).beta
    rows = []
    for M in M_list:
        if M < 2:
            raise ValueError("replica counts must be >= 2")
        res = simulate_replica(spec, M, sim_cfg)
        gaps = np.abs(res.rates - beta) / beta
        rows.append(
            ReplicaGap(M=int(M), rates=res.rates, gaps=gaps, sup_gap=float(gaps.max()))
        )
    return rows
