"""Mean-field analysis of excitatory intensity-based spiking networks.

Exact discrete-event simulation of finite linear Galves-Locherbach
networks and their finite-replica versions, closed-form and quadrature
solvers for the replica-mean-field and thermodynamic-mean-field
self-consistency equations, rate-transfer asymptotics, and a benchmark
harness comparing solver predictions against simulation.
"""

from .fixedpoint import SolveReport, SolverConfig
from .harness import (
    ComparisonReport,
    ReplicaGap,
    run_comparison,
    run_replica_convergence,
    run_scenario,
    scenario_names,
    scenario_spec,
)
from .model import (
    NetworkSpec,
    gen_feedforward,
    gen_random_recurrent,
    load_network,
    save_network,
    validate,
)
from .rmf import (
    QuadratureError,
    counting_balance,
    counting_distribution,
    counting_pgf,
    counting_rate,
    ode_residual,
    rmf_mgf,
    rmf_rhs,
    solve_rmf,
)
from .simulator import SimConfig, SimResult, simulate_lgl, simulate_replica
from .specfun import expint_ei, log_lower_gamma, log_upper_gamma
from .tmf import (
    DegenerateDriveError,
    TmfState,
    effective_drive,
    solve_tmf,
    tmf_density,
    tmf_mgf,
    tmf_rhs,
)
from .transfer import TransferQuery, saturation_bound, sqrt_asymptote, transfer_eval

__version__ = "0.1.0"

__all__ = [
    "ComparisonReport",
    "DegenerateDriveError",
    "NetworkSpec",
    "QuadratureError",
    "ReplicaGap",
    "SimConfig",
    "SimResult",
    "SolveReport",
    "SolverConfig",
    "TmfState",
    "TransferQuery",
    "counting_balance",
    "counting_distribution",
    "counting_pgf",
    "counting_rate",
    "effective_drive",
    "expint_ei",
    "gen_feedforward",
    "gen_random_recurrent",
    "load_network",
    "log_lower_gamma",
    "log_upper_gamma",
    "ode_residual",
    "rmf_mgf",
    "rmf_rhs",
    "run_comparison",
    "run_replica_convergence",
    "run_scenario",
    "save_network",
    "scenario_names",
    "scenario_spec",
    "simulate_lgl",
    "simulate_replica",
    "solve_rmf",
    "solve_tmf",
    "sqrt_asymptote",
    "saturation_bound",
    "tmf_density",
    "tmf_mgf",
    "tmf_rhs",
    "transfer_eval",
    "validate",
]
