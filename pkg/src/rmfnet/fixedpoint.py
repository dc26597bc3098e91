"""Shared configuration, report type, and damped fixed-point iteration
used by both the replica-mean-field and thermodynamic-mean-field solvers."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = ["SolverConfig", "SolveReport", "solve_fixed_point"]


@dataclass
class SolverConfig:
    """Tolerances and iteration caps for the self-consistency solvers.

    quad_rel_tol / quad_abs_tol control the adaptive quadrature of the
    rate integrals; tail_tol bounds the certified truncation error of the
    improper integral over (-inf, 0]; fp_tol is the relative sup-norm
    change that stops the fixed-point iteration.
    """

    quad_rel_tol: float = 1e-10
    quad_abs_tol: float = 1e-12
    tail_tol: float = 1e-14
    fp_tol: float = 1e-10
    max_iter: int = 20
    damping: float = 1.0

    def __post_init__(self):
        for name in ("quad_rel_tol", "quad_abs_tol", "tail_tol", "fp_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if not 0 < self.damping <= 1:
            raise ValueError("damping must lie in (0, 1]")


@dataclass
class SolveReport:
    """Outcome of a self-consistency solve.

    final_residual is the maximum relative change of the last iteration;
    converged means that change dropped below fp_tol within max_iter.
    residual_ode optionally carries a per-neuron diagnostic of the
    generating-function equation at the returned rates.
    """

    beta: np.ndarray
    iterations: int
    final_residual: float
    converged: bool
    residual_ode: np.ndarray | None = field(default=None)

    def to_csv(self) -> str:
        lines = ["neuron,beta,iterations,converged,residual"]
        for i, b in enumerate(self.beta):
            lines.append(
                f"{i},{float(b)!r},{self.iterations},"
                f"{int(self.converged)},{self.final_residual!r}"
            )
        return "\n".join(lines) + "\n"


def solve_fixed_point(rhs, beta0, cfg: SolverConfig) -> SolveReport:
    """Iterate beta <- (1 - damping) beta + damping * rhs(beta).

    Stops when the relative sup-norm change falls below cfg.fp_tol or after
    cfg.max_iter iterations; convergence is reported, never asserted
    (uniqueness of the fixed point is not claimed).
    """
    beta = np.asarray(beta0, dtype=np.float64).copy()
    if np.any(beta <= 0):
        raise ValueError("initial rates must be strictly positive")
    change = np.inf
    iterations = 0
    converged = False
    for iterations in range(1, cfg.max_iter + 1):
        target = rhs(beta)
        new = beta + cfg.damping * (target - beta)
        change = float(np.max(np.abs(new - beta) / beta))
        beta = new
        if change < cfg.fp_tol:
            converged = True
            break
    return SolveReport(
        beta=beta,
        iterations=iterations,
        final_residual=change,
        converged=converged,
    )
