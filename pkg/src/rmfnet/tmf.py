"""Thermodynamic-mean-field solver: closed-form stationary density, MGF,
and self-consistency equations.

In this limit a neuron experiences its inputs as the deterministic drive
``s_i = b_i + tau_i * sum_j mu_ij beta_j``; its stationary intensity then
lives on [r_i, s_i] with a closed-form density, and the rate equation is a
normalization condition evaluated here in log space.

For counting-synapse neurons (infinite relaxation time) the same ansatz
turns the intensity into linear growth ``r + alpha t`` between resets,
giving a Gaussian-tail normalization handled through the a = 1/2 upper
incomplete gamma.  That branch is an extension interpolating the finite
relaxation formulas, provided behind the same interface.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fixedpoint import SolveReport, SolverConfig, solve_fixed_point
from .model import NetworkSpec
from .rmf import _check_beta
from .specfun import log_lower_gamma, log_upper_gamma

__all__ = [
    "TmfState",
    "DegenerateDriveError",
    "effective_drive",
    "tmf_rhs",
    "solve_tmf",
    "tmf_density",
    "tmf_mgf",
]

# below this relative excess of the drive over the reset the density
# collapses toward a point mass and the closed form is evaluated by limit
_DRIVE_EPS = 1e-8


class DegenerateDriveError(ValueError):
    """The effective drive equals the reset value: the stationary law is a
    point mass and the density/MGF closed forms do not apply."""


@dataclass(frozen=True)
class TmfState:
    """Effective drives and rates; ``s[i]`` is infinite for counting-synapse
    neurons with nonzero input."""

    s: np.ndarray
    beta: np.ndarray


def _interaction_drive(spec: NetworkSpec, beta: np.ndarray) -> np.ndarray:
    alpha = np.zeros(spec.K)
    for i, j, mu in spec.synapses:
        alpha[i] += mu * beta[j]
    return alpha


def effective_drive(spec: NetworkSpec, beta) -> TmfState:
    beta = _check_beta(spec, beta)
    alpha = _interaction_drive(spec, beta)
    tau = np.asarray(spec.tau)
    b = np.asarray(spec.b)
    with np.errstate(invalid="ignore"):
        s = np.where(alpha == 0.0, b, b + tau * alpha)
    return TmfState(s=s, beta=beta)


def tmf_rhs(spec: NetworkSpec, beta, cfg: SolverConfig | None = None) -> np.ndarray:
    """One application of the thermodynamic-mean-field rate map.

    Everything is closed form (no quadrature); cfg is accepted for interface
    symmetry with the replica-mean-field solver.
    """
    beta = _check_beta(spec, beta)
    alpha = _interaction_drive(spec, beta)
    out = np.empty(spec.K)
    for i in range(spec.K):
        tau, b, r = spec.tau[i], spec.b[i], spec.r[i]
        if math.isfinite(tau):
            s = b + tau * alpha[i]
            z = (s - r) * tau
            if z <= _DRIVE_EPS * s * tau:
                # gamma(a, x) ~ x**a / a collapses the normalization to 1/s
                out[i] = s
            else:
                a = tau * s
                log_inv = math.log(tau) + z + log_lower_gamma(a, z) - a * math.log(z)
                out[i] = math.exp(-log_inv)
        else:
            a = alpha[i]
            if a <= r * r * 1e-290:
                out[i] = r
            else:
                z = r * r / (2.0 * a)
                log_inv = z + log_upper_gamma(0.5, z) - 0.5 * math.log(2.0 * a)
                out[i] = math.exp(-log_inv)
    return out


def solve_tmf(
    spec: NetworkSpec,
    cfg: SolverConfig | None = None,
    beta0=None,
) -> SolveReport:
    """Damped fixed-point solve of the thermodynamic-mean-field equations;
    identical contract to the replica-mean-field solve."""
    cfg = cfg or SolverConfig()
    start = np.asarray(spec.b, dtype=np.float64) if beta0 is None else beta0
    return solve_fixed_point(lambda x: tmf_rhs(spec, x, cfg), start, cfg)


def _finite_drive(spec: NetworkSpec, beta: np.ndarray, i: int):
    tau = spec.tau[i]
    if not math.isfinite(tau):
        raise ValueError("closed-form density/MGF requires a finite relaxation time")
    alpha = 0.0
    for p, j, mu in spec.synapses:
        if p == i:
            alpha += mu * beta[j]
    s = spec.b[i] + tau * alpha
    r = spec.r[i]
    if s - r <= _DRIVE_EPS * s:
        raise DegenerateDriveError(
            f"neuron {i}: drive equals reset; stationary law is a point mass"
        )
    return tau, s, r


def tmf_density(spec: NetworkSpec, beta, i: int, lam: float) -> float:
    """Stationary intensity density of neuron i at the solved rates;
    supported on [r_i, s_i], zero outside."""
    beta = _check_beta(spec, beta)
    tau, s, r = _finite_drive(spec, beta, i)
    if lam < r or lam >= s:
        return 0.0
    a = tau * s
    log_p = (
        tau * (lam - r)
        - math.log(s - lam)
        + a * (math.log(s - lam) - math.log(s - r))
        + math.log(beta[i] * tau)
    )
    return math.exp(log_p)


def tmf_mgf(spec: NetworkSpec, beta, i: int, u: float) -> float:
    """Closed-form MGF of neuron i's stationary intensity; defined for
    u > -tau_i and normalized to 1 at u = 0 when beta solves the rate map."""
    beta = _check_beta(spec, beta)
    tau, s, r = _finite_drive(spec, beta, i)
    if u <= -tau:
        raise ValueError(f"MGF defined for u > -tau = {-tau}")
    a = tau * s
    x = (s - r) * (tau + u)
    log_l = (
        math.log(beta[i] * tau)
        + s * u
        + (s - r) * tau
        + log_lower_gamma(a, x)
        - a * math.log(x)
    )
    return math.exp(log_l)
