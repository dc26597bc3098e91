"""Rate-transfer function of a single neuron and its asymptotic regimes.

The transfer function maps fixed Poisson input rates and synaptic weights to
the neuron's stationary output rate.  It is evaluated through the same
smooth renewal-survival integrand as the network rate equations (the
bounded-interval form with its endpoint singularity is mathematically
identical; equality is exercised by tests, not assumed).

Two asymptotes bracket its behavior: output grows like the square root of
large input rates, and saturates to a finite bound for large weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fixedpoint import SolverConfig
from .rmf import SurvivalIntegrand
from .specfun import log_lower_gamma

__all__ = [
    "TransferQuery",
    "transfer_eval",
    "sqrt_asymptote",
    "saturation_bound",
    "transfer_sweep",
]


@dataclass(frozen=True)
class TransferQuery:
    """One neuron (tau, b, r) plus its inputs as (rate, weight) pairs."""

    tau: float
    b: float
    r: float
    inputs: tuple

    def __post_init__(self):
        object.__setattr__(
            self, "inputs", tuple((float(x), float(m)) for x, m in self.inputs)
        )
        if not (self.r > 0 and self.b >= self.r):
            raise ValueError("need 0 < reset <= base rate")
        if not self.tau > 0:
            raise ValueError("relaxation time must be positive (or inf)")
        for x, m in self.inputs:
            if x < 0 or m < 0:
                raise ValueError("rates and weights must be nonnegative")

    def rates(self) -> np.ndarray:
        return np.array([x for x, _ in self.inputs])

    def weights(self) -> np.ndarray:
        return np.array([m for _, m in self.inputs])


def transfer_eval(q: TransferQuery, cfg: SolverConfig | None = None) -> float:
    """Stationary output rate for the queried neuron and inputs."""
    cfg = cfg or SolverConfig()
    integ = SurvivalIntegrand(q.tau, q.b, q.r, q.weights(), q.rates())
    return 1.0 / integ.integral(cfg)


def sqrt_asymptote(q: TransferQuery) -> float:
    """Large-input-rate behavior: sqrt(2/pi * sum_j mu_j beta_j)."""
    drive = float(np.dot(q.weights(), q.rates()))
    if drive <= 0:
        raise ValueError("asymptote requires a nonzero total interaction rate")
    return math.sqrt(2.0 / math.pi * drive)


def saturation_bound(q: TransferQuery):
    """Large-weight saturation: returns (bound, corrected).

    The bound is exp(-A) A**B / (tau * lower_gamma(B, A)) with
    A = tau (b - r) and B = tau (b + sum_j beta_j); it collapses to
    b + sum_j beta_j when reset equals base.  ``corrected`` applies the
    first-order weight correction bound * (1 - sum_j beta_j / mu_j) and is
    None when any weight is zero (the correction is undefined there).
    """
    if not math.isfinite(q.tau):
        raise ValueError("saturation bound requires a finite relaxation time")
    rates = q.rates()
    total_in = float(rates.sum())
    if q.b == q.r:
        bound = q.b + total_in
    else:
        a = q.tau * (q.b - q.r)
        bb = q.tau * (q.b + total_in)
        bound = math.exp(
            -a + bb * math.log(a) - math.log(q.tau) - log_lower_gamma(bb, a)
        )
    weights = q.weights()
    if np.any(weights == 0.0):
        return bound, None
    corrected = bound * (1.0 - float(np.sum(rates / weights)))
    return bound, corrected


def transfer_sweep(
    q: TransferQuery,
    sweep: str,
    values,
    cfg: SolverConfig | None = None,
):
    """Evaluate the transfer function while sweeping all input rates or all
    input weights through the given values.

    Returns rows ``(value, F, sqrt_asymptote, bound, corrected)``; the
    corrected column is nan when undefined.
    """
    if sweep not in ("rates", "weights"):
        raise ValueError("sweep must be 'rates' or 'weights'")
    rows = []
    for val in values:
        if sweep == "rates":
            inputs = tuple((float(val), m) for _, m in q.inputs)
        else:
            inputs = tuple((x, float(val)) for x, _ in q.inputs)
        qq = TransferQuery(q.tau, q.b, q.r, inputs)
        f = transfer_eval(qq, cfg)
        asym = sqrt_asymptote(qq) if np.dot(qq.weights(), qq.rates()) > 0 else math.nan
        if math.isfinite(q.tau):
            bound, corrected = saturation_bound(qq)
        else:
            bound, corrected = math.nan, None
        rows.append(
            (float(val), f, asym, bound, math.nan if corrected is None else corrected)
        )
    return rows
