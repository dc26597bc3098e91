"""Replica-mean-field self-consistency solver.

Closed forms for the homogeneous counting model, plus the general
heterogeneous solver built on the renewal-survival representation: the
stationary rate of a neuron bombarded by independent Poisson inputs is the
inverse mean of its inter-spike interval,

    1 / F_i = integral over v in (-inf, 0] of exp(E_i(v)) dv,

where exp(E_i(v)) is the probability that the interval exceeds -v.  The
exponent E_i is concave, increasing, and 0 at v = 0, which yields a
certified exponential bound for truncating the improper integral.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

from .fixedpoint import SolveReport, SolverConfig, solve_fixed_point
from .model import NetworkSpec, in_edges
from .specfun import ei_scaled, exp_scaled_ei, log_lower_gamma

__all__ = [
    "QuadratureError",
    "SurvivalIntegrand",
    "counting_balance",
    "counting_rate",
    "counting_distribution",
    "counting_pgf",
    "rmf_rhs",
    "solve_rmf",
    "rmf_mgf",
    "ode_residual",
]

# relative gap |F_i(beta) - beta_i| / beta_i accepted as "at the fixed point"
# when evaluating generating functions at a solved rate vector
_FIXED_POINT_CHECK_TOL = 1e-6


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


# ---------------------------------------------------------------------------
# homogeneous counting model, closed form
# ---------------------------------------------------------------------------


def counting_balance(c: float, base_over_mu: float) -> float:
    """Strictly increasing balance function of the rescaled interaction level.

    Equals the number of presynaptic partners K - 1 exactly at the
    stationary point; vanishes as c -> 0+ and grows without bound.
    Evaluated through the log-space lower incomplete gamma so that large
    arguments do not overflow.
    """
    if c < 0:
        raise ValueError("c must be nonnegative")
    if c == 0.0:
        return 0.0
    a = base_over_mu + c
    return math.exp((1.0 - a) * math.log(c) + c + log_lower_gamma(a, c))


def counting_rate(K: int, b: float, mu: float) -> float:
    """Stationary rate of the homogeneous fully connected counting model.

    Solves beta = mu c**a e**-c / lower_gamma(a, c) with
    a = ((K-1) beta + b) / mu and c = (K-1) beta / mu by bracketing the
    monotone balance function and root-finding on its log.  Degenerate
    branches: mu = 0 or K = 1 give independent neurons, beta = b.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if not b > 0:
        raise ValueError("base rate must be positive")
    if mu < 0:
        raise ValueError("interaction weight must be >= 0")
    if K == 1 or mu == 0.0:
        return float(b)
    x = b / mu
    target = math.log(K - 1.0)

    def g(c):
        a = x + c
        return (1.0 - a) * math.log(c) + c + log_lower_gamma(a, c) - target

    lo = hi = 1.0
    while g(lo) > 0.0:
        lo /= 8.0
        if lo < 1e-280:
            raise RuntimeError("failed to bracket the stationary point from below")
    while g(hi) < 0.0:
        hi *= 8.0
        if hi > 1e15:
            raise RuntimeError("failed to bracket the stationary point from above")
    c = brentq(g, lo, hi, xtol=1e-300, rtol=1e-15)
    return mu * c / (K - 1.0)


def counting_rate_log_prefactor(K: int, b: float, mu: float):
    """(beta, a, c, log(c**a e**-c / gamma(a, c))) for the solved counting model."""
    beta = counting_rate(K, b, mu)
    c = (K - 1.0) * beta / mu
    a = c + b / mu
    log_pref = a * math.log(c) - c - log_lower_gamma(a, c)
    return beta, a, c, log_pref


def counting_distribution(K: int, b: float, mu: float, n_max: int):
    """Stationary distribution of the received-spike count since last reset.

    Returns ``(p, tail_mass)`` where ``p[n] = pref * c**n / (a (a+1)...(a+n))``
    is computed in log space and ``tail_mass = 1 - sum(p)``.
    """
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    if K == 1:
        p = np.zeros(n_max + 1)
        p[0] = 1.0
        return p, 0.0
    if mu == 0.0:
        # independent Poisson arrivals over an exponential inter-spike time
        q = (K - 1.0) / (b + K - 1.0)
        n = np.arange(n_max + 1)
        p = (1.0 - q) * q**n
        return p, q ** (n_max + 1)
    _, a, c, log_pref = counting_rate_log_prefactor(K, b, mu)
    log_c = math.log(c)
    lp = np.empty(n_max + 1)
    lp[0] = log_pref - math.log(a)
    for n in range(1, n_max + 1):
        lp[n] = lp[n - 1] + log_c - math.log(a + n)
    p = np.exp(lp)
    return p, max(0.0, 1.0 - float(p.sum()))


def counting_pgf(K: int, b: float, mu: float, z: float) -> float:
    """Probability-generating function of the stationary count at z in [0, 1].

    Evaluated in log space; the z -> 0 limit is taken analytically (it equals
    the stationary probability of a zero count).
    """
    if not 0.0 <= z <= 1.0:
        raise ValueError("z must lie in [0, 1]")
    if K == 1:
        return 1.0
    if mu == 0.0:
        return b / (b + (K - 1.0) * (1.0 - z))
    beta, a, c, log_pref = counting_rate_log_prefactor(K, b, mu)
    if z == 0.0:
        return beta / ((K - 1.0) * beta + b)
    log_g = (
        c * (z - 1.0)
        - a * math.log(z)
        + log_lower_gamma(a, z * c)
        - log_lower_gamma(a, c)
    )
    return math.exp(log_g)


# ---------------------------------------------------------------------------
# general heterogeneous solver
# ---------------------------------------------------------------------------


class SurvivalIntegrand:
    """Renewal-survival exponent of one neuron under Poisson bombardment.

    Parameters are the neuron's relaxation time, base rate, reset value, and
    the (weight, rate) pairs of its inputs.  ``exponent(v)`` returns E(v)
    with exp(E(v)) = P(interval > -v) for v <= 0; E(0) = 0, E' > 0, and
    E'' <= 0 (reset never exceeds the base rate), so the tail of the
    improper integral admits the bound exp(E(v0)) / E'(v0).
    """

    def __init__(self, tau, b, r, mu, beta_in):
        self.tau = float(tau)
        self.b = float(b)
        self.r = float(r)
        mu = np.asarray(mu, dtype=np.float64).reshape(-1)
        beta_in = np.asarray(beta_in, dtype=np.float64).reshape(-1)
        if mu.shape != beta_in.shape:
            raise ValueError("weights and input rates must align")
        if np.any(beta_in < 0) or np.any(mu < 0):
            raise ValueError("weights and input rates must be nonnegative")
        # zero-weight synapses contribute identically zero, zero-rate inputs
        # never fire; both drop out of the exponent
        keep = (mu > 0) & (beta_in > 0)
        self.mu = mu[keep]
        self.beta = beta_in[keep]
        self.finite = math.isfinite(self.tau)
        if self.finite:
            self.y = self.tau * self.mu
            self.ei_y = np.atleast_1d(ei_scaled(self.y)) if self.mu.size else self.y

    def exponent(self, v: float) -> float:
        """E(v) for scalar v <= 0."""
        if self.finite:
            ew = math.exp(v / self.tau)
            growth = self.tau * (ew - 1.0)
            e = (self.r - self.b) * growth + self.b * v
            if self.mu.size:
                h = self.tau * (exp_scaled_ei(self.y * ew, self.y) - self.ei_y) - v
                e -= float(np.dot(self.beta, h))
            return e
        e = self.r * v
        if self.mu.size:
            with np.errstate(under="ignore"):
                h = np.expm1(self.mu * v) / self.mu - v
            e -= float(np.dot(self.beta, h))
        return e

    def slope(self, v: float) -> float:
        """dE/dv; positive everywhere and nonincreasing in v."""
        if self.finite:
            ew = math.exp(v / self.tau)
            s = self.r * ew - self.b * (ew - 1.0)
            if self.mu.size:
                with np.errstate(under="ignore"):
                    s -= float(np.dot(self.beta, np.expm1(self.y * (ew - 1.0))))
            return s
        s = self.r
        if self.mu.size:
            with np.errstate(under="ignore"):
                s -= float(np.dot(self.beta, np.expm1(self.mu * v)))
        return s

    def truncation_point(self, tail_tol: float, upper: float = 0.0) -> float:
        """Leftmost abscissa such that the omitted tail of
        integral exp(E(v) - E(upper)) dv is provably below tail_tol.

        Concavity gives E(v) <= E(v0) + E'(v0) (v - v0) for v <= v0, hence
        tail <= exp(E(v0) - E(upper)) / E'(v0); the candidate point is pushed
        left geometrically until that bound drops below tolerance.
        """
        shift = self.exponent(upper)
        span = max(1.0, 1.0 / self.r)
        v0 = upper - span
        for _ in range(200):
            rho = self.slope(v0)
            if self.exponent(v0) - shift <= math.log(tail_tol * rho):
                return v0
            span *= 2.0
            v0 = upper - span
        raise QuadratureError("tail truncation did not certify")

    def _breakpoints(self, v_min: float, upper: float) -> list[float]:
        # boundary layer at the right end: blend the hazard scale 1/r with
        # the curvature scale of the exponent
        if self.finite:
            kappa = (self.b - self.r) / self.tau + float(
                np.dot(self.beta, self.mu)
            )
        else:
            kappa = float(np.dot(self.beta, self.mu)) if self.mu.size else 0.0
        w = 1.0 / math.sqrt(self.r * self.r + kappa)
        pts = []
        x = 0.25 * w
        while upper - x > v_min:
            pts.append(upper - x)
            x *= 4.0
        return sorted(pts)

    def integral(self, cfg: SolverConfig, upper: float = 0.0, shift: float = 0.0):
        """integral over (-inf, upper] of exp(E(v) - shift) dv by adaptive
        quadrature over the certified finite window."""
        v_min = self.truncation_point(cfg.tail_tol, upper)
        pts = self._breakpoints(v_min, upper)

        def f(v):
            with np.errstate(under="ignore"):
                return math.exp(self.exponent(v) - shift)

        res = quad(
            f,
            v_min,
            upper,
            epsabs=cfg.quad_abs_tol,
            epsrel=cfg.quad_rel_tol,
            limit=500,
            points=pts if pts else None,
            full_output=1,
        )
        if len(res) > 3:
            raise QuadratureError(f"rate integral did not converge: {res[3]}")
        value, abserr = res[0], res[1]
        if abserr > 50.0 * max(cfg.quad_abs_tol, cfg.quad_rel_tol * abs(value)):
            raise QuadratureError(
                f"rate integral error {abserr:.3e} exceeds tolerance at value {value:.6e}"
            )
        return value


def _integrands(spec: NetworkSpec, beta: np.ndarray):
    edges = in_edges(spec)
    return [
        SurvivalIntegrand(spec.tau[i], spec.b[i], spec.r[i], mus, beta[js])
        for i, (js, mus) in enumerate(edges)
    ]


def _check_beta(spec: NetworkSpec, beta) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (spec.K,):
        raise ValueError(f"rate vector must have shape ({spec.K},)")
    if not np.all(beta > 0) or not np.all(np.isfinite(beta)):
        raise ValueError("rates must be strictly positive and finite")
    return beta


def rmf_rhs(spec: NetworkSpec, beta, cfg: SolverConfig | None = None) -> np.ndarray:
    """One application of the self-consistency map: component i is the
    stationary output rate of neuron i when its inputs fire as independent
    Poisson processes at the given rates.

    Neurons with identical parameters and identical input (weight, rate)
    multisets share one quadrature; the result is independent of evaluation
    order.
    """
    cfg = cfg or SolverConfig()
    beta = _check_beta(spec, beta)
    edges = in_edges(spec)
    out = np.empty(spec.K)
    memo: dict = {}
    for i, (js, mus) in enumerate(edges):
        key = (
            spec.tau[i],
            spec.b[i],
            spec.r[i],
            tuple(sorted(zip(mus.tolist(), beta[js].tolist()))),
        )
        val = memo.get(key)
        if val is None:
            integ = SurvivalIntegrand(spec.tau[i], spec.b[i], spec.r[i], mus, beta[js])
            val = 1.0 / integ.integral(cfg)
            memo[key] = val
        out[i] = val
    return out


def solve_rmf(
    spec: NetworkSpec,
    cfg: SolverConfig | None = None,
    beta0=None,
) -> SolveReport:
    """Damped fixed-point solve of the replica-mean-field rate equations,
    starting from the base rates unless beta0 is given."""
    cfg = cfg or SolverConfig()
    start = np.asarray(spec.b, dtype=np.float64) if beta0 is None else beta0
    return solve_fixed_point(lambda x: rmf_rhs(spec, x, cfg), start, cfg)


def _log_reset_weight(integ: SurvivalIntegrand, u: float) -> float:
    # log of the reset factor multiplying the survival kernel in the MGF
    if integ.finite:
        return integ.tau * integ.r * math.expm1(u / integ.tau)
    return integ.r * u


def _warp(tau: float, u: float) -> float:
    """Map the MGF argument onto the survival-time axis.

    The stationary MGF of the intensity evaluates the survival-kernel
    integral at tau * log(1 + u / tau); with relaxation that mapping is
    what makes the generating-function equation hold in u itself (for an
    isolated neuron with reset equal to base it collapses the MGF to
    exp(u b)).  Without relaxation the axes coincide.
    """
    if math.isinf(tau):
        return u
    if u <= -tau:
        raise ValueError(
            f"the integral representation requires u > -tau = {-tau}"
        )
    return tau * math.log1p(u / tau)


def _mgf_from_integrand(
    integ: SurvivalIntegrand, beta_i: float, u: float, cfg: SolverConfig
) -> float:
    shift = integ.exponent(u)
    j = integ.integral(cfg, upper=u, shift=shift)
    return beta_i * math.exp(_log_reset_weight(integ, u)) * j


def _require_fixed_point(
    integ: SurvivalIntegrand, beta_i: float, cfg: SolverConfig
) -> None:
    rate = 1.0 / integ.integral(cfg)
    gap = abs(rate - beta_i) / beta_i
    if gap > _FIXED_POINT_CHECK_TOL:
        raise ValueError(
            f"rates do not solve the self-consistency system "
            f"(relative residual {gap:.3e})"
        )


def rmf_mgf(
    spec: NetworkSpec, beta, i: int, u: float, cfg: SolverConfig | None = None
) -> float:
    """Moment-generating function of neuron i's stationary intensity at
    u <= 0, given rates that solve the self-consistency system.

    Normalized so the value at u = 0 is 1; its one-sided derivative at 0
    is the neuron's rate.
    """
    cfg = cfg or SolverConfig()
    beta = _check_beta(spec, beta)
    if u > 0:
        raise ValueError("the generating function is only evaluated for u <= 0")
    js, mus = in_edges(spec)[i]
    integ = SurvivalIntegrand(spec.tau[i], spec.b[i], spec.r[i], mus, beta[js])
    _require_fixed_point(integ, beta[i], cfg)
    return _mgf_from_integrand(integ, beta[i], _warp(spec.tau[i], u), cfg)


def ode_residual(
    spec: NetworkSpec,
    beta,
    i: int,
    u: float,
    cfg: SolverConfig | None = None,
    step: float | None = None,
) -> float:
    """Relative residual of the stationary generating-function equation for
    neuron i at u < 0, using a fourth-order central difference for L'.

    Returns |sum of the three terms| / max(|term|); a converged rate vector
    drives this toward zero.
    """
    cfg = cfg or SolverConfig()
    beta = _check_beta(spec, beta)
    if not u < 0:
        raise ValueError("residual is evaluated at strictly negative u")
    js, mus = in_edges(spec)[i]
    tau = spec.tau[i]
    integ = SurvivalIntegrand(tau, spec.b[i], spec.r[i], mus, beta[js])
    _require_fixed_point(integ, beta[i], cfg)
    h = step if step is not None else min(1e-2, -u / 4.0)
    if math.isfinite(tau):
        h = min(h, (u + tau) / 4.0)
    if h <= 0 or u + 2 * h > 0:
        raise ValueError("difference stencil leaves the supported domain")

    def L(x):
        return _mgf_from_integrand(integ, beta[i], _warp(tau, x), cfg)

    l_u = L(u)
    d = (-L(u + 2 * h) + 8 * L(u + h) - 8 * L(u - h) + L(u - 2 * h)) / (12 * h)
    b_i, r_i = spec.b[i], spec.r[i]
    coeff = 1.0 if math.isinf(tau) else 1.0 + u / tau
    drift = 0.0 if math.isinf(tau) else u * b_i / tau
    if mus.size:
        with np.errstate(under="ignore"):
            drift += float(np.dot(beta[js], np.expm1(u * mus)))
    t1 = -coeff * d
    t2 = drift * l_u
    t3 = beta[i] * math.exp(u * r_i)
    scale = max(abs(t1), abs(t2), abs(t3))
    return abs(t1 + t2 + t3) / scale
