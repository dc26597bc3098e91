"""Shared test fixtures and independent oracles.

Oracles here deliberately avoid the library code paths they check:
the two-neuron chain is solved as a truncated linear system, the counting
stationary rate by high-precision bisection on the series form of the
balance function, and special-function references come from mpmath or
direct quadrature.
"""

import math

import mpmath as mp
import numpy as np

from rmfnet.model import NetworkSpec


def homogeneous_counting_spec(K, b, mu):
    syn = tuple((i, j, mu) for i in range(K) for j in range(K) if i != j)
    return NetworkSpec(K, (math.inf,) * K, (b,) * K, (b,) * K, syn)


def complete_relaxing_spec(K, b, r, mu, tau):
    syn = tuple((i, j, mu) for i in range(K) for j in range(K) if i != j)
    return NetworkSpec(K, (tau,) * K, (b,) * K, (r,) * K, syn)


def two_neuron_counting_ctmc(b, mu, n_max=200):
    """Stationary per-neuron rate of the two-neuron counting network.

    After any spike one of the two received-spike counters is zero, so the
    reachable states are (0, k) and (k, 0); the truncated master equation
    is solved as a least-squares linear system.  Returns (rate, tail_mass).
    """
    n = 2 * n_max + 1

    def idx(c1, c2):
        return c2 if c1 == 0 else n_max + c1

    Q = np.zeros((n, n))
    for k in range(n_max + 1):
        # state (0, k): neuron 1 fires at b, neuron 2 at b + mu k
        if k + 1 <= n_max:
            Q[idx(0, k), idx(0, k + 1)] += b
        Q[idx(0, k), idx(1, 0)] += b + mu * k
        if k >= 1:
            # state (k, 0): neuron 1 fires at b + mu k, neuron 2 at b
            Q[idx(k, 0), idx(0, 1)] += b + mu * k
            if k + 1 <= n_max:
                Q[idx(k, 0), idx(k + 1, 0)] += b
    np.fill_diagonal(Q, Q.diagonal() - Q.sum(axis=1))
    A = np.vstack([Q.T, np.ones(n)])
    rhs = np.zeros(n + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    tail = abs(pi[idx(0, n_max)]) + abs(pi[idx(n_max, 0)])
    lam1 = np.array([b] * (n_max + 1) + [b + mu * k for k in range(1, n_max + 1)])
    return float(pi @ lam1), float(tail)


def counting_rate_bisection_oracle(K, b, mu, dps=50):
    """Counting-model rate from high-precision bisection on the series form
    of the balance function."""
    with mp.workdps(dps):
        x = mp.mpf(b) / mp.mpf(mu)
        target = mp.mpf(K - 1)

        def f(c):
            total = mp.mpf(0)
            term = c / (x + c)
            n = 0
            while True:
                total += term
                n += 1
                term = term * c / (x + c + n)
                if term < total * mp.mpf(10) ** (-dps):
                    break
            return total

        lo, hi = mp.mpf("1e-6"), mp.mpf(1)
        while f(hi) < target:
            hi *= 2
        while f(lo) > target:
            lo /= 2
        for _ in range(300):
            mid = (lo + hi) / 2
            if f(mid) < target:
                lo = mid
            else:
                hi = mid
        c = (lo + hi) / 2
        return float(mp.mpf(mu) * c / (K - 1))


def lower_gamma_series_oracle(a, x, terms=200, dps=60):
    """log of the lower incomplete gamma from its power series in mpmath."""
    with mp.workdps(dps):
        a = mp.mpf(a)
        x = mp.mpf(x)
        total = mp.mpf(0)
        denom = a
        term = 1 / denom
        for n in range(terms):
            total += term
            denom = a + n + 1
            term = term * x / denom
        val = x**a * mp.e ** (-x) * total
        return float(mp.log(val))


def ei_series_oracle(x):
    """Ei from gamma_E + log x + sum x^n / (n n!), truncated below 1e-18."""
    euler_gamma = 0.5772156649015329
    total = 0.0
    term = 1.0
    n = 1
    while True:
        term *= x / n
        contrib = term / n
        total += contrib
        n += 1
        if abs(contrib) < 1e-18:
            break
    return euler_gamma + math.log(x) + total


def batch_rate_se(times, ids, K, t_start, t_end, n_batches=100):
    """Per-neuron standard error of the empirical rate via batch means over
    equal time windows."""
    edges = np.linspace(t_start, t_end, n_batches + 1)
    width = edges[1] - edges[0]
    se = np.empty(K)
    for i in range(K):
        t_i = times[ids == i]
        counts, _ = np.histogram(t_i, bins=edges)
        se[i] = counts.std(ddof=1) / width / math.sqrt(n_batches)
    return se


def central_derivative(f, u, h):
    """Fourth-order central difference."""
    return (-f(u + 2 * h) + 8 * f(u + h) - 8 * f(u - h) + f(u - 2 * h)) / (12 * h)
