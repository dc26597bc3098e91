"""Exact discrete-event simulation of finite networks and their
finite-replica versions.

Counting-synapse networks (no relaxation) have piecewise-constant
intensities and are sampled with the plain Gillespie scheme: exponential
clock at the total rate, categorical neuron choice.  Networks with
relaxation are sampled by Ogata-style thinning with the per-neuron
dominating rate max(lambda_i(t0), b_i); relaxation moves intensities
monotonically toward the base rate, so that bound dominates the whole
future trajectory and the scheme is exact.  Bounds are refreshed at every
candidate epoch, accepted or rejected.

Both schemes run inside numba kernels driven by a PCG64 generator seeded
from the config, so a run is a pure function of (spec, config).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .model import NetworkSpec, out_edges, validate

__all__ = ["SimConfig", "SimResult", "simulate_lgl", "simulate_replica"]


@dataclass
class SimConfig:
    """Event budget, burn-in, and seed for one simulation run.

    The first ``floor(burn_in_fraction * max_events)`` spikes are discarded;
    rates are spike counts over the remaining window divided by its
    duration.  ``record_spikes`` keeps the full (time, neuron) trace in
    memory; ``debug_checks`` turns on in-kernel invariant assertions
    (dominating-rate validity and the intensity floor).
    """

    max_events: int = 10_000_000
    burn_in_fraction: float = 0.1
    seed: int = 0
    record_spikes: bool = False
    debug_checks: bool = False

    def __post_init__(self):
        if self.max_events < 1:
            raise ValueError("max_events must be >= 1")
        if not 0.0 <= self.burn_in_fraction < 1.0:
            raise ValueError("burn_in_fraction must lie in [0, 1)")


@dataclass
class SimResult:
    """Empirical stationary statistics of one run.

    For replica runs the entries are per class (rates averaged over
    replicas); otherwise per neuron.  ISI moments are post-burn-in
    diagnostics (nan where fewer than two intervals were seen).
    """

    rates: np.ndarray
    spike_counts: np.ndarray
    elapsed_time: float
    isi_mean: np.ndarray
    isi_variance: np.ndarray
    spike_times: np.ndarray | None = None
    spike_neurons: np.ndarray | None = None

    def to_csv(self) -> str:
        lines = ["neuron,rate,spikes"]
        for i, (rate, n) in enumerate(zip(self.rates, self.spike_counts)):
            lines.append(f"{i},{float(rate)!r},{int(n)}")
        return "\n".join(lines) + "\n"


@njit(cache=True)
def _gillespie_lgl(lam0, reset, indptr, targets, weights, max_events,
                   burn_events, rng, record, rec_t, rec_id, debug, floor):
    K = lam0.shape[0]
    lam = lam0.copy()
    counts = np.zeros(K, np.int64)
    isi_n = np.zeros(K, np.int64)
    isi_s = np.zeros(K, np.float64)
    isi_s2 = np.zeros(K, np.float64)
    last = np.full(K, -1.0)
    t = 0.0
    t_burn = 0.0
    for n in range(1, max_events + 1):
        tot = 0.0
        for i in range(K):
            tot += lam[i]
        t += rng.exponential(1.0 / tot)
        u = rng.random() * tot
        acc = 0.0
        s = K - 1
        for i in range(K):
            acc += lam[i]
            if u <= acc:
                s = i
                break
        lam[s] = reset[s]
        for e in range(indptr[s], indptr[s + 1]):
            lam[targets[e]] += weights[e]
        if debug:
            for i in range(K):
                assert lam[i] >= floor[i] - 1e-9
        if record:
            rec_t[n - 1] = t
            rec_id[n - 1] = s
        if n > burn_events:
            counts[s] += 1
            if last[s] >= 0.0:
                d = t - last[s]
                isi_n[s] += 1
                isi_s[s] += d
                isi_s2[s] += d * d
        elif n == burn_events:
            t_burn = t
            for i in range(K):
                last[i] = -1.0
        last[s] = t
    return counts, t_burn, t, isi_n, isi_s, isi_s2


@njit(cache=True)
def _thinning_lgl(lam0, base, reset, inv_tau, indptr, targets, weights,
                  max_events, burn_events, rng, record, rec_t, rec_id,
                  debug, floor):
    K = lam0.shape[0]
    lam = lam0.copy()
    counts = np.zeros(K, np.int64)
    isi_n = np.zeros(K, np.int64)
    isi_s = np.zeros(K, np.float64)
    isi_s2 = np.zeros(K, np.float64)
    last = np.full(K, -1.0)
    t = 0.0
    t_burn = 0.0
    t_last = 0.0
    n = 1
    while n <= max_events:
        btot = 0.0
        for i in range(K):
            bi = lam[i]
            if base[i] > bi:
                bi = base[i]
            btot += bi
        dt = rng.exponential(1.0 / btot)
        t += dt
        # relax to the candidate epoch; this is also the bound refresh
        tot = 0.0
        for i in range(K):
            li = base[i] + (lam[i] - base[i]) * math.exp(-dt * inv_tau[i])
            lam[i] = li
            tot += li
        if debug:
            assert tot <= btot * (1.0 + 1e-12)
        u = rng.random() * btot
        if u < tot:
            acc = 0.0
            s = K - 1
            for i in range(K):
                acc += lam[i]
                if u <= acc:
                    s = i
                    break
            lam[s] = reset[s]
            for e in range(indptr[s], indptr[s + 1]):
                lam[targets[e]] += weights[e]
            if debug:
                for i in range(K):
                    assert lam[i] >= floor[i] - 1e-9
            if record:
                rec_t[n - 1] = t
                rec_id[n - 1] = s
            if n > burn_events:
                counts[s] += 1
                if last[s] >= 0.0:
                    d = t - last[s]
                    isi_n[s] += 1
                    isi_s[s] += d
                    isi_s2[s] += d * d
            elif n == burn_events:
                t_burn = t
                for i in range(K):
                    last[i] = -1.0
            last[s] = t
            t_last = t
            n += 1
    return counts, t_burn, t_last, isi_n, isi_s, isi_s2


@njit(cache=True)
def _gillespie_replica(lam0, reset, indptr, targets, weights, M, K,
                       max_events, burn_events, rng, record, rec_t, rec_id):
    N = M * K
    lam = lam0.copy()
    counts = np.zeros(K, np.int64)
    isi_n = np.zeros(K, np.int64)
    isi_s = np.zeros(K, np.float64)
    isi_s2 = np.zeros(K, np.float64)
    last = np.full(N, -1.0)
    t = 0.0
    t_burn = 0.0
    for n in range(1, max_events + 1):
        tot = 0.0
        for i in range(N):
            tot += lam[i]
        t += rng.exponential(1.0 / tot)
        u = rng.random() * tot
        acc = 0.0
        s = N - 1
        for i in range(N):
            acc += lam[i]
            if u <= acc:
                s = i
                break
        m = s // K
        c = s - m * K
        lam[s] = reset[s]
        # route each class-level synapse to a uniformly chosen other replica,
        # independently per target class and per spike
        for e in range(indptr[c], indptr[c + 1]):
            v = rng.integers(0, M - 1)
            if v >= m:
                v += 1
            lam[v * K + targets[e]] += weights[e]
        if record:
            rec_t[n - 1] = t
            rec_id[n - 1] = s
        if n > burn_events:
            counts[c] += 1
            if last[s] >= 0.0:
                d = t - last[s]
                isi_n[c] += 1
                isi_s[c] += d
                isi_s2[c] += d * d
        elif n == burn_events:
            t_burn = t
            for i in range(N):
                last[i] = -1.0
        last[s] = t
    return counts, t_burn, t, isi_n, isi_s, isi_s2


@njit(cache=True)
def _thinning_replica(lam0, base, reset, inv_tau, indptr, targets, weights,
                      M, K, max_events, burn_events, rng, record, rec_t,
                      rec_id):
    N = M * K
    lam = lam0.copy()
    counts = np.zeros(K, np.int64)
    isi_n = np.zeros(K, np.int64)
    isi_s = np.zeros(K, np.float64)
    isi_s2 = np.zeros(K, np.float64)
    last = np.full(N, -1.0)
    t = 0.0
    t_burn = 0.0
    t_last = 0.0
    n = 1
    while n <= max_events:
        btot = 0.0
        for i in range(N):
            bi = lam[i]
            if base[i] > bi:
                bi = base[i]
            btot += bi
        dt = rng.exponential(1.0 / btot)
        t += dt
        tot = 0.0
        for i in range(N):
            li = base[i] + (lam[i] - base[i]) * math.exp(-dt * inv_tau[i])
            lam[i] = li
            tot += li
        u = rng.random() * btot
        if u < tot:
            acc = 0.0
            s = N - 1
            for i in range(N):
                acc += lam[i]
                if u <= acc:
                    s = i
                    break
            m = s // K
            c = s - m * K
            lam[s] = reset[s]
            for e in range(indptr[c], indptr[c + 1]):
                v = rng.integers(0, M - 1)
                if v >= m:
                    v += 1
                lam[v * K + targets[e]] += weights[e]
            if record:
                rec_t[n - 1] = t
                rec_id[n - 1] = s
            if n > burn_events:
                counts[c] += 1
                if last[s] >= 0.0:
                    d = t - last[s]
                    isi_n[c] += 1
                    isi_s[c] += d
                    isi_s2[c] += d * d
            elif n == burn_events:
                t_burn = t
                for i in range(N):
                    last[i] = -1.0
            last[s] = t
            t_last = t
            n += 1
    return counts, t_burn, t_last, isi_n, isi_s, isi_s2


def _require_valid(spec: NetworkSpec) -> None:
    bad = validate(spec)
    if bad:
        raise ValueError("invalid network spec:\n" + "\n".join(bad))


def _isi_moments(isi_n, isi_s, isi_s2):
    mean = np.full(isi_n.shape, np.nan)
    var = np.full(isi_n.shape, np.nan)
    one = isi_n > 0
    mean[one] = isi_s[one] / isi_n[one]
    two = isi_n > 1
    var[two] = (isi_s2[two] - isi_s[two] ** 2 / isi_n[two]) / (isi_n[two] - 1)
    return mean, var


def _trace_buffers(cfg: SimConfig):
    if cfg.record_spikes:
        return np.empty(cfg.max_events), np.empty(cfg.max_events, np.int64)
    return np.empty(0), np.empty(0, np.int64)


def simulate_lgl(
    spec: NetworkSpec, cfg: SimConfig | None = None, method: str = "auto"
) -> SimResult:
    """Simulate the network exactly for cfg.max_events spikes.

    ``method`` selects the kernel: 'auto' uses plain Gillespie when no
    neuron relaxes and thinning otherwise; 'gillespie' and 'thinning' force
    a choice (Gillespie requires all relaxation times infinite).  Initial
    intensities equal the base rates.
    """
    cfg = cfg or SimConfig()
    _require_valid(spec)
    all_counting = all(math.isinf(t) for t in spec.tau)
    if method == "auto":
        method = "gillespie" if all_counting else "thinning"
    elif method == "gillespie" and not all_counting:
        raise ValueError("plain Gillespie requires piecewise-constant intensities")
    elif method not in ("gillespie", "thinning"):
        raise ValueError(f"unknown method {method!r}")

    base = np.asarray(spec.b)
    reset = np.asarray(spec.r)
    inv_tau = np.array([0.0 if math.isinf(t) else 1.0 / t for t in spec.tau])
    indptr, targets, weights = out_edges(spec)
    floor = np.minimum(base, reset)
    rng = np.random.default_rng(cfg.seed)
    burn = int(cfg.burn_in_fraction * cfg.max_events)
    rec_t, rec_id = _trace_buffers(cfg)

    if method == "gillespie":
        out = _gillespie_lgl(
            base.copy(), reset, indptr, targets, weights, cfg.max_events,
            burn, rng, cfg.record_spikes, rec_t, rec_id, cfg.debug_checks,
            floor,
        )
    else:
        out = _thinning_lgl(
            base.copy(), base, reset, inv_tau, indptr, targets, weights,
            cfg.max_events, burn, rng, cfg.record_spikes, rec_t, rec_id,
            cfg.debug_checks, floor,
        )
    counts, t_burn, t_last, isi_n, isi_s, isi_s2 = out
    elapsed = t_last - t_burn
    mean, var = _isi_moments(isi_n, isi_s, isi_s2)
    return SimResult(
        rates=counts / elapsed,
        spike_counts=counts,
        elapsed_time=elapsed,
        isi_mean=mean,
        isi_variance=var,
        spike_times=rec_t if cfg.record_spikes else None,
        spike_neurons=rec_id if cfg.record_spikes else None,
    )


def simulate_replica(
    spec: NetworkSpec, M: int, cfg: SimConfig | None = None
) -> SimResult:
    """Simulate M interchangeable copies of the network with spike
    deliveries routed to uniformly chosen other replicas.

    A spike of class i in replica m resets that neuron and, for every
    synapse (j, i, mu), adds mu to class j in an independently chosen
    replica != m.  Reported rates are per class, averaged over replicas.
    """
    cfg = cfg or SimConfig()
    if M < 2:
        raise ValueError("replica simulation needs M >= 2")
    _require_valid(spec)
    K = spec.K
    base_c = np.asarray(spec.b)
    reset_c = np.asarray(spec.r)
    inv_tau_c = np.array([0.0 if math.isinf(t) else 1.0 / t for t in spec.tau])
    base = np.tile(base_c, M)
    reset = np.tile(reset_c, M)
    inv_tau = np.tile(inv_tau_c, M)
    indptr, targets, weights = out_edges(spec)
    rng = np.random.default_rng(cfg.seed)
    burn = int(cfg.burn_in_fraction * cfg.max_events)
    rec_t, rec_id = _trace_buffers(cfg)

    if all(math.isinf(t) for t in spec.tau):
        out = _gillespie_replica(
            base.copy(), reset, indptr, targets, weights, M, K,
            cfg.max_events, burn, rng, cfg.record_spikes, rec_t, rec_id,
        )
    else:
        out = _thinning_replica(
            base.copy(), base, reset, inv_tau, indptr, targets, weights, M,
            K, cfg.max_events, burn, rng, cfg.record_spikes, rec_t, rec_id,
        )
    counts, t_burn, t_last, isi_n, isi_s, isi_s2 = out
    elapsed = t_last - t_burn
    mean, var = _isi_moments(isi_n, isi_s, isi_s2)
    return SimResult(
        rates=counts / (M * elapsed),
        spike_counts=counts,
        elapsed_time=elapsed,
        isi_mean=mean,
        isi_variance=var,
        spike_times=rec_t if cfg.record_spikes else None,
        spike_neurons=rec_id if cfg.record_spikes else None,
    )
