"""Network data model: parameterization, validation, generators, persistence.

A network is a finite assembly of K excitatory point-process neurons.  Each
neuron i carries a relaxation time ``tau[i]`` (``math.inf`` selects the
counting-synapse limit with no relaxation), a base rate ``b[i]``, a reset
value ``r[i]``, and a sparse set of synapses ``(i, j, mu)`` meaning a spike
of neuron j adds ``mu`` to neuron i's stochastic intensity.

Specs are immutable after construction and safe to share across threads.
Generators are pure functions of their arguments (including the seed).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "NetworkSpec",
    "validate",
    "gen_random_recurrent",
    "gen_feedforward",
    "save_network",
    "load_network",
    "in_edges",
    "out_edges",
]


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable parameterization of a linear Galves-Locherbach network.

    Attributes
    ----------
    K : int
        Number of neurons.
    tau : tuple of float
        Per-neuron relaxation times; ``math.inf`` means no relaxation
        (counting-synapse neuron).
    b : tuple of float
        Per-neuron base rates (spikes per unit time).
    r : tuple of float
        Per-neuron reset values, 0 < r[i] <= b[i].
    synapses : tuple of (int, int, float)
        Entries ``(i, j, mu)``: a spike of j adds mu >= 0 to neuron i's
        intensity.  Stored sorted by (i, j); at most one entry per pair.
    """

    K: int
    tau: tuple = field(default=())
    b: tuple = field(default=())
    r: tuple = field(default=())
    synapses: tuple = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "K", int(self.K))
        object.__setattr__(self, "tau", tuple(float(t) for t in self.tau))
        object.__setattr__(self, "b", tuple(float(x) for x in self.b))
        object.__setattr__(self, "r", tuple(float(x) for x in self.r))
        syn = tuple(
            sorted((int(i), int(j), float(m)) for (i, j, m) in self.synapses)
        )
        object.__setattr__(self, "synapses", syn)


def validate(spec: NetworkSpec) -> list[str]:
    """Check every invariant; return a list of violations (empty means ok).

    Violations are data, not faults: the offending neuron or synapse index
    is embedded in each message.
    """
    bad = []
    K = spec.K
    if K < 1:
        bad.append(f"K must be >= 1, got {K}")
        return bad
    for name, arr in (("tau", spec.tau), ("b", spec.b), ("r", spec.r)):
        if len(arr) != K:
            bad.append(f"{name} has length {len(arr)}, expected K={K}")
    if bad:
        return bad
    for i in range(K):
        t, b_i, r_i = spec.tau[i], spec.b[i], spec.r[i]
        if not (t > 0):
            bad.append(f"neuron {i}: relaxation time must be positive (or inf)")
        if not (b_i > 0 and math.isfinite(b_i)):
            bad.append(f"neuron {i}: base rate must be strictly positive and finite")
        if not (r_i > 0):
            bad.append(f"neuron {i}: reset must be strictly positive")
        elif r_i > b_i:
            bad.append(f"neuron {i}: reset must not exceed the base rate")
        if math.isinf(t) and r_i != b_i:
            bad.append(
                f"neuron {i}: infinite relaxation time requires reset equal to base rate"
            )
    seen = set()
    for i, j, mu in spec.synapses:
        if not (0 <= i < K) or not (0 <= j < K):
            bad.append(f"synapse ({i},{j}): index out of range")
            continue
        if i == j:
            bad.append(f"synapse ({i},{j}): self-synapse forbidden")
        if not (mu >= 0 and math.isfinite(mu)):
            bad.append(f"synapse ({i},{j}): weight must be finite and >= 0")
        if (i, j) in seen:
            bad.append(f"synapse ({i},{j}): duplicate entry")
        seen.add((i, j))
    return bad


def _require_valid(spec: NetworkSpec) -> None:
    bad = validate(spec)
    if bad:
        raise ValueError("invalid network spec:\n" + "\n".join(bad))


def gen_random_recurrent(K, in_degree, weight_max, base, tau, seed, reset=None):
    """Unstructured recurrent network with a fixed in-degree.

    Every neuron receives spikes from exactly ``in_degree`` presynaptic
    partners sampled uniformly without replacement from the other neurons;
    weights are i.i.d. uniform on ``(0, weight_max]``.  ``b = base`` for all
    neurons and ``r = reset`` (``base`` when reset is None).  Deterministic
    in the seed.
    """
    if not (0 <= in_degree <= K - 1):
        raise ValueError(f"in_degree must be in [0, K-1], got {in_degree}")
    rng = np.random.default_rng(seed)
    reset = base if reset is None else reset
    syn = []
    others = np.arange(K)
    for i in range(K):
        pool = np.delete(others, i)
        partners = rng.choice(pool, size=in_degree, replace=False)
        weights = weight_max * (1.0 - rng.random(in_degree))
        for j, m in zip(partners, weights):
            syn.append((i, int(j), float(m)))
    spec = NetworkSpec(K, (tau,) * K, (base,) * K, (reset,) * K, tuple(syn))
    _require_valid(spec)
    return spec


def gen_feedforward(layers, width, in_degree, weight_max, base, tau, seed, reset=None):
    """Layered feedforward network; layer 0 is a driving layer with no inputs.

    Neuron ids are ``layer * width + position``.  Each neuron in layer
    l >= 1 receives exactly ``in_degree`` partners sampled without
    replacement from layer l - 1, with weights uniform on (0, weight_max].
    """
    if layers < 1:
        raise ValueError("layers must be >= 1")
    if not (0 <= in_degree <= width):
        raise ValueError(f"in_degree must be in [0, width], got {in_degree}")
    rng = np.random.default_rng(seed)
    reset = base if reset is None else reset
    K = layers * width
    syn = []
    for layer in range(1, layers):
        prev = np.arange((layer - 1) * width, layer * width)
        for pos in range(width):
            i = layer * width + pos
            partners = rng.choice(prev, size=in_degree, replace=False)
            weights = weight_max * (1.0 - rng.random(in_degree))
            for j, m in zip(partners, weights):
                syn.append((i, int(j), float(m)))
    spec = NetworkSpec(K, (tau,) * K, (base,) * K, (reset,) * K, tuple(syn))
    _require_valid(spec)
    return spec


def save_network(spec: NetworkSpec) -> str:
    """Serialize a spec to its canonical JSON document.

    ``tau = null`` encodes an infinite relaxation time; synapses appear
    sorted by (i, j) with 0-based indices.
    """
    doc = {
        "K": spec.K,
        "tau": [None if math.isinf(t) else t for t in spec.tau],
        "b": list(spec.b),
        "r": list(spec.r),
        "synapses": [[i, j, mu] for (i, j, mu) in spec.synapses],
    }
    return json.dumps(doc)


def load_network(text: str) -> NetworkSpec:
    """Parse a network document; raises ValueError on malformed input or
    invariant violations."""
    try:
        doc = json.loads(text)
        spec = NetworkSpec(
            K=doc["K"],
            tau=tuple(math.inf if t is None else float(t) for t in doc["tau"]),
            b=tuple(doc["b"]),
            r=tuple(doc["r"]),
            synapses=tuple((i, j, m) for i, j, m in doc["synapses"]),
        )
    except (KeyError, TypeError, json.JSONDecodeError) as exc:
        raise ValueError(f"malformed network document: {exc}") from exc
    _require_valid(spec)
    return spec


def in_edges(spec: NetworkSpec):
    """Per-neuron presynaptic adjacency: list of (sources, weights) arrays."""
    srcs = [[] for _ in range(spec.K)]
    wgts = [[] for _ in range(spec.K)]
    for i, j, mu in spec.synapses:
        srcs[i].append(j)
        wgts[i].append(mu)
    return [
        (np.asarray(s, dtype=np.int64), np.asarray(w, dtype=np.float64))
        for s, w in zip(srcs, wgts)
    ]


def out_edges(spec: NetworkSpec):
    """CSR adjacency keyed by the presynaptic neuron: (indptr, targets, weights).

    ``targets[indptr[j]:indptr[j+1]]`` are the neurons whose intensity jumps
    when neuron j spikes.
    """
    E = len(spec.synapses)
    pre = np.empty(E, dtype=np.int64)
    post = np.empty(E, dtype=np.int64)
    w = np.empty(E, dtype=np.float64)
    for e, (i, j, mu) in enumerate(spec.synapses):
        pre[e], post[e], w[e] = j, i, mu
    order = np.lexsort((post, pre))
    pre, post, w = pre[order], post[order], w[order]
    indptr = np.zeros(spec.K + 1, dtype=np.int64)
    np.add.at(indptr, pre + 1, 1)
    indptr = np.cumsum(indptr)
    return indptr, post, w
