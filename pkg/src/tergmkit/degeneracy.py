"""Degeneracy diagnostics: per-edge bounds and second-step entropy.

The bound exploits edge factorization: when every per-edge statistic
contribution lies in [-beta, beta], every conditional edge probability lies
in [p, 1-p] with p = 1 / (exp(2 * beta * sum_k |theta_k|) + 1). That pins
the conditional expected edge count to [n(n-1) p, n(n-1) (1-p)] and lower
bounds the conditional entropy of the next network by
n(n-1) * (p ln 1/p + (1-p) ln 1/(1-p)) nats, uniformly over the previous
network. Large |theta| drives the guaranteed-entropy floor toward zero,
which is the degeneracy warning sign.

Two exact second-step entropy routes (entropy of the second network when
the first has iid Bernoulli(q) edges):

entropy_bruteforce
    full enumeration over previous and current networks, n <= 4;
entropy_edgecount
    {D, S} models only: the marginal factorizes per edge with one common
    edge probability r, so state probabilities depend only on edge count
    and the entropy is a binomially weighted sum over edge counts
    (n <= 40, log-space weights).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graphs import DirectedBinaryNetwork
from .model import edge_probabilities
from .statistics import StatisticSet
from .util import DataError, UnsupportedModelError

__all__ = [
    "DegeneracyReport",
    "degeneracy_bounds",
    "entropy_bruteforce",
    "entropy_edgecount",
    "enumerate_networks",
    "second_step_distribution",
]


@dataclass(frozen=True)
class DegeneracyReport:
    """Certified envelope for one (statistics, theta, n) triple."""

    n: int
    beta: float
    beta_mode: str
    per_statistic_beta: dict
    p_bound: float
    expected_edges_lo: float
    expected_edges_hi: float
    entropy_lower_bound: float

    def to_dict(self):
        return {
            "n": self.n,
            "beta": self.beta,
            "beta_mode": self.beta_mode,
            "per_statistic_beta": dict(self.per_statistic_beta),
            "p_bound": self.p_bound,
            "expected_edges_lo": self.expected_edges_lo,
            "expected_edges_hi": self.expected_edges_hi,
            "entropy_lower_bound": self.entropy_lower_bound,
        }


def _binary_entropy(p):
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log(p) - (1.0 - p) * math.log(1.0 - p)


def degeneracy_bounds(stats, theta, n, previous=None, labels=None, beta_override=None):
    """Degeneracy envelope from per-edge statistic bounds.

    With a previous network the per-statistic bounds are exact maxima of
    the change-score tables (beta_mode "per-instance"); without one, loose
    global constants apply (beta_mode "global"). Custom statistics without
    bound methods need beta_override.
    """
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (stats.k,):
        raise DataError(f"theta has {theta.shape[0]} entries for {stats.k} statistics")
    if n < 2:
        raise DataError("n must be >= 2")

    per = {}
    if beta_override is not None:
        beta = float(beta_override)
        mode = "override"
        per = {s.name: beta for s in stats}
    elif previous is not None:
        previous = DirectedBinaryNetwork.coerce(previous)
        if previous.n != n:
            raise DataError(f"previous network has n={previous.n}, expected {n}")
        mode = "per-instance"
        for s in stats:
            try:
                per[s.name] = float(s.per_edge_bound(previous, labels))
            except NotImplementedError:
                raise UnsupportedModelError(
                    f"statistic {s.name!r} has no per-edge bound; pass beta_override"
                ) from None
        beta = max(per.values())
    else:
        mode = "global"
        for s in stats:
            try:
                per[s.name] = float(s.global_per_edge_bound(n))
            except NotImplementedError:
                raise UnsupportedModelError(
                    f"statistic {s.name!r} has no per-edge bound; pass beta_override"
                ) from None
        beta = max(per.values())

    exponent = 2.0 * beta * float(np.abs(theta).sum())
    # p = 1 / (exp(exponent) + 1), computed in log space for huge exponents
    if exponent > 700.0:
        p = math.exp(-exponent)
    else:
        p = 1.0 / (math.exp(exponent) + 1.0)
    m = n * (n - 1)
    return DegeneracyReport(
        n=n,
        beta=float(beta),
        beta_mode=mode,
        per_statistic_beta=per,
        p_bound=float(p),
        expected_edges_lo=float(m * p),
        expected_edges_hi=float(m * (1.0 - p)),
        entropy_lower_bound=float(m * _binary_entropy(p)),
    )


# ---------------------------------------------------------------------------
# enumeration


def enumerate_networks(n):
    """All 2^(n(n-1)) networks as a bit matrix plus the dyad index lists.

    Returns (bits, rows, cols): bits has shape (2^m, m) with column order
    matching the row-major off-diagonal scan (rows[j], cols[j]).
    """
    if n < 2:
        raise DataError("n must be >= 2")
    m = n * (n - 1)
    if m > 20:
        raise DataError(f"enumeration over 2^{m} networks is not tractable")
    rows, cols = np.where(~np.eye(n, dtype=bool))
    codes = np.arange(2 ** m, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(m)[None, :]) & 1).astype(float)
    return bits, rows, cols


def network_from_bits(bits_row, rows, cols, n):
    a = np.zeros((n, n))
    a[rows, cols] = bits_row
    return DirectedBinaryNetwork(a)


def _state_code(network, rows, cols):
    a = DirectedBinaryNetwork.coerce(network).matrix
    bits = a[rows, cols].astype(np.int64)
    return int((bits << np.arange(len(rows))).sum())


def _initial_weights(initial, bits, rows, cols):
    """Log-probabilities of every enumerated state under the initial law.

    Accepts ``"bernoulli:q"`` (or a bare rate q), a probability vector over
    the enumerated states, or an explicit list of (network, probability)
    pairs covering the support.
    """
    m = bits.shape[1]
    if isinstance(initial, str) and initial.startswith("bernoulli"):
        parts = initial.split(":")
        q = float(parts[1]) if len(parts) > 1 else 0.5
    elif isinstance(initial, (int, float)):
        q = float(initial)
    elif isinstance(initial, (list, tuple)) and initial and isinstance(initial[0], tuple):
        probs = np.zeros(bits.shape[0])
        for net, prob in initial:
            probs[_state_code(net, rows, cols)] += float(prob)
        return _log_probs(probs)
    else:
        probs = np.asarray(initial, dtype=float).reshape(-1)
        if probs.shape[0] != bits.shape[0]:
            raise DataError(
                f"initial law needs {bits.shape[0]} state probabilities, got {probs.shape[0]}"
            )
        return _log_probs(probs)
    if not (0.0 <= q <= 1.0):
        raise DataError(f"q={q} outside [0, 1]")
    e = bits.sum(axis=1)
    if q == 0.0:
        return np.where(e > 0, -np.inf, 0.0)
    if q == 1.0:
        return np.where(e < m, -np.inf, 0.0)
    return e * math.log(q) + (m - e) * math.log(1.0 - q)


def _log_probs(probs):
    if (probs < 0.0).any():
        raise DataError("initial probabilities must be nonnegative")
    total = probs.sum()
    if not np.isclose(total, 1.0, atol=1e-9):
        raise DataError(f"initial probabilities sum to {total}, expected 1")
    with np.errstate(divide="ignore"):
        return np.where(probs > 0.0, np.log(np.maximum(probs, 1e-300)), -np.inf)


def second_step_distribution(model, initial, n):
    """Exact marginal of the second network, enumerated over both steps.

    Returns (probs, edge_counts): probabilities of all 2^(n(n-1)) states of
    the second network when the first is drawn from the initial law, plus
    each state's edge count. Needs a factorized statistic set and n <= 4.
    """
    if n > 4:
        raise DataError("brute-force enumeration is limited to n <= 4")
    if not model.is_factorized:
        raise UnsupportedModelError("brute-force enumeration needs a factorized statistic set")
    bits, rows, cols = enumerate_networks(n)
    log_init = _initial_weights(initial, bits, rows, cols)
    probs = np.zeros(bits.shape[0])
    for idx in range(bits.shape[0]):
        if log_init[idx] == -np.inf:
            continue
        prev = network_from_bits(bits[idx], rows, cols, n)
        p = edge_probabilities(model, prev)[rows, cols]
        with np.errstate(divide="ignore"):
            lp = np.log(p)
            l1p = np.log(1.0 - p)
        # guard exact 0/1 probabilities: impossible branches contribute -inf
        cond = bits @ np.where(np.isfinite(lp), lp, 0.0) + (1.0 - bits) @ np.where(
            np.isfinite(l1p), l1p, 0.0
        )
        if not np.isfinite(lp).all():
            cond = np.where((bits[:, ~np.isfinite(lp)] == 1).any(axis=1), -np.inf, cond)
        if not np.isfinite(l1p).all():
            cond = np.where((bits[:, ~np.isfinite(l1p)] == 0).any(axis=1), -np.inf, cond)
        probs += math.exp(log_init[idx]) * np.exp(cond)
    return probs, bits.sum(axis=1)


def entropy_bruteforce(model, initial, n):
    """Entropy (nats) of the second network by full enumeration, n <= 4."""
    probs, _ = second_step_distribution(model, initial, n)
    pos = probs[probs > 0.0]
    return float(-(pos * np.log(pos)).sum())


def entropy_edgecount(theta_density, theta_stability, n, q):
    """Entropy (nats) of the second network for a {D, S} model, n <= 40.

    Both edge statistics depend on a dyad only through that dyad's previous
    state, so with iid Bernoulli(q) initial edges the marginal of the next
    network is iid per edge with rate
    r = q * sigma((tD + tS)/(n-1)) + (1-q) * sigma((tD - tS)/(n-1)); state
    probabilities depend only on the edge count and the entropy is the
    binomially weighted sum over edge counts.
    """
    if not (2 <= n <= 40):
        raise DataError("edge-count entropy supports 2 <= n <= 40")
    if not (0.0 <= q <= 1.0):
        raise DataError(f"q={q} outside [0, 1]")
    td, ts = float(theta_density), float(theta_stability)
    scale = 1.0 / (n - 1)
    p_kept = 0.5 * (1.0 + math.tanh(0.5 * (td + ts) * scale))
    p_new = 0.5 * (1.0 + math.tanh(0.5 * (td - ts) * scale))
    r = q * p_kept + (1.0 - q) * p_new
    m = n * (n - 1)
    if r <= 0.0 or r >= 1.0:
        return 0.0
    log_r, log_1r = math.log(r), math.log(1.0 - r)
    # log C(m, e) via cumulative log-factorials
    logfact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, m + 1)))))
    e = np.arange(m + 1)
    log_choose = logfact[m] - logfact[e] - logfact[m - e]
    log_state = e * log_r + (m - e) * log_1r
    weights = np.exp(log_choose + log_state)
    return float(-(weights * log_state).sum())
