"""Forward simulation: exact transition draws, Gibbs, chains, initial laws.

The exact sampler draws every edge independently from its conditional
probability (valid for factorized statistic sets). The Gibbs sampler makes
systematic row-major sweeps over off-diagonal dyads; for factorized sets
its full conditionals come from change scores, otherwise each flip costs
two full statistic evaluations. Initial networks come either from iid
Bernoulli(q) edges or from the static distribution proportional to
exp(theta' Psi(N, N)) sampled by single-flip Gibbs.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graphs import DirectedBinaryNetwork, NetworkSeries
from .model import TransitionModel, edge_probabilities, unnormalized_log_density
from .statistics import StatisticSet
from .util import DataError, substream

__all__ = [
    "SamplerConfig",
    "sample_transition_exact",
    "sample_transition_gibbs",
    "simulate_chain",
    "sample_initial",
    "bernoulli_network",
]


@dataclass(frozen=True)
class SamplerConfig:
    """Knobs for the samplers.

    burn_in and thinning are in sweeps (one sweep = n(n-1) single-site
    updates); B is the number of retained draws per transition.
    """

    seed: int = 0
    burn_in: int = 10
    thinning: int = 1
    B: int = 1

    def __post_init__(self):
        if self.B < 1:
            raise DataError("B must be >= 1")
        if self.burn_in < 0 or self.thinning < 1:
            raise DataError("burn_in must be >= 0 and thinning >= 1")


def _resolve_rng(config, rng):
    return rng if rng is not None else substream(config.seed)


def _p1(logit):
    return 0.5 * (1.0 + np.tanh(0.5 * logit))


def sample_transition_exact(model, previous, config=None, rng=None):
    """B independent draws of the next network given the previous one."""
    config = config or SamplerConfig()
    rng = _resolve_rng(config, rng)
    p = edge_probabilities(model, previous)
    u = rng.random((config.B, p.shape[0], p.shape[1]))
    draws = (u < p[None, :, :]).astype(float)
    return [DirectedBinaryNetwork(a) for a in draws]


def _scan_rows_cols(n):
    rows, cols = np.where(~np.eye(n, dtype=bool))
    return rows, cols


def sample_transition_gibbs(model, previous, config=None, rng=None, start=None):
    """B draws via systematic-scan Gibbs on the conditional distribution."""
    config = config or SamplerConfig()
    rng = _resolve_rng(config, rng)
    previous = DirectedBinaryNetwork.coerce(previous)
    n = previous.n
    rows, cols = _scan_rows_cols(n)
    if start is None:
        state = previous.matrix.copy()
    else:
        state = DirectedBinaryNetwork.coerce(start).matrix.copy()

    if model.is_factorized:
        # conditionals do not depend on the evolving state, so one sweep in
        # scan order collapses to a single vectorized assignment
        p = edge_probabilities(model, previous)
        p_flat = p[rows, cols]

        def sweep():
            u = rng.random(len(rows))
            state[rows, cols] = (u < p_flat).astype(float)

    else:
        def sweep():
            u = rng.random(len(rows))
            for m in range(len(rows)):
                i, j = rows[m], cols[m]
                state[i, j] = 1.0
                hi = unnormalized_log_density(model, state, previous)
                state[i, j] = 0.0
                lo = unnormalized_log_density(model, state, previous)
                state[i, j] = 1.0 if u[m] < _p1(hi - lo) else 0.0

    for _ in range(config.burn_in):
        sweep()
    out = []
    while len(out) < config.B:
        for _ in range(config.thinning):
            sweep()
        out.append(DirectedBinaryNetwork(state))
    return out


def simulate_chain(model, first, T, config=None):
    """Simulate a length-T series starting from a given first network.

    Transition t draws from an RNG stream derived from (seed, t), so a
    longer simulation extends a shorter one run with the same seed.
    """
    if T < 1:
        raise DataError("T must be >= 1")
    config = config or SamplerConfig()
    first = DirectedBinaryNetwork.coerce(first)
    nets = [first]
    for t in range(2, T + 1):
        rng = substream(config.seed, "transition", t)
        one = SamplerConfig(
            seed=config.seed, B=1, burn_in=config.burn_in, thinning=config.thinning
        )
        if model.is_factorized:
            step = sample_transition_exact(model, nets[-1], one, rng=rng)
        else:
            step = sample_transition_gibbs(model, nets[-1], one, rng=rng)
        nets.append(step[0])
    attrs = model.labels if hasattr(model.labels, "codes") else None
    return NetworkSeries(nets, attributes=attrs)


def bernoulli_network(n, q, rng):
    if not (0.0 <= q <= 1.0):
        raise DataError(f"edge probability q={q} outside [0, 1]")
    a = (rng.random((n, n)) < q).astype(float)
    np.fill_diagonal(a, 0.0)
    return DirectedBinaryNetwork(a)


class _SelfErgmState:
    """Incremental statistics of Psi(N, N) for the {D, S, R, T} set.

    Maintains edge count, mutual-dyad sum, distinct-endpoint two-path
    count, and closed-triple count under single-edge toggles, so a Gibbs
    flip costs O(n) instead of a full re-evaluation.
    """

    def __init__(self, a):
        self.a = a.astype(float)
        self.n = a.shape[0]
        self.e = float(a.sum())
        self.m = float((a * a.T).sum())
        self.od = a.sum(axis=1)
        self.id = a.sum(axis=0)
        a2 = a @ a
        self.w = float(a2.sum() - np.trace(a2))
        self.c = float((a2 * a).sum())

    def psi(self, e=None, m=None, w=None, c=None):
        e = self.e if e is None else e
        m = self.m if m is None else m
        w = self.w if w is None else w
        c = self.c if c is None else c
        n = self.n
        return np.array(
            [
                e / (n - 1),
                float(n),
                n * m / e if e > 0 else 0.0,
                n * c / w if w > 0 else 0.0,
            ]
        )

    def toggle_delta(self, u, v):
        """Statistic vector after toggling (u, v), without committing."""
        a = self.a
        s = 1.0 if a[u, v] == 0.0 else -1.0
        e = self.e + s
        m = self.m + 2.0 * s * a[v, u]
        w = self.w + s * (self.id[u] + self.od[v]) - 2.0 * s * a[v, u]
        dc = float(a[v].dot(a[u]) + a[:, u].dot(a[:, v]) + a[u].dot(a[:, v]))
        c = self.c + s * dc
        return self.psi(e=e, m=m, w=w, c=c), (s, e, m, w, c)

    def commit(self, u, v, packed):
        s, e, m, w, c = packed
        self.a[u, v] += s
        self.e, self.m, self.w, self.c = e, m, w, c
        self.od[u] += s
        self.id[v] += s


def sample_initial(stats, theta, n, mode="bernoulli:0.5", seed=0, sweeps=1000, rng=None,
                   labels=None):
    """Draw an initial network.

    mode is either ``bernoulli:q`` (iid edges) or ``self-ergm``, the static
    distribution proportional to exp(theta' Psi(N, N)) sampled with
    single-flip Gibbs for the given number of sweeps.
    """
    rng = rng if rng is not None else substream(seed, "initial")
    if isinstance(mode, str) and mode.startswith("bernoulli"):
        parts = mode.split(":")
        q = float(parts[1]) if len(parts) > 1 else 0.5
        return bernoulli_network(n, q, rng)
    if mode != "self-ergm":
        raise DataError(f"unknown initial mode {mode!r}")

    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    theta = np.asarray(theta, dtype=float)
    a = bernoulli_network(n, 0.5, rng).matrix.copy()
    rows, cols = _scan_rows_cols(n)

    if set(stats.names) == {"D", "S", "R", "T"}:
        perm = [stats.names.index(x) for x in ("D", "S", "R", "T")]
        th = theta[perm]
        st = _SelfErgmState(a)
        for _ in range(sweeps):
            u_draws = rng.random(len(rows))
            for m_idx in range(len(rows)):
                u, v = rows[m_idx], cols[m_idx]
                adding = st.a[u, v] == 0.0
                psi_now = st.psi()
                psi_flip, packed = st.toggle_delta(u, v)
                if adding:
                    p_edge = _p1(float(th @ (psi_flip - psi_now)))
                else:
                    p_edge = _p1(float(th @ (psi_now - psi_flip)))
                want_edge = u_draws[m_idx] < p_edge
                if want_edge == adding:
                    st.commit(u, v, packed)
        a = st.a
    else:
        model = TransitionModel(stats, theta, labels)
        for _ in range(sweeps):
            u_draws = rng.random(len(rows))
            for m_idx in range(len(rows)):
                u, v = rows[m_idx], cols[m_idx]
                a[u, v] = 1.0
                hi = unnormalized_log_density(model, a, a)
                a[u, v] = 0.0
                lo = unnormalized_log_density(model, a, a)
                a[u, v] = 1.0 if u_draws[m_idx] < _p1(hi - lo) else 0.0

    net = DirectedBinaryNetwork(a)
    if net.edge_count() in (0, n * (n - 1)):
        warnings.warn(
            "self-ergm initial network is degenerate (empty or complete); "
            "the parameter vector may be in a degenerate region",
            RuntimeWarning,
            stacklevel=2,
        )
    return net
