"""Transition statistics for directed network series.

Every statistic maps a transition (current network, previous network) to a
value in [0, n]. All built-ins factorize over edges: given the previous
network (and labels where needed) there is a scalar ``base`` and an (n, n)
table ``delta`` with

    Psi(current, previous) = base + sum_ij current[i, j] * delta[i, j]

exactly, which is what makes per-edge transition probabilities, exact
likelihoods, and fast sampling possible. Ratio statistics whose denominator
is zero evaluate to 0 and contribute zero change scores.

Sums over ordered pairs run over i != j; sums over triples require i, j, k
pairwise distinct. Registry names:

==== =============================================== ==============
name statistic                                        needs labels
==== =============================================== ==============
D    edge density                                     no
S    dyad stability                                   no
R    reciprocity (edges answering a prior edge)       no
T    transitivity (edges closing a prior two-path)    no
WD   within-group density                             yes
BD   between-group density                            yes
WR   within-group reciprocity                         yes
BR   between-group reciprocity                        yes
RT   cyclic closure of a prior two-path               no
CSd  closure under shared prior supporters            no
CSg  closure under shared prior targets               no
P    attachment toward prior in-degree                no
G    attachment from prior out-degree                 no
==== =============================================== ==============
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .graphs import DirectedBinaryNetwork, NodeAttributeTable
from .util import DataError, atomic_write_text, offdiag_mask

__all__ = [
    "TransitionStatistic",
    "StatisticSet",
    "ChangeScoreTable",
    "BUILTIN_STATISTICS",
    "evaluate",
    "evaluate_all",
    "change_scores",
    "same_label_matrix",
    "is_factorized",
    "load_model_spec",
    "save_model_spec",
]


def _label_codes(labels, n):
    if labels is None:
        raise DataError("this statistic needs node labels but none were given")
    if isinstance(labels, NodeAttributeTable):
        if not labels.complete:
            raise DataError("node labels are incomplete (some values missing)")
        codes = labels.codes
    else:
        codes = np.asarray(labels, dtype=np.int64)
    if codes.ndim != 1 or codes.shape[0] != n:
        raise DataError(f"expected {n} node labels, got shape {codes.shape}")
    if (codes < 0).any():
        raise DataError("node labels contain missing values")
    return codes


def same_label_matrix(labels, n):
    """(n, n) float matrix with 1 where labels match, zero diagonal."""
    codes = _label_codes(labels, n)
    p = (codes[:, None] == codes[None, :]).astype(float)
    np.fill_diagonal(p, 0.0)
    return p


def _diff_label_matrix(labels, n):
    codes = _label_codes(labels, n)
    q = (codes[:, None] != codes[None, :]).astype(float)
    np.fill_diagonal(q, 0.0)
    return q


class TransitionStatistic:
    """Base statistic. Subclasses set ``name`` and implement ``evaluate``.

    Factorized statistics also implement ``change_scores(previous, labels)``
    returning ``(base, delta)``; non-factorized custom statistics may leave
    it out and are then accepted only by the general sampler paths.
    """

    name = "?"
    requires_labels = False

    def evaluate(self, current, previous, labels=None):
        raise NotImplementedError

    def global_per_edge_bound(self, n):
        """Loose bound on the per-edge contribution over all inputs."""
        raise NotImplementedError

    def per_edge_bound(self, previous, labels=None):
        """Exact per-edge contribution bound given the previous network."""
        raise NotImplementedError

    def __repr__(self):
        return f"<statistic {self.name}>"


def is_factorized(stat):
    return callable(getattr(stat, "change_scores", None))


def _nets(current, previous):
    cur = DirectedBinaryNetwork.coerce(current)
    prev = DirectedBinaryNetwork.coerce(previous)
    if cur.n != prev.n:
        raise DataError(f"network sizes differ: {cur.n} vs {prev.n}")
    return cur.matrix, prev.matrix, cur.n


class _Ratio(TransitionStatistic):
    """Shared shape for n * numerator / denominator statistics."""

    def _parts(self, prev, labels):
        """Return (coeff, den): numerator = sum(current * coeff)."""
        raise NotImplementedError

    def evaluate(self, current, previous, labels=None):
        cur, prev, n = _nets(current, previous)
        coeff, den = self._parts(prev, labels)
        if den <= 0.0:
            return 0.0
        return float(n * (cur * coeff).sum() / den)

    def change_scores(self, previous, labels=None):
        prev = DirectedBinaryNetwork.coerce(previous).matrix
        n = prev.shape[0]
        coeff, den = self._parts(prev, labels)
        if den <= 0.0:
            return 0.0, np.zeros((n, n))
        delta = n * coeff / den
        np.fill_diagonal(delta, 0.0)
        return 0.0, delta

    def global_per_edge_bound(self, n):
        return float(n)

    def per_edge_bound(self, previous, labels=None):
        _, delta = self.change_scores(previous, labels)
        return float(np.abs(delta).max())


class Density(TransitionStatistic):
    """Edge count scaled by 1/(n-1); ranges over [0, n]."""

    name = "D"

    def evaluate(self, current, previous, labels=None):
        cur, _, n = _nets(current, previous)
        return float(cur.sum() / (n - 1))

    def change_scores(self, previous, labels=None):
        prev = DirectedBinaryNetwork.coerce(previous).matrix
        n = prev.shape[0]
        delta = offdiag_mask(n) / (n - 1)
        return 0.0, delta

    def global_per_edge_bound(self, n):
        return 1.0 / (n - 1)

    def per_edge_bound(self, previous, labels=None):
        return 1.0 / (previous.n - 1)


class Stability(TransitionStatistic):
    """Dyads kept in the same state (present or absent), scaled by 1/(n-1).

    Equals n when the network is unchanged.
    """

    name = "S"

    def evaluate(self, current, previous, labels=None):
        cur, prev, n = _nets(current, previous)
        mask = offdiag_mask(n)
        same = cur * prev + (1.0 - cur) * (1.0 - prev)
        return float(same[mask].sum() / (n - 1))

    def change_scores(self, previous, labels=None):
        prev = DirectedBinaryNetwork.coerce(previous).matrix
        n = prev.shape[0]
        base = (n * (n - 1) - prev.sum()) / (n - 1)
        delta = (2.0 * prev - 1.0) / (n - 1)
        np.fill_diagonal(delta, 0.0)
        return float(base), delta

    def global_per_edge_bound(self, n):
        return 1.0 / (n - 1)

    def per_edge_bound(self, previous, labels=None):
        return 1.0 / (previous.n - 1)


class Reciprocity(_Ratio):
    """Current edges that answer a prior opposite edge, per prior edge,
    scaled by n."""

    name = "R"

    def _parts(self, prev, labels):
        return prev.T, float(prev.sum())


class Transitivity(_Ratio):
    """Current edges closing a prior directed two-path i->j->k, per prior
    two-path with distinct endpoints, scaled by n."""

    name = "T"

    def _parts(self, prev, labels):
        two = prev @ prev
        den = float(two.sum() - np.trace(two))
        return two, den


class CyclicClosure(_Ratio):
    """Current edges i->j completing a cycle over a prior two-path j->k->i."""

    name = "RT"

    def _parts(self, prev, labels):
        two = prev @ prev
        den = float(two.sum() - np.trace(two))
        return two.T, den


class SharedSupporterClosure(_Ratio):
    """Current edges i->j between nodes a common third node pointed at."""

    name = "CSd"

    def _parts(self, prev, labels):
        m = prev.T @ prev
        den = float(m.sum() - np.trace(m))
        m = m.copy()
        np.fill_diagonal(m, 0.0)
        return m, den


class SharedTargetClosure(_Ratio):
    """Current edges i->j between nodes that pointed at a common third node."""

    name = "CSg"

    def _parts(self, prev, labels):
        m = prev @ prev.T
        den = float(m.sum() - np.trace(m))
        m = m.copy()
        np.fill_diagonal(m, 0.0)
        return m, den


class Popularity(_Ratio):
    """Current edges toward nodes in proportion to their prior in-degree
    (edges from the sender itself excluded)."""

    name = "P"

    def _parts(self, prev, labels):
        n = prev.shape[0]
        indeg = prev.sum(axis=0)
        coeff = np.broadcast_to(indeg[None, :], (n, n)) - prev
        den = float((n - 2) * prev.sum())
        return coeff, den


class Generosity(_Ratio):
    """Current edges from nodes in proportion to their prior out-degree
    (edges to the receiver itself excluded)."""

    name = "G"

    def _parts(self, prev, labels):
        n = prev.shape[0]
        outdeg = prev.sum(axis=1)
        coeff = np.broadcast_to(outdeg[:, None], (n, n)) - prev
        den = float((n - 2) * prev.sum())
        return coeff, den


class WithinGroupDensity(TransitionStatistic):
    """Density restricted to same-label dyads."""

    name = "WD"
    requires_labels = True

    def evaluate(self, current, previous, labels=None):
        cur, _, n = _nets(current, previous)
        p = same_label_matrix(labels, n)
        return float((cur * p).sum() / (n - 1))

    def change_scores(self, previous, labels=None):
        prev = DirectedBinaryNetwork.coerce(previous).matrix
        n = prev.shape[0]
        return 0.0, same_label_matrix(labels, n) / (n - 1)

    def global_per_edge_bound(self, n):
        return 1.0 / (n - 1)

    def per_edge_bound(self, previous, labels=None):
        n = previous.n
        return float(same_label_matrix(labels, n).max() / (n - 1))


class BetweenGroupDensity(TransitionStatistic):
    """Density restricted to different-label dyads."""

    name = "BD"
    requires_labels = True

    def evaluate(self, current, previous, labels=None):
        cur, _, n = _nets(current, previous)
        q = _diff_label_matrix(labels, n)
        return float((cur * q).sum() / (n - 1))

    def change_scores(self, previous, labels=None):
        prev = DirectedBinaryNetwork.coerce(previous).matrix
        n = prev.shape[0]
        return 0.0, _diff_label_matrix(labels, n) / (n - 1)

    def global_per_edge_bound(self, n):
        return 1.0 / (n - 1)

    def per_edge_bound(self, previous, labels=None):
        n = previous.n
        return float(_diff_label_matrix(labels, n).max() / (n - 1))


class WithinGroupReciprocity(_Ratio):
    """Reciprocity restricted to same-label dyads."""

    name = "WR"
    requires_labels = True

    def _parts(self, prev, labels):
        p = same_label_matrix(labels, prev.shape[0])
        return prev.T * p, float((prev * p).sum())


class BetweenGroupReciprocity(_Ratio):
    """Reciprocity restricted to different-label dyads."""

    name = "BR"
    requires_labels = True

    def _parts(self, prev, labels):
        q = _diff_label_matrix(labels, prev.shape[0])
        return prev.T * q, float((prev * q).sum())


BUILTIN_STATISTICS = {
    s.name: s
    for s in (
        Density(),
        Stability(),
        Reciprocity(),
        Transitivity(),
        WithinGroupDensity(),
        BetweenGroupDensity(),
        WithinGroupReciprocity(),
        BetweenGroupReciprocity(),
        CyclicClosure(),
        SharedSupporterClosure(),
        SharedTargetClosure(),
        Popularity(),
        Generosity(),
    )
}


def _lookup(stat):
    if isinstance(stat, str):
        try:
            return BUILTIN_STATISTICS[stat]
        except KeyError:
            known = ", ".join(BUILTIN_STATISTICS)
            raise DataError(f"unknown statistic {stat!r}; built-ins: {known}") from None
    return stat


@dataclass(frozen=True)
class StatisticSet:
    """Ordered statistic collection; order fixes the parameter order."""

    statistics: tuple

    def __post_init__(self):
        object.__setattr__(self, "statistics", tuple(_lookup(s) for s in self.statistics))
        names = [s.name for s in self.statistics]
        if len(set(names)) != len(names):
            raise DataError(f"duplicate statistic names in {names}")
        if not names:
            raise DataError("statistic set is empty")

    @classmethod
    def from_names(cls, names):
        if isinstance(names, str):
            names = [x.strip() for x in names.split(",") if x.strip()]
        return cls(tuple(names))

    @property
    def k(self):
        return len(self.statistics)

    @property
    def names(self):
        return tuple(s.name for s in self.statistics)

    @property
    def requires_labels(self):
        return any(s.requires_labels for s in self.statistics)

    @property
    def is_factorized(self):
        return all(is_factorized(s) for s in self.statistics)

    def __iter__(self):
        return iter(self.statistics)

    def __len__(self):
        return len(self.statistics)


@dataclass(frozen=True)
class ChangeScoreTable:
    """Edge factorization of a statistic set given one previous network.

    ``base`` has shape (k,), ``delta`` shape (k, n, n) with zero diagonals;
    ``reconstruct(current)`` returns base + contraction with the current
    adjacency, which equals evaluate_all exactly for factorized statistics.
    """

    base: np.ndarray
    delta: np.ndarray

    @property
    def k(self):
        return self.base.shape[0]

    @property
    def n(self):
        return self.delta.shape[1]

    def reconstruct(self, current):
        cur = DirectedBinaryNetwork.coerce(current).matrix
        return self.base + np.tensordot(self.delta, cur, axes=([1, 2], [0, 1]))

    def linear_predictor(self, theta):
        """(n, n) map of sum_k theta_k * delta_k, zero diagonal."""
        theta = np.asarray(theta, dtype=float)
        return np.tensordot(theta, self.delta, axes=(0, 0))


def evaluate(stat, current, previous, labels=None):
    """Value of one statistic (name or descriptor) on a transition."""
    return _lookup(stat).evaluate(current, previous, labels)


def evaluate_all(stats, current, previous, labels=None):
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    return np.array([s.evaluate(current, previous, labels) for s in stats])


def change_scores(stats, previous, labels=None):
    """ChangeScoreTable for a factorized statistic set and previous network."""
    stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
    prev = DirectedBinaryNetwork.coerce(previous)
    n = prev.n
    base = np.zeros(stats.k)
    delta = np.zeros((stats.k, n, n))
    for m, s in enumerate(stats):
        if not is_factorized(s):
            from .util import UnsupportedModelError

            raise UnsupportedModelError(
                f"statistic {s.name!r} has no change scores; only the general paths accept it"
            )
        b, d = s.change_scores(prev, labels)
        base[m] = b
        delta[m] = d
    return ChangeScoreTable(base=base, delta=delta)


# ---------------------------------------------------------------------------
# model-spec JSON: {"statistics": [names], "theta": [floats]?}


def load_model_spec(source):
    """Parse a model-spec JSON file or dict into (StatisticSet, theta or None)."""
    if isinstance(source, dict):
        doc = source
    else:
        with open(source) as fh:
            try:
                doc = json.load(fh)
            except json.JSONDecodeError as e:
                raise DataError(f"{source}: invalid JSON ({e})") from None
    if "statistics" not in doc:
        raise DataError("model spec needs a 'statistics' list")
    stats = StatisticSet.from_names(doc["statistics"])
    theta = doc.get("theta")
    if theta is not None:
        theta = np.asarray(theta, dtype=float)
        if theta.shape != (stats.k,):
            raise DataError(
                f"theta has {theta.shape[0] if theta.ndim == 1 else '?'} entries "
                f"for {stats.k} statistics"
            )
        if not np.isfinite(theta).all():
            raise DataError("theta contains non-finite values")
    return stats, theta


def save_model_spec(path, stats, theta=None):
    doc = {"statistics": list(stats.names)}
    if theta is not None:
        doc["theta"] = [float(x) for x in theta]
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")
