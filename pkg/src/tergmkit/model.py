"""Transition model: per-edge probabilities, exact likelihood, derivatives.

For factorized statistic sets each edge of the current network is an
independent Bernoulli draw given the previous network:

    p_ij = sigmoid(sum_k theta_k * delta_k[i, j])

and the log-likelihood of a series is the sum of edge-wise Bernoulli terms
over transitions t = 2..T. The gradient is sum_t sum_ij delta_ij (a_ij - p_ij)
and the Hessian is -sum_t sum_ij p(1-p) delta delta', a symmetric negative
semidefinite matrix, so the likelihood is concave in theta.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import DirectedBinaryNetwork, NetworkSeries
from .statistics import StatisticSet, change_scores, evaluate_all
from .util import DataError, UnsupportedModelError, offdiag_mask

__all__ = [
    "TransitionModel",
    "TransitionTables",
    "edge_probabilities",
    "log_likelihood",
    "gradient",
    "hessian",
    "conditional_statistic_mean",
    "conditional_statistic_covariance",
    "conditional_statistic_second_moment",
    "unnormalized_log_density",
]


def _sigmoid(x):
    # tanh form stays finite for any float input
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _softplus(x):
    return np.logaddexp(0.0, x)


def as_theta(theta, k):
    theta = np.asarray(theta, dtype=float).reshape(-1)
    if theta.shape != (k,):
        raise DataError(f"theta has {theta.shape[0]} entries for {k} statistics")
    if not np.isfinite(theta).all():
        raise DataError("theta contains non-finite values")
    return theta


@dataclass(frozen=True)
class TransitionModel:
    """Statistic set, weights, and (optionally) node labels."""

    stats: StatisticSet
    theta: np.ndarray
    labels: object = None

    def __post_init__(self):
        stats = (
            self.stats
            if isinstance(self.stats, StatisticSet)
            else StatisticSet.from_names(self.stats)
        )
        object.__setattr__(self, "stats", stats)
        object.__setattr__(self, "theta", as_theta(self.theta, stats.k))
        if stats.requires_labels and self.labels is None:
            raise DataError(
                f"statistics {stats.names} include label statistics but no labels were given"
            )

    @property
    def k(self):
        return self.stats.k

    @property
    def is_factorized(self):
        return self.stats.is_factorized

    def with_theta(self, theta):
        return TransitionModel(self.stats, theta, self.labels)


def _series_labels(model_or_labels, series):
    labels = getattr(model_or_labels, "labels", model_or_labels)
    if labels is None:
        labels = getattr(series, "attributes", None)
    return labels


def edge_probabilities(model, previous):
    """(n, n) matrix of conditional edge probabilities, zero diagonal."""
    if not model.is_factorized:
        raise UnsupportedModelError("edge probabilities need a factorized statistic set")
    table = change_scores(model.stats, previous, model.labels)
    p = _sigmoid(table.linear_predictor(model.theta))
    np.fill_diagonal(p, 0.0)
    return p


class TransitionTables:
    """Cached change scores and observed statistics for one series.

    ``transitions`` selects which transition indices t (2-based, up to T)
    participate; the default is all of them. Likelihood, gradient, and
    Hessian are then functions of theta alone, which is what the Newton
    solvers iterate on.
    """

    def __init__(self, stats, series, labels=None, transitions=None):
        stats = stats if isinstance(stats, StatisticSet) else StatisticSet.from_names(stats)
        if not isinstance(series, NetworkSeries):
            series = NetworkSeries(series)
        if series.T < 2:
            raise DataError("a series needs T >= 2 networks to define transitions")
        if not stats.is_factorized:
            raise UnsupportedModelError("exact likelihood needs a factorized statistic set")
        if labels is None:
            labels = series.attributes
        if transitions is None:
            transitions = range(2, series.T + 1)
        transitions = sorted(set(int(t) for t in transitions))
        if not transitions:
            raise DataError("no transitions selected")
        for t in transitions:
            if not (2 <= t <= series.T):
                raise DataError(f"transition index {t} outside 2..{series.T}")
        self.stats = stats
        self.labels = labels
        self.n = series.n
        self.transitions = tuple(transitions)
        self._mask = offdiag_mask(series.n)
        self._tables = []
        self._current = []
        self.observed = np.zeros((len(transitions), stats.k))
        for row, t in enumerate(transitions):
            prev, cur = series[t - 2], series[t - 1]
            table = change_scores(stats, prev, labels)
            self._tables.append(table)
            self._current.append(cur.matrix)
            self.observed[row] = evaluate_all(stats, cur, prev, labels)

    @property
    def k(self):
        return self.stats.k

    def _eta(self, theta, row):
        return self._tables[row].linear_predictor(theta)

    def log_likelihood(self, theta):
        theta = as_theta(theta, self.k)
        total = 0.0
        m = self._mask
        for row, cur in enumerate(self._current):
            eta = self._eta(theta, row)
            ll = -np.where(cur > 0.5, _softplus(-eta), _softplus(eta))
            total += ll[m].sum()
        return float(total)

    def gradient(self, theta):
        theta = as_theta(theta, self.k)
        g = np.zeros(self.k)
        for row, cur in enumerate(self._current):
            p = _sigmoid(self._eta(theta, row))
            np.fill_diagonal(p, 0.0)
            g += np.tensordot(self._tables[row].delta, cur - p, axes=([1, 2], [0, 1]))
        return g

    def hessian(self, theta):
        theta = as_theta(theta, self.k)
        h = np.zeros((self.k, self.k))
        for row in range(len(self._current)):
            p = _sigmoid(self._eta(theta, row))
            np.fill_diagonal(p, 0.0)
            w = p * (1.0 - p)
            delta = self._tables[row].delta
            h -= np.einsum("kij,lij->kl", delta * w[None, :, :], delta)
        return h

    def statistic_extremes(self):
        """Per-transition (min, max) achievable statistic values.

        Used to flag separation: a statistic observed at an endpoint in
        every transition has no finite maximizer.
        """
        lo = np.zeros_like(self.observed)
        hi = np.zeros_like(self.observed)
        for row, table in enumerate(self._tables):
            neg = np.minimum(table.delta, 0.0).sum(axis=(1, 2))
            pos = np.maximum(table.delta, 0.0).sum(axis=(1, 2))
            lo[row] = table.base + neg
            hi[row] = table.base + pos
        return lo, hi


def log_likelihood(model, series, transitions=None):
    """Exact log-likelihood of the series under the model."""
    tables = TransitionTables(model.stats, series, _series_labels(model, series), transitions)
    return tables.log_likelihood(model.theta)


def gradient(model, series, transitions=None):
    tables = TransitionTables(model.stats, series, _series_labels(model, series), transitions)
    return tables.gradient(model.theta)


def hessian(model, series, transitions=None):
    tables = TransitionTables(model.stats, series, _series_labels(model, series), transitions)
    return tables.hessian(model.theta)


def conditional_statistic_mean(model, previous):
    """E[Psi(next, previous)] under the model, in closed form."""
    if not model.is_factorized:
        raise UnsupportedModelError("closed-form moments need a factorized statistic set")
    table = change_scores(model.stats, previous, model.labels)
    p = _sigmoid(table.linear_predictor(model.theta))
    np.fill_diagonal(p, 0.0)
    return table.base + np.tensordot(table.delta, p, axes=([1, 2], [0, 1]))


def conditional_statistic_covariance(model, previous):
    """Cov[Psi(next, previous)], a sum of independent per-edge terms."""
    if not model.is_factorized:
        raise UnsupportedModelError("closed-form moments need a factorized statistic set")
    table = change_scores(model.stats, previous, model.labels)
    p = _sigmoid(table.linear_predictor(model.theta))
    np.fill_diagonal(p, 0.0)
    w = p * (1.0 - p)
    return np.einsum("kij,lij->kl", table.delta * w[None, :, :], table.delta)


def conditional_statistic_second_moment(model, previous):
    mu = conditional_statistic_mean(model, previous)
    return conditional_statistic_covariance(model, previous) + np.outer(mu, mu)


def unnormalized_log_density(model, current, previous):
    """theta' Psi(current, previous); valid for any statistic set."""
    psi = evaluate_all(model.stats, current, previous, model.labels)
    return float(model.theta @ psi)
