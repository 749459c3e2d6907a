import numpy as np
import pytest

from tergmkit import DataError, TransitionModel, TransitionTables, edge_probabilities
from tergmkit.model import (
    as_theta,
    conditional_statistic_covariance,
    conditional_statistic_mean,
    conditional_statistic_second_moment,
    log_likelihood,
    unnormalized_log_density,
)

from conftest import ORACLES, all_networks, rand_codes, rand_net


def oracle_psi(names, cur, prev, labels=None):
    return np.array([ORACLES[nm](cur, prev, labels) for nm in names])


def enumerated_log_prob(names, theta, prev, cur, labels=None):
    """log P(cur | prev) by summing exp(theta' Psi) over every network."""
    logws = np.array(
        [theta @ oracle_psi(names, b, prev, labels) for b in all_networks(len(prev))]
    )
    m = logws.max()
    z = m + np.log(np.exp(logws - m).sum())
    return float(theta @ oracle_psi(names, cur, prev, labels) - z)


def test_likelihood_matches_enumeration(rng):
    names = ("D", "S", "R", "T")
    for _ in range(8):
        theta = rng.uniform(-3, 3, size=4)
        prev, cur = rand_net(rng, 3, 0.5), rand_net(rng, 3, 0.5)
        model = TransitionModel(names, theta)
        got = log_likelihood(model, [prev, cur])
        want = enumerated_log_prob(names, theta, prev, cur)
        assert got == pytest.approx(want, rel=1e-10)


def test_likelihood_matches_enumeration_with_labels(rng):
    names = ("D", "WD", "BR")
    codes = np.array([0, 1, 0])
    for _ in range(5):
        theta = rng.uniform(-2, 2, size=3)
        prev, cur = rand_net(rng, 3, 0.6), rand_net(rng, 3, 0.4)
        model = TransitionModel(names, theta, codes)
        got = log_likelihood(model, [prev, cur])
        want = enumerated_log_prob(names, theta, prev, cur, codes)
        assert got == pytest.approx(want, rel=1e-10)


def test_series_likelihood_sums_transitions(rng):
    names = ("D", "S")
    theta = np.array([0.3, -0.7])
    nets = [rand_net(rng, 4, 0.5) for _ in range(4)]
    model = TransitionModel(names, theta)
    total = log_likelihood(model, nets)
    parts = sum(
        log_likelihood(model, [nets[t], nets[t + 1]]) for t in range(3)
    )
    assert total == pytest.approx(parts, rel=1e-12)


def test_finite_difference_gradient_and_hessian(rng):
    names = ("D", "S", "R", "T", "P", "G")
    nets = [rand_net(rng, 4, 0.5) for _ in range(3)]
    tables = TransitionTables(names, nets)
    theta = rng.uniform(-1.5, 1.5, size=len(names))
    g = tables.gradient(theta)
    h = tables.hessian(theta)
    eps = 1e-5
    for k in range(len(names)):
        e = np.zeros(len(names))
        e[k] = eps
        fd = (tables.log_likelihood(theta + e) - tables.log_likelihood(theta - e)) / (2 * eps)
        assert fd == pytest.approx(g[k], rel=1e-6, abs=1e-8)
        fd_row = (tables.gradient(theta + e) - tables.gradient(theta - e)) / (2 * eps)
        assert np.allclose(fd_row, h[k], rtol=1e-5, atol=1e-7)


def test_hessian_is_negative_semidefinite(rng):
    names = ("D", "S", "R", "T")
    nets = [rand_net(rng, 5, 0.5) for _ in range(3)]
    tables = TransitionTables(names, nets)
    for _ in range(5):
        theta = rng.uniform(-4, 4, size=4)
        h = tables.hessian(theta)
        assert np.allclose(h, h.T, atol=1e-12)
        assert np.linalg.eigvalsh(h).max() <= 1e-10


def test_gradient_is_observed_minus_expected(rng):
    """Exponential-family identity: grad = sum_t (psi_obs - E_theta[psi])."""
    names = ("D", "S", "R")
    nets = [rand_net(rng, 4, 0.5) for _ in range(3)]
    tables = TransitionTables(names, nets)
    theta = rng.uniform(-2, 2, size=3)
    model = TransitionModel(names, theta)
    expected = sum(conditional_statistic_mean(model, prev) for prev in nets[:-1])
    want = tables.observed.sum(axis=0) - expected
    assert np.allclose(tables.gradient(theta), want, atol=1e-10)
    cov = sum(conditional_statistic_covariance(model, prev) for prev in nets[:-1])
    assert np.allclose(tables.hessian(theta), -cov, atol=1e-10)


def test_conditional_mean_matches_enumeration(rng):
    names = ("D", "S", "T")
    theta = np.array([0.4, -0.2, 1.1])
    prev = rand_net(rng, 3, 0.5)
    model = TransitionModel(names, theta)
    mu = conditional_statistic_mean(model, prev)
    nets = all_networks(3)
    logws = np.array([theta @ oracle_psi(names, b, prev) for b in nets])
    probs = np.exp(logws - logws.max())
    probs /= probs.sum()
    want = sum(p * oracle_psi(names, b, prev) for p, b in zip(probs, nets))
    assert np.allclose(mu, want, atol=1e-10)
    second = conditional_statistic_second_moment(model, prev)
    want2 = sum(
        p * np.outer(oracle_psi(names, b, prev), oracle_psi(names, b, prev))
        for p, b in zip(probs, nets)
    )
    assert np.allclose(second, want2, atol=1e-9)


def test_edge_probabilities_closed_form():
    n = 3
    empty = np.zeros((n, n))
    model = TransitionModel(("D", "S"), np.array([2.0, 1.0]))
    p = edge_probabilities(model, empty)
    # no prior edges: logit = (theta_D - theta_S) / (n - 1) = 1/2 everywhere
    want = 1.0 / (1.0 + np.exp(-0.5))
    off = ~np.eye(n, dtype=bool)
    assert np.allclose(p[off], want, atol=1e-12)
    assert np.all(np.diag(p) == 0.0)

    full = np.ones((n, n)) - np.eye(n)
    p2 = edge_probabilities(model, full)
    want2 = 1.0 / (1.0 + np.exp(-1.5))  # logit = (theta_D + theta_S)/(n-1)
    assert np.allclose(p2[off], want2, atol=1e-12)


def test_zero_theta_gives_coin_flips(rng):
    names = ("D", "S", "R", "T")
    nets = [rand_net(rng, 4, 0.5) for _ in range(3)]
    tables = TransitionTables(names, nets)
    m = 4 * 3
    assert tables.log_likelihood(np.zeros(4)) == pytest.approx(
        -2 * m * np.log(2), rel=1e-12
    )


def test_model_validation(rng):
    with pytest.raises(DataError):
        TransitionModel(("D",), np.array([1.0, 2.0]))
    with pytest.raises(DataError):
        TransitionModel(("WD",), np.array([1.0]))  # label statistic, no labels
    with pytest.raises(DataError):
        as_theta(np.array([np.inf]), 1)
    model = TransitionModel(("D",), np.array([1.0]))
    assert model.with_theta([2.0]).theta[0] == 2.0
    assert model.k == 1


def test_transition_selection(rng):
    names = ("D", "S")
    nets = [rand_net(rng, 4, 0.5) for _ in range(5)]
    theta = np.array([0.5, 0.5])
    full = TransitionTables(names, nets)
    sub = TransitionTables(names, nets, transitions=[2, 4])
    l2 = TransitionTables(names, nets, transitions=[2]).log_likelihood(theta)
    l4 = TransitionTables(names, nets, transitions=[4]).log_likelihood(theta)
    assert sub.log_likelihood(theta) == pytest.approx(l2 + l4, rel=1e-12)
    assert full.observed.shape == (4, 2)
    with pytest.raises(DataError):
        TransitionTables(names, nets, transitions=[1])
    with pytest.raises(DataError):
        TransitionTables(names, nets, transitions=[6])
    with pytest.raises(DataError):
        TransitionTables(names, nets, transitions=[])
    with pytest.raises(DataError):
        TransitionTables(names, [nets[0]])


def test_observed_statistics_within_extremes(rng):
    names = ("D", "S", "R", "T", "CSd", "CSg", "P", "G", "RT")
    nets = [rand_net(rng, 5, 0.5) for _ in range(4)]
    tables = TransitionTables(names, nets)
    lo, hi = tables.statistic_extremes()
    assert (tables.observed >= lo - 1e-9).all()
    assert (tables.observed <= hi + 1e-9).all()


def test_unnormalized_log_density(rng):
    names = ("D", "R")
    theta = np.array([0.7, -0.3])
    prev, cur = rand_net(rng, 4, 0.5), rand_net(rng, 4, 0.5)
    model = TransitionModel(names, theta)
    want = theta @ oracle_psi(names, cur, prev)
    assert unnormalized_log_density(model, cur, prev) == pytest.approx(want, abs=1e-12)
