"""Shared helpers: pure-loop statistic oracles and tiny-network utilities.

The oracles are written straight from the definitions as explicit Python
loops over (pairwise distinct) index tuples, never reusing the package's
vectorized code paths, so agreement is a real consistency check.
"""
import numpy as np
import pytest


def pairs(n):
    return [(i, j) for i in range(n) for j in range(n) if i != j]


def oracle_density(cur, prev, labels=None):
    n = len(cur)
    return sum(cur[i][j] for i, j in pairs(n)) / (n - 1)


def oracle_stability(cur, prev, labels=None):
    n = len(cur)
    kept = sum(1.0 for i, j in pairs(n) if cur[i][j] == prev[i][j])
    return kept / (n - 1)


def oracle_reciprocity(cur, prev, labels=None):
    n = len(cur)
    edges = sum(prev[i][j] for i, j in pairs(n))
    if edges <= 0:
        return 0.0
    num = sum(cur[i][j] * prev[j][i] for i, j in pairs(n))
    return n * num / edges


def _two_paths(prev, n):
    den = 0.0
    coeff = np.zeros((n, n))
    for i in range(n):
        for k in range(n):
            if i == k:
                continue
            paths = sum(
                prev[i][j] * prev[j][k] for j in range(n) if j != i and j != k
            )
            coeff[i, k] = paths
            den += paths
    return coeff, den


def oracle_transitivity(cur, prev, labels=None):
    n = len(cur)
    coeff, den = _two_paths(prev, n)
    if den <= 0:
        return 0.0
    num = sum(cur[i][k] * coeff[i, k] for i, k in pairs(n))
    return n * num / den


def oracle_cyclic(cur, prev, labels=None):
    n = len(cur)
    coeff, den = _two_paths(prev, n)
    if den <= 0:
        return 0.0
    num = sum(cur[i][j] * coeff[j, i] for i, j in pairs(n))
    return n * num / den


def oracle_shared_supporters(cur, prev, labels=None):
    n = len(cur)
    den = 0.0
    num = 0.0
    for i, j in pairs(n):
        shared = sum(prev[k][i] * prev[k][j] for k in range(n))
        den += shared
        num += cur[i][j] * shared
    if den <= 0:
        return 0.0
    return n * num / den


def oracle_shared_targets(cur, prev, labels=None):
    n = len(cur)
    den = 0.0
    num = 0.0
    for i, j in pairs(n):
        shared = sum(prev[i][k] * prev[j][k] for k in range(n))
        den += shared
        num += cur[i][j] * shared
    if den <= 0:
        return 0.0
    return n * num / den


def oracle_popularity(cur, prev, labels=None):
    n = len(cur)
    edges = sum(prev[i][j] for i, j in pairs(n))
    den = (n - 2) * edges
    if den <= 0:
        return 0.0
    num = 0.0
    for i, j in pairs(n):
        indeg_j = sum(prev[k][j] for k in range(n))
        num += cur[i][j] * (indeg_j - prev[i][j])
    return n * num / den


def oracle_generosity(cur, prev, labels=None):
    n = len(cur)
    edges = sum(prev[i][j] for i, j in pairs(n))
    den = (n - 2) * edges
    if den <= 0:
        return 0.0
    num = 0.0
    for i, j in pairs(n):
        outdeg_i = sum(prev[i][k] for k in range(n))
        num += cur[i][j] * (outdeg_i - prev[i][j])
    return n * num / den


def oracle_within_density(cur, prev, labels):
    n = len(cur)
    num = sum(cur[i][j] for i, j in pairs(n) if labels[i] == labels[j])
    return num / (n - 1)


def oracle_between_density(cur, prev, labels):
    n = len(cur)
    num = sum(cur[i][j] for i, j in pairs(n) if labels[i] != labels[j])
    return num / (n - 1)


def oracle_within_reciprocity(cur, prev, labels):
    n = len(cur)
    den = sum(prev[i][j] for i, j in pairs(n) if labels[i] == labels[j])
    if den <= 0:
        return 0.0
    num = sum(
        cur[i][j] * prev[j][i] for i, j in pairs(n) if labels[i] == labels[j]
    )
    return n * num / den


def oracle_between_reciprocity(cur, prev, labels):
    n = len(cur)
    den = sum(prev[i][j] for i, j in pairs(n) if labels[i] != labels[j])
    if den <= 0:
        return 0.0
    num = sum(
        cur[i][j] * prev[j][i] for i, j in pairs(n) if labels[i] != labels[j]
    )
    return n * num / den


ORACLES = {
    "D": oracle_density,
    "S": oracle_stability,
    "R": oracle_reciprocity,
    "T": oracle_transitivity,
    "RT": oracle_cyclic,
    "CSd": oracle_shared_supporters,
    "CSg": oracle_shared_targets,
    "P": oracle_popularity,
    "G": oracle_generosity,
    "WD": oracle_within_density,
    "BD": oracle_between_density,
    "WR": oracle_within_reciprocity,
    "BR": oracle_between_reciprocity,
}

ALL_NAMES = tuple(ORACLES)
LABEL_NAMES = ("WD", "BD", "WR", "BR")
PLAIN_NAMES = tuple(nm for nm in ALL_NAMES if nm not in LABEL_NAMES)


def rand_net(rng, n, q=0.5):
    a = (rng.random((n, n)) < q).astype(float)
    np.fill_diagonal(a, 0.0)
    return a


def rand_codes(rng, n, K=2):
    codes = rng.integers(0, K, size=n)
    codes[0] = 0
    if n > 1:
        codes[1] = 1 % K
    return codes.astype(np.int64)


def all_networks(n):
    """Every zero-diagonal binary matrix on n nodes, via explicit bit loops."""
    slots = pairs(n)
    m = len(slots)
    nets = []
    for code in range(2**m):
        a = np.zeros((n, n))
        for b, (i, j) in enumerate(slots):
            if (code >> b) & 1:
                a[i, j] = 1.0
        nets.append(a)
    return nets


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
