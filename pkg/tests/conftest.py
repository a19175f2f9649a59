"""Shared builders for the test suite."""

import numpy as np
import pytest

from sbm_ppm import Clustering, SbmParams, planted_truth, sample_graph


def random_capacities(rng, n, K, allow_zero=False):
    """Length-K non-negative integer vector summing to n."""
    while True:
        cuts = np.sort(rng.integers(0, n + 1, size=K - 1))
        caps = np.diff(np.concatenate([[0], cuts, [n]])).astype(np.int64)
        if allow_zero or (caps > 0).all():
            return caps


def random_instance(rng, n_max=12, k_choices=(2, 3), integer=True, allow_zero=False):
    """A random (scores, capacities) projection instance."""
    K = int(rng.choice(k_choices))
    n = int(rng.integers(K, n_max + 1))
    if integer:
        C = rng.integers(-9, 10, size=(n, K)).astype(np.int64)
    else:
        C = rng.standard_normal((n, K))
    return C, random_capacities(rng, n, K, allow_zero=allow_zero)


def random_clustering(rng, n, K):
    """Uniform labels conditioned on every group being non-empty."""
    while True:
        labels = rng.integers(0, K, size=n).astype(np.int64)
        if np.unique(labels).size == K:
            return Clustering(labels, K)


def strict_gap_scores(rng, clustering, delta, spread=1.0):
    """Scores whose unique optimum at the clustering's capacities is the
    clustering itself: every row's own column beats the others by >= delta."""
    n, K = clustering.n, clustering.n_groups
    C = rng.standard_normal((n, K)) * spread
    rows = np.arange(n)
    own = clustering.labels
    others = C.copy()
    others[rows, own] = -np.inf
    C[rows, own] = others.max(axis=1) + delta + rng.random(n) * spread
    return C


def dense_block_graph(n, K, self_loops=True, seed=0):
    """p=1, q=0 graph: K complete blocks, contiguous truth."""
    params = SbmParams(n=n, K=K, alpha=0.0, beta=0.0, p=1.0, q=0.0)
    truth = planted_truth(n, K, seed, permute=False)
    adjacency = sample_graph(params, truth, seed, self_loops=self_loops)
    return adjacency, truth


def structure_ok(clustering, capacities):
    """Row-sum-1 / column-sum-pi / binary check on the membership matrix."""
    H = clustering.to_matrix(np.int64)
    binary = np.isin(H, (0, 1)).all()
    rows = (H.sum(axis=1) == 1).all()
    cols = np.array_equal(H.sum(axis=0), np.asarray(capacities, dtype=np.int64))
    return bool(binary and rows and cols)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
