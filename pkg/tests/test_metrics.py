"""Permutation-aligned agreement metrics."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sbm_ppm import Clustering, align, confusion_matrix, exact_recovery

from conftest import random_clustering


def brute_force_mismatches(candidate, reference):
    """Min disagreements over all K! group relabelings."""
    K = candidate.n_groups
    best = candidate.n
    for perm in itertools.permutations(range(K)):
        mapped = np.asarray(perm)[candidate.labels]
        best = min(best, int((mapped != reference.labels).sum()))
    return best


def test_align_pinned_example():
    truth = Clustering(np.array([0, 0, 1, 1, 2, 2]), 3)
    other = Clustering(np.array([0, 0, 1, 2, 2, 2]), 3)
    result = align(other, truth)
    assert result.mismatches == 1
    assert result.frobenius == pytest.approx(math.sqrt(2.0))
    assert brute_force_mismatches(other, truth) == 1


def test_align_identical_and_shifted():
    truth = Clustering(np.array([0, 0, 1, 1, 2, 2]), 3)
    assert align(truth, truth).mismatches == 0
    shifted = truth.relabel([1, 2, 0])
    assert align(shifted, truth).mismatches == 0
    assert align(shifted, truth).frobenius == 0.0
    assert exact_recovery(shifted, truth)


def test_exact_recovery_flags_one_flip():
    truth = Clustering(np.array([0, 0, 1, 1]), 2)
    flipped = Clustering(np.array([0, 1, 1, 1]), 2)
    assert not exact_recovery(flipped, truth)


def test_confusion_matrix_counts():
    truth = Clustering(np.array([0, 0, 1, 1, 2, 2]), 3)
    other = Clustering(np.array([0, 0, 1, 2, 2, 2]), 3)
    N = confusion_matrix(other, truth)
    assert np.array_equal(N, [[2, 0, 0], [0, 1, 0], [0, 1, 2]])
    assert N.sum() == 6


def test_align_errors():
    a = Clustering(np.array([0, 1]), 2)
    with pytest.raises(ValueError):
        align(a, Clustering(np.array([0, 1, 0]), 2))
    with pytest.raises(ValueError):
        align(a, Clustering(np.array([0, 1]), 3))


def test_align_matches_permutation_oracle(rng):
    # Hungarian vs K!-enumeration on 500 random pairs, K up to 6
    for _ in range(500):
        K = int(rng.integers(2, 7))
        n = int(rng.integers(K, 40))
        a = random_clustering(rng, n, K)
        b = random_clustering(rng, n, K)
        result = align(a, b)
        assert result.mismatches == brute_force_mismatches(a, b)
        assert result.frobenius == pytest.approx(math.sqrt(2.0 * result.mismatches))


def test_align_permutation_applies(rng):
    for _ in range(50):
        K = int(rng.integers(2, 6))
        n = int(rng.integers(K, 30))
        a = random_clustering(rng, n, K)
        b = random_clustering(rng, n, K)
        result = align(a, b)
        # applying the matched relabeling realizes the mismatch count
        assert int((a.relabel(result.permutation).labels != b.labels).sum()) == result.mismatches
        # and equals the Frobenius distance between membership matrices
        dist = np.linalg.norm(a.relabel(result.permutation).to_matrix() - b.to_matrix())
        assert dist == pytest.approx(result.frobenius)


def test_align_mismatch_symmetry(rng):
    for _ in range(100):
        K = int(rng.integers(2, 6))
        n = int(rng.integers(K, 30))
        a = random_clustering(rng, n, K)
        b = random_clustering(rng, n, K)
        assert align(a, b).mismatches == align(b, a).mismatches


def test_align_triangle_inequality(rng):
    for _ in range(100):
        K = int(rng.integers(2, 5))
        n = int(rng.integers(K, 24))
        a = random_clustering(rng, n, K)
        b = random_clustering(rng, n, K)
        c = random_clustering(rng, n, K)
        ab = align(a, b).mismatches
        ac = align(a, c).mismatches
        cb = align(c, b).mismatches
        assert ab <= ac + cb


@settings(deadline=None, max_examples=50, derandomize=True)
@given(labels=st.lists(st.integers(0, 3), min_size=4, max_size=30),
       perm_seed=st.integers(0, 999))
def test_align_relabel_invariance_property(labels, perm_seed):
    arr = np.asarray(labels, dtype=np.int64)
    c = Clustering(arr, 4)
    perm = np.random.default_rng(perm_seed).permutation(4)
    assert align(c.relabel(perm), c).mismatches == 0
