"""Exact capacitated projection, duals, certificates, and the brute-force oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from sbm_ppm import (
    Clustering,
    brute_force_project,
    project,
    project_k2,
    verify_certificate,
)
from sbm_ppm.assignment import assignment_count

from conftest import (
    random_capacities,
    random_clustering,
    random_instance,
    strict_gap_scores,
    structure_ok,
)


def dual_is_valid(C, result, tol=1e-9):
    """Every inequality C[i,k] - C[i,l] >= w[k] - w[l] for i in group k."""
    w = result.dual
    if w[0] != 0:
        return False
    labels = result.clustering.labels
    own = C[np.arange(C.shape[0]), labels]
    slack = (own[:, None] - C) - (w[labels][:, None] - w[None, :])
    return bool((slack >= -tol * max(1.0, np.abs(C).max())).all())


# ----------------------------------------------------------------------
# pinned examples
# ----------------------------------------------------------------------

def test_project_pinned_4x2():
    C = np.array([[5, 0], [4, 0], [0, 3], [1, 0]])
    result = project(C, (2, 2))
    assert np.array_equal(result.clustering.labels, [0, 0, 1, 1])
    assert result.objective == 12
    assert isinstance(result.objective, int)
    assert np.array_equal(result.dual, [0, -1])


def test_project_identity_3x3():
    result = project(np.eye(3), (1, 1, 1))
    assert np.array_equal(result.clustering.labels, [0, 1, 2])
    assert result.objective == pytest.approx(3.0)


def test_project_of_clustering_matrix_is_identity(rng):
    for _ in range(20):
        K = int(rng.integers(2, 5))
        n = int(rng.integers(K, 15))
        c = random_clustering(rng, n, K)
        result = project(c.to_matrix(np.int64), c.capacities)
        assert result.clustering == c
        assert result.objective == n


def test_project_all_equal_scores_gives_zero_dual():
    result = project(np.zeros((6, 3)), (2, 2, 2))
    assert np.array_equal(result.dual, [0.0, 0.0, 0.0])
    assert result.objective == pytest.approx(0.0)


def test_project_k2_pinned():
    C = np.array([[3, 0], [1, 0], [-2, 0], [0, 0]])  # gaps (3, 1, -2, 0)
    result = project_k2(C, (2, 2))
    assert np.array_equal(result.clustering.labels, [0, 0, 1, 1])


def test_project_k2_tie_lowest_index_first():
    C = np.zeros((4, 2))  # all gaps tie at 0
    result = project_k2(C, (2, 2))
    assert np.array_equal(result.clustering.labels, [0, 0, 1, 1])
    # tie at the threshold among a strict subset: rows 1 and 3 tie for one slot
    C = np.array([[9.0, 0.0], [2.0, 0.0], [0.0, 5.0], [2.0, 0.0]])
    result = project_k2(C, (2, 2))
    assert np.array_equal(result.clustering.labels, [0, 0, 1, 1])


def test_project_errors():
    with pytest.raises(ValueError):
        project(np.zeros((4, 2)), (1, 2))  # sum 3 != 4
    with pytest.raises(ValueError):
        project(np.zeros((4, 2)), (2, -2, 4))
    with pytest.raises(ValueError):
        project(np.array([[np.nan, 0.0]]), (1, 0))
    with pytest.raises(ValueError):
        project(np.zeros(4), (2, 2))
    with pytest.raises(ValueError):
        project_k2(np.zeros((4, 3)), (2, 1, 1))


def test_project_zero_capacity_groups():
    C = np.array([[1.0, 5.0, 0.0], [2.0, 1.0, 0.0]])
    result = project(C, (1, 1, 0))
    assert np.array_equal(result.clustering.labels, [1, 0])
    assert np.array_equal(result.clustering.capacities, [1, 1, 0])
    ok, _ = verify_certificate(C, result.clustering)
    assert ok


# ----------------------------------------------------------------------
# brute-force oracle agreement
# ----------------------------------------------------------------------

def test_assignment_count():
    assert assignment_count(4, (2, 2)) == 6
    assert assignment_count(6, (2, 2, 2)) == 90
    assert assignment_count(5, (5, 0)) == 1


def test_brute_force_enumerates_all_partitions():
    # all-equal scores: every one of the C(4,2)=6 partitions is optimal
    objective, argmax = brute_force_project(np.zeros((4, 2)), (2, 2))
    assert objective == pytest.approx(0.0)
    assert len(argmax) == 6


def test_brute_force_guard():
    with pytest.raises(ValueError):
        brute_force_project(np.zeros((30, 3)), (10, 10, 10))


def test_brute_force_strict_gap_singleton(rng):
    c = random_clustering(rng, 8, 3)
    C = strict_gap_scores(rng, c, delta=1.0)
    objective, argmax = brute_force_project(C, c.capacities)
    assert len(argmax) == 1
    assert argmax[0] == c


def test_project_matches_oracle_integer(rng):
    for _ in range(200):
        C, caps = random_instance(rng, n_max=9, integer=True, allow_zero=True)
        result = project(C, caps)
        best, argmax = brute_force_project(C, caps)
        assert result.objective == best
        assert any(result.clustering == c for c in argmax)
        assert structure_ok(result.clustering, caps)


def test_project_matches_oracle_float(rng):
    for _ in range(100):
        C, caps = random_instance(rng, n_max=9, integer=False)
        result = project(C, caps)
        best, argmax = brute_force_project(C, caps)
        assert result.objective == best  # same sum expression, bitwise equal
        assert any(result.clustering == c for c in argmax)


def test_project_large_integer_entries_exact(rng):
    # edge-count scores scaled to ~2**40 stay exact
    for _ in range(20):
        C, caps = random_instance(rng, n_max=8, integer=True)
        C = C * (2**36 + 7)
        result = project(C, caps)
        best, _ = brute_force_project(C, caps)
        assert result.objective == best
        assert isinstance(result.objective, int)


def test_project_deterministic(rng):
    for _ in range(20):
        C, caps = random_instance(rng, n_max=40, k_choices=(2, 3, 4), allow_zero=True)
        a = project(C, caps)
        b = project(C, caps)
        assert a.clustering == b.clustering
        assert np.array_equal(a.dual, b.dual)


# ----------------------------------------------------------------------
# dual certificates
# ----------------------------------------------------------------------

def test_project_dual_certifies(rng):
    for _ in range(100):
        C, caps = random_instance(rng, n_max=30, k_choices=(2, 3, 5), integer=False)
        result = project(C, caps)
        assert dual_is_valid(C, result)


def test_certificate_accepts_solver_output(rng):
    for _ in range(100):
        C, caps = random_instance(rng, n_max=50, k_choices=(2, 4, 8), allow_zero=True)
        result = project(C, caps)
        ok, w = verify_certificate(C, result.clustering)
        assert ok and w is not None and w[0] == 0


def test_certificate_rejects_two_swaps(rng):
    for _ in range(50):
        K = int(rng.integers(2, 5))
        n = int(rng.integers(2 * K, 20))
        c = random_clustering(rng, n, K)
        C = strict_gap_scores(rng, c, delta=1.0)
        groups = [np.flatnonzero(c.labels == k) for k in range(K)]
        a, b = rng.choice(K, size=2, replace=False)
        i = int(rng.choice(groups[a]))
        j = int(rng.choice(groups[b]))
        swapped = c.labels.copy()
        swapped[i], swapped[j] = swapped[j], swapped[i]
        bad = Clustering(swapped, K)
        # direct evaluation: the swap strictly decreases the objective
        rows = np.arange(n)
        assert C[rows, bad.labels].sum() < C[rows, c.labels].sum()
        ok, w = verify_certificate(C, bad)
        assert not ok and w is None


def test_certificate_shape_mismatch():
    with pytest.raises(ValueError):
        verify_certificate(np.zeros((4, 2)), Clustering(np.array([0, 1, 0]), 2))


# ----------------------------------------------------------------------
# algebraic properties
# ----------------------------------------------------------------------

def test_scale_invariance(rng):
    for _ in range(50):
        C, caps = random_instance(rng, n_max=20, integer=False)
        base = project(C, caps).clustering
        for t in (0.25, 3.0, 1e4):
            assert project(t * C, caps).clustering == base


def test_permutation_equivariance(rng):
    for _ in range(50):
        C, caps = random_instance(rng, n_max=20, k_choices=(2, 3, 4), integer=False)
        K = C.shape[1]
        perm = rng.permutation(K)
        result = project(C, caps)
        permuted = project(C[:, perm], caps[perm])
        # column j of the permuted instance is column perm[j] of the original
        inverse = np.empty(K, dtype=np.int64)
        inverse[perm] = np.arange(K)
        assert permuted.clustering == result.clustering.relabel(inverse)
        assert permuted.objective == result.objective


def test_lipschitz_stability(rng):
    # unique optimum V with row gap delta; any perturbation moves the
    # projection by at most 2 ||C - C'||_F / delta in Frobenius norm
    for _ in range(100):
        K = int(rng.integers(2, 5))
        n = int(rng.integers(K, 25))
        delta = float(rng.uniform(0.5, 5.0))
        c = random_clustering(rng, n, K)
        C = strict_gap_scores(rng, c, delta)
        V = project(C, c.capacities).clustering
        assert V == c
        perturbed = C + rng.standard_normal(C.shape) * rng.uniform(0.05, 2.0)
        Vp = project(perturbed, c.capacities).clustering
        lhs = np.linalg.norm(V.to_matrix() - Vp.to_matrix())
        rhs = 2.0 * np.linalg.norm(C - perturbed) / delta
        assert lhs <= rhs + 1e-9


def test_project_k2_matches_general(rng):
    for _ in range(100):
        n = int(rng.integers(2, 30))
        caps = random_capacities(rng, n, 2, allow_zero=True)
        C = rng.integers(-50, 51, size=(n, 2)) if rng.random() < 0.5 else rng.standard_normal((n, 2))
        assert project_k2(C, caps).objective == project(C, caps).objective


@settings(deadline=None, max_examples=60, derandomize=True)
@given(
    C=hnp.arrays(np.int64, st.tuples(st.integers(2, 7), st.integers(2, 3)),
                 elements=st.integers(-8, 8)),
    seed=st.integers(0, 1000),
)
def test_projection_feasibility_property(C, seed):
    caps = random_capacities(np.random.default_rng(seed), C.shape[0], C.shape[1],
                             allow_zero=True)
    result = project(C, caps)
    assert structure_ok(result.clustering, caps)
    best, _ = brute_force_project(C, caps)
    assert result.objective == best
