"""Starting points for the power iterations: random and spectral."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .assignment import project
from .sbm import Clustering, SeedLike, _rng


def random_init(n: int, capacities, seed: SeedLike = 0) -> Clustering:
    """Projection of an iid standard normal score matrix: a uniform-ish
    capacity-respecting clustering with a usable dual."""
    caps = np.asarray(capacities, dtype=np.int64)
    gauss = _rng(seed).standard_normal((n, caps.shape[0]))
    return project(gauss, caps).clustering


@dataclass(frozen=True)
class SpectralInfo:
    """Diagnostics: eigensolver convergence, final subspace residual,
    sweeps used, and whether the random fallback was taken."""

    converged: bool
    residual: float
    sweeps: int
    used_fallback: bool


def _topk_eigenvectors(adjacency, K: int, rng, tol: float, max_sweeps: int):
    """Orthogonal iteration with a Rayleigh-Ritz rotation on exit.

    Convergence is measured on the subspace residual
    ||A V - V (V^T A V)||_F / ||A||_F, which ignores rotations inside
    nearly degenerate eigenpairs (the planted model has a (K-1)-fold
    near-degeneracy, so a per-vector criterion would stall). On success V
    is rotated to Ritz vectors ordered by |lam| descending; the rotation
    leaves the residual unchanged, so ||A V - V diag(lam)||_F / ||A||_F
    <= tol holds for the returned V too. Returns
    (V, residual, sweeps, converged).
    """
    n = adjacency.shape[0]
    norm_a = float(np.sqrt((adjacency.data.astype(np.float64) ** 2).sum()))
    V, _ = np.linalg.qr(rng.standard_normal((n, K)))
    residual = np.inf
    for sweep in range(1, max_sweeps + 1):
        W = adjacency @ V
        B = V.T @ W
        residual = float(np.linalg.norm(W - V @ B) / norm_a)
        if residual <= tol:
            lam, S = np.linalg.eigh(B)
            order = np.argsort(np.abs(lam))[::-1]
            return V @ S[:, order], residual, sweep, True
        V, _ = np.linalg.qr(W)
    return V, residual, max_sweeps, False


def _kmeans_pp(points, K, rng):
    n = points.shape[0]
    centers = np.empty((K, points.shape[1]))
    centers[0] = points[int(rng.integers(n))]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for k in range(1, K):
        total = d2.sum()
        if total > 0:
            idx = int(rng.choice(n, p=d2 / total))
        else:
            idx = int(rng.integers(n))
        centers[k] = points[idx]
        d2 = np.minimum(d2, ((points - centers[k]) ** 2).sum(axis=1))
    return centers


def _squared_distances(points, centers):
    return ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)


def _lloyd(points, centers, max_iter=100):
    n, K = points.shape[0], centers.shape[0]
    labels = None
    for _ in range(max_iter):
        D = _squared_distances(points, centers)
        new_labels = D.argmin(axis=1)
        counts = np.bincount(new_labels, minlength=K)
        if (counts == 0).any():
            # revive empty clusters with the worst-fitted points
            assigned = D[np.arange(n), new_labels].copy()
            for k in np.flatnonzero(counts == 0):
                worst = int(np.argmax(assigned))
                new_labels[worst] = k
                assigned[worst] = -1.0
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for k in range(K):
            centers[k] = points[labels == k].mean(axis=0)
    D = _squared_distances(points, centers)
    wcss = float(D[np.arange(n), labels].sum())
    return labels, centers, wcss


def spectral_init(
    adjacency,
    capacities,
    seed: SeedLike = 0,
    *,
    tol: float = 1e-6,
    max_sweeps: int = 500,
    kmeans_restarts: int = 10,
    return_info: bool = False,
):
    """Spectral starting point: top-K eigenvectors, k-means, rebalance.

    Computes the K leading eigenvectors of the adjacency matrix by block
    power iteration, clusters the n embedded rows with k-means (k-means++
    seeding, kmeans_restarts restarts, best within-cluster sum of squares),
    and rebalances to the target capacities by projecting the negated
    squared-distance matrix. If the eigensolver does not converge within
    max_sweeps (or the graph has no edges), falls back to random_init; the
    optional SpectralInfo reports this.

    Returns the Clustering, or (Clustering, SpectralInfo) if return_info.
    """
    if not sparse.issparse(adjacency):
        adjacency = sparse.csr_array(np.asarray(adjacency))
    caps = np.asarray(capacities, dtype=np.int64)
    K = caps.shape[0]
    n = adjacency.shape[0]
    if adjacency.shape[0] != adjacency.shape[1]:
        raise ValueError("adjacency must be square")
    if caps.sum() != n:
        raise ValueError("capacities must sum to the number of vertices")
    if n < K:
        raise ValueError("need at least K vertices")
    rng = _rng(seed)

    if adjacency.nnz == 0:
        out = random_init(n, caps, rng)
        info = SpectralInfo(False, np.inf, 0, True)
        return (out, info) if return_info else out

    V, residual, sweeps, converged = _topk_eigenvectors(adjacency, K, rng, tol, max_sweeps)
    if not converged:
        out = random_init(n, caps, rng)
        info = SpectralInfo(False, residual, sweeps, True)
        return (out, info) if return_info else out

    best = None
    for _ in range(kmeans_restarts):
        centers = _kmeans_pp(V, K, rng)
        labels, centers, wcss = _lloyd(V, centers)
        if best is None or wcss < best[0]:
            best = (wcss, centers)
    D = _squared_distances(V, best[1])
    out = project(-D, caps).clustering
    info = SpectralInfo(True, residual, sweeps, False)
    return (out, info) if return_info else out
