"""Capacity-constrained assignment: project a score matrix onto clusterings.

project(C, pi) returns the clustering H maximizing <C, H> subject to exact
group sizes pi, i.e. the Frobenius-nearest clustering matrix to C with those
capacities. The feasible polytope's extreme points are exactly the clustering
matrices (the constraint matrix is totally unimodular), so the combinatorial
optimum solves the LP exactly.

Solver: every row starts at its best column, then capacity excess is routed
one unit at a time along shortest paths in the K-node exchange graph whose
arc (k, l) costs the cheapest single-row move from group k to group l. This
is successive-shortest-paths min-cost flow with the n trivial augmentations
collapsed into the greedy start; integer scores are handled in exact integer
arithmetic. Optimality is certified by the dual: H is optimal iff there are
potentials w with C[i,k] - C[i,l] >= w[k] - w[l] for every i in group k and
every l, which holds iff the exchange graph has no negative cycle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .sbm import Clustering


@dataclass(frozen=True)
class ProjectionResult:
    """Optimal clustering, dual potentials (dual[0] = 0), and objective <C, H>."""

    clustering: Clustering
    dual: np.ndarray
    objective: float | int


# ----------------------------------------------------------------------
# validation helpers
# ----------------------------------------------------------------------

def _as_score_matrix(scores) -> tuple[np.ndarray, bool]:
    C = np.asarray(scores)
    if C.ndim != 2 or C.shape[0] < 1 or C.shape[1] < 1:
        raise ValueError("scores must be a non-empty 2-d matrix")
    if np.issubdtype(C.dtype, np.integer) or C.dtype == np.bool_:
        return C.astype(np.int64, copy=False), True
    C = C.astype(np.float64, copy=False)
    if not np.isfinite(C).all():
        raise ValueError("scores must be finite")
    return C, False


def _as_capacities(capacities, shape) -> np.ndarray:
    caps = np.asarray(capacities, dtype=np.int64)
    n, k = shape
    if caps.ndim != 1 or caps.shape[0] != k:
        raise ValueError("capacities must be a length-K vector")
    if (caps < 0).any():
        raise ValueError("capacities must be non-negative")
    if caps.sum() != n:
        raise ValueError(f"capacities sum to {caps.sum()}, expected n = {n}")
    return caps


def _float_tolerance(C: np.ndarray) -> float:
    return 1e-9 * max(1.0, float(np.abs(C).max()))


# ----------------------------------------------------------------------
# exchange graph and dual potentials
# ----------------------------------------------------------------------

def _exchange_matrix(cost: np.ndarray, labels: np.ndarray, K: int):
    """Arc matrix X[k, l] = min over rows i in group k of cost[i, l] - cost[i, k].

    Witness rows (lowest-index minimizers) returned alongside; empty groups
    have no outgoing arcs (+inf).
    """
    X = np.full((K, K), np.inf)
    Xarg = np.full((K, K), -1, dtype=np.int64)
    for k in range(K):
        rows = np.flatnonzero(labels == k)
        _recompute_arcs(cost, rows, X, Xarg, k)
    return X, Xarg


def _recompute_arcs(cost, rows, X, Xarg, k):
    if len(rows) == 0:
        X[k, :] = np.inf
        Xarg[k, :] = -1
        return
    rows = np.asarray(rows, dtype=np.int64)
    rows = np.sort(rows)  # first-occurrence argmin then picks the lowest row
    diffs = cost[rows] - cost[rows, k][:, None]
    pos = diffs.argmin(axis=0)
    X[k, :] = diffs[pos, np.arange(diffs.shape[1])]
    Xarg[k, :] = rows[pos]
    X[k, k] = np.inf
    Xarg[k, k] = -1


def _potentials_from_arcs(X: np.ndarray, tol: float) -> np.ndarray | None:
    """Potentials w with w[k] - w[l] <= X[k, l] for all arcs, or None.

    Bellman-Ford from a virtual source attached to every node with weight 0;
    feasible exactly when the arc graph has no negative cycle (beyond tol).
    Normalized so w[0] = 0.
    """
    K = X.shape[0]
    dist = np.zeros(K)
    for _ in range(K):
        relaxed = (dist[:, None] + X).min(axis=0)
        updated = np.minimum(dist, relaxed)
        if np.array_equal(updated, dist):
            break
        dist = updated
    if ((dist[:, None] + X).min(axis=0) < dist - tol).any():
        return None
    w = -dist
    return w - w[0]


# ----------------------------------------------------------------------
# exact projection
# ----------------------------------------------------------------------

def project(scores, capacities) -> ProjectionResult:
    """Clustering maximizing <scores, H> under exact group sizes.

    Args:
        scores: n x K matrix, integer or float, finite. Integer inputs are
            solved in exact integer arithmetic.
        capacities: length-K non-negative integers summing to n. Zero
            capacities are legal and produce empty groups.

    Returns:
        ProjectionResult with the optimal clustering, dual potentials
        certifying optimality (normalized to dual[0] = 0), and the objective.

    Ties are broken deterministically: each row's scan prefers the lowest
    column, and repair augmentations prefer the lowest-index groups and rows.
    """
    C, is_int = _as_score_matrix(scores)
    caps = _as_capacities(capacities, C.shape)
    n, K = C.shape
    labels = np.argmax(C, axis=1).astype(np.int64)
    counts = np.bincount(labels, minlength=K)
    if not np.array_equal(counts, caps):
        _repair(-C, labels, counts, caps)
    return _finish(C, is_int, labels, K)


def _finish(C, is_int, labels, K) -> ProjectionResult:
    n = C.shape[0]
    objective = C[np.arange(n), labels].sum()
    objective = int(objective) if is_int else float(objective)
    tol = 0.0 if is_int else _float_tolerance(C)
    X, _ = _exchange_matrix(-C, labels, K)
    w = _potentials_from_arcs(X, tol)
    if w is None:
        raise ArithmeticError("projection produced no optimality certificate")
    return ProjectionResult(Clustering(labels, K), w, objective)


def _repair(cost, labels, counts, caps):
    """Route capacity excess to deficit along shortest exchange paths, in place."""
    K = cost.shape[1]
    members = [np.flatnonzero(labels == k).tolist() for k in range(K)]
    X, Xarg = _exchange_matrix(cost, labels, K)
    while True:
        over = np.flatnonzero(counts > caps)
        if over.size == 0:
            return
        s = int(over[0])
        dist, pred = _bellman_ford(X, s)
        under = np.flatnonzero(counts < caps)
        t = int(under[np.argmin(dist[under])])
        if not np.isfinite(dist[t]):
            raise ArithmeticError("deficit group unreachable in exchange graph")
        path = []
        node = t
        while node != s:
            prev = int(pred[node])
            path.append((prev, node))
            node = prev
        path.reverse()
        moves = [(k, l, int(Xarg[k, l])) for k, l in path]
        for src, dst, row in moves:
            labels[row] = dst
            members[src].remove(row)
            members[dst].append(row)
            counts[src] -= 1
            counts[dst] += 1
            arrived = cost[row] - cost[row, dst]
            better = arrived < X[dst]
            better[dst] = False
            if better.any():
                X[dst, better] = arrived[better]
                Xarg[dst, better] = row
            if (Xarg[src] == row).any():
                _recompute_arcs(cost, members[src], X, Xarg, src)


def _bellman_ford(X, source):
    """Shortest distances from source over the arc matrix; no negative cycles."""
    K = X.shape[0]
    dist = np.full(K, np.inf)
    dist[source] = 0.0
    pred = np.full(K, -1, dtype=np.int64)
    for _ in range(K):
        cand = dist[:, None] + X
        best = cand.min(axis=0)
        improved = best < dist
        if not improved.any():
            return dist, pred
        arg = cand.argmin(axis=0)
        dist = np.where(improved, best, dist)
        pred = np.where(improved, arg, pred)
    if ((dist[:, None] + X).min(axis=0) < dist).any():
        raise ArithmeticError("negative cycle in exchange graph")
    return dist, pred


def project_k2(scores, capacities) -> ProjectionResult:
    """Two-group fast path: group 0 gets the capacities[0] largest score gaps.

    Selects the rows with the largest scores[:, 0] - scores[:, 1] by rank
    selection rather than a full sort; ties at the threshold value are filled
    lowest index first. Equal to project(scores, capacities) in objective.
    """
    C, is_int = _as_score_matrix(scores)
    if C.shape[1] != 2:
        raise ValueError("project_k2 requires exactly two columns")
    caps = _as_capacities(capacities, C.shape)
    n = C.shape[0]
    m1 = int(caps[0])
    gap = C[:, 0] - C[:, 1]
    labels = np.ones(n, dtype=np.int64)
    if m1 == n:
        labels[:] = 0
    elif m1 > 0:
        threshold = np.partition(gap, n - m1)[n - m1]
        chosen = np.flatnonzero(gap > threshold)
        ties = np.flatnonzero(gap == threshold)[: m1 - chosen.size]
        labels[chosen] = 0
        labels[ties] = 0
    return _finish(C, is_int, labels, 2)


# ----------------------------------------------------------------------
# certificate and oracle
# ----------------------------------------------------------------------

def verify_certificate(scores, clustering: Clustering, tol: float | None = None):
    """Check optimality of a clustering for project(scores, its capacities).

    Builds the exchange graph over the clustering's groups and searches for a
    negative cycle (Bellman-Ford over K nodes). Returns (feasible, dual):
    feasible is True iff potentials exist, in which case dual certifies
    optimality; on failure dual is None.

    tol defaults to 0 for integer scores (exact arithmetic) and
    1e-9 * max(1, max|C|) for floats.
    """
    C, is_int = _as_score_matrix(scores)
    if clustering.n != C.shape[0] or clustering.n_groups != C.shape[1]:
        raise ValueError("clustering shape does not match scores")
    if tol is None:
        tol = 0.0 if is_int else _float_tolerance(C)
    X, _ = _exchange_matrix(-C, clustering.labels, clustering.n_groups)
    w = _potentials_from_arcs(X, tol)
    return (w is not None), w


def assignment_count(n: int, capacities) -> int:
    """Number of clusterings of n items with the given group sizes."""
    caps = _as_capacities(capacities, (n, len(capacities)))
    total = math.factorial(n)
    for c in caps:
        total //= math.factorial(int(c))
    return total


def brute_force_project(scores, capacities, *, limit: int = 1_000_000):
    """Exhaustive oracle: exact optimum of <scores, H> over all clusterings.

    Returns (objective, argmax) where argmax lists every optimal clustering
    in deterministic (lexicographic) enumeration order. Refuses instances
    with more than `limit` feasible clusterings.
    """
    C, is_int = _as_score_matrix(scores)
    caps = _as_capacities(capacities, C.shape)
    n, K = C.shape
    if assignment_count(n, caps) > limit:
        raise ValueError("instance too large for brute force enumeration")

    rows = np.arange(n)
    labels = np.empty(n, dtype=np.int64)
    best = None
    argmax: list[Clustering] = []

    def recurse(group: int, remaining: tuple):
        nonlocal best
        if group == K:
            obj = C[rows, labels].sum()
            obj = int(obj) if is_int else float(obj)
            if best is None or obj > best:
                best = obj
                argmax.clear()
                argmax.append(Clustering(labels.copy(), K))
            elif obj == best:
                argmax.append(Clustering(labels.copy(), K))
            return
        for chosen in itertools.combinations(remaining, int(caps[group])):
            for i in chosen:
                labels[i] = group
            rest = tuple(i for i in remaining if i not in set(chosen))
            recurse(group + 1, rest)

    recurse(0, tuple(range(n)))
    return best, argmax
