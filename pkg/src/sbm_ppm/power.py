"""Projected power iterations for community recovery.

One iteration scores every vertex against every group by counting adjacent
members (a sparse matrix product) and projects the scores back onto the
capacity-constrained clusterings. The iterate sequence is

    H_1 = project(H_0),   H_{k+1} = project(A @ H_k),

so the first step only rebalances the initial clustering to the target group
sizes. All score matrices are integer edge counts and are projected in exact
arithmetic.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .assignment import project, verify_certificate
from .metrics import align
from .sbm import Clustering


def score(adjacency, clustering: Clustering) -> np.ndarray:
    """n x K matrix of adjacent-member counts: score[i, k] = |N(i) in group k|.

    One pass over the nonzeros of the adjacency matrix; integer output.
    """
    n = clustering.n
    if adjacency.shape != (n, n):
        raise ValueError("adjacency shape does not match clustering size")
    H = clustering.to_matrix(np.int64)
    C = adjacency @ H
    return np.asarray(C)


def power_step(adjacency, clustering: Clustering, capacities) -> Clustering:
    """project(score(A, H), capacities): one full iteration."""
    return project(score(adjacency, clustering), capacities).clustering


def mle_objective(adjacency, clustering: Clustering) -> int:
    """<A H, H>: twice the number of within-group edges (diagonal counted once)."""
    C = score(adjacency, clustering)
    return int(C[np.arange(clustering.n), clustering.labels].sum())


def theorem_budget(n: int) -> int:
    """Iteration count sufficient for convergence above the recovery threshold.

    ceil(2 ln ln n) + ceil(2 ln n / ln ln n) + 2, natural logs; requires n >= 16.
    """
    if n < 16:
        raise ValueError("theorem_budget requires n >= 16")
    loglog = math.log(math.log(n))
    return math.ceil(2.0 * loglog) + math.ceil(2.0 * math.log(n) / loglog) + 2


def default_iteration_cap(n: int) -> int:
    """Default max_iterations: max(theorem_budget(n), 30)."""
    if n < 16:
        return 30
    return max(theorem_budget(n), 30)


@dataclass(frozen=True)
class RunConfig:
    """Iteration controls.

    max_iterations: hard cap on power steps; None means max(theorem_budget, 30).
    stopping: "budget" runs the full cap; "cycle" stops when the current
        iterate exactly repeats one of the previous cycle_window iterates
        (checked from iterate 1 + cycle_window on) and returns the
        best-objective iterate in that window; "truth" stops at exact
        recovery of the supplied ground truth.
    record_trajectory: store the aligned Frobenius distance to truth after
        every power step (requires truth).
    verify_steps: certify every projection against its score matrix (debug).
    """

    max_iterations: int | None = None
    stopping: str = "cycle"
    cycle_window: int = 5
    record_trajectory: bool = False
    verify_steps: bool = False


@dataclass(frozen=True)
class RunResult:
    """final clustering, power steps executed, optional per-step distances to
    truth, why the run stopped ("budget" | "cycle" | "truth"), and the final
    MLE objective <A H, H>."""

    final: Clustering
    iterations_used: int
    trajectory: list[float] | None
    converged_reason: str
    objective: int


def run(
    adjacency,
    initial: Clustering,
    capacities,
    config: RunConfig | None = None,
    truth: Clustering | None = None,
) -> RunResult:
    """Run projected power iterations from an initial clustering.

    The initial clustering need not respect the capacities; the first
    projection rebalances it. With stopping="cycle" the returned clustering
    is the best-objective iterate of the detected window, which may differ
    from the last iterate produced.
    """
    config = config or RunConfig()
    if config.stopping not in ("budget", "cycle", "truth"):
        raise ValueError(f"unknown stopping rule: {config.stopping!r}")
    if config.stopping == "truth" and truth is None:
        raise ValueError("stopping='truth' requires a ground-truth clustering")
    if config.record_trajectory and truth is None:
        raise ValueError("record_trajectory requires a ground-truth clustering")
    n = initial.n
    if adjacency.shape != (n, n):
        raise ValueError("adjacency shape does not match initial clustering")
    caps = np.asarray(capacities, dtype=np.int64)
    max_iter = config.max_iterations
    if max_iter is None:
        max_iter = default_iteration_cap(n)
    if max_iter < 0:
        raise ValueError("max_iterations must be non-negative")

    current = project(initial.to_matrix(np.int64), caps).clustering
    previous: deque = deque(maxlen=config.cycle_window)
    previous.append((current.labels.tobytes(), current))
    trajectory: list[float] | None = [] if config.record_trajectory else None
    reason = "budget"
    used = 0

    for step in range(1, max_iter + 1):
        scores = score(adjacency, current)
        result = project(scores, caps)
        nxt = result.clustering
        if config.verify_steps:
            ok, _ = verify_certificate(scores, nxt)
            if not ok:
                raise ArithmeticError(f"projection certificate failed at step {step}")
        used = step
        if trajectory is not None:
            trajectory.append(align(nxt, truth).frobenius)

        if config.stopping == "truth":
            if align(nxt, truth).mismatches == 0:
                current = nxt
                reason = "truth"
                break
        elif config.stopping == "cycle":
            key = nxt.labels.tobytes()
            if len(previous) == config.cycle_window and any(key == k for k, _ in previous):
                window = [c for _, c in previous] + [nxt]
                objectives = [mle_objective(adjacency, c) for c in window]
                best = max(range(len(window)), key=lambda i: (objectives[i], i))
                current = window[best]
                reason = "cycle"
                break
            previous.append((key, nxt))
        current = nxt

    return RunResult(
        final=current,
        iterations_used=used,
        trajectory=trajectory,
        converged_reason=reason,
        objective=mle_objective(adjacency, current),
    )
