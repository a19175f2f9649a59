"""Experiment harness: phase grids, convergence traces, real-graph runs.

Every trial derives its own RNG stream from (base_seed, cell/run indices),
so results are reproducible bit-for-bit and independent of how many workers
execute the grid. CSV files are UTF-8 with '.' decimal separators and a
fixed documented header.
"""

from __future__ import annotations

import csv
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .graphio import RealGraph
from .initializers import random_init, spectral_init
from .metrics import align, exact_recovery
from .power import RunConfig, run
from .sbm import Clustering, SbmParams, planted_truth, sample_graph

THREADS_ENV_VAR = "SBM_PPM_THREADS"

GRID_CSV_FIELDS = [
    "n", "K", "alpha", "beta", "success_count", "trials", "success_rate",
    "mean_iterations", "mean_wall_time", "threshold_margin", "error",
]
CONVERGENCE_CSV_FIELDS = ["run_id", "iteration", "frobenius_distance_to_truth"]
REAL_CSV_FIELDS = [
    "name", "n", "K", "repeats", "best_run", "best_objective",
    "misclassified", "mean_iterations", "wall_time",
]


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, then SBM_PPM_THREADS, then cpu count."""
    if workers is not None:
        if workers < 1:
            raise ValueError("workers must be positive")
        return workers
    env = os.environ.get(THREADS_ENV_VAR)
    if env:
        value = int(env)
        if value < 1:
            raise ValueError(f"{THREADS_ENV_VAR} must be positive")
        return value
    return os.cpu_count() or 1


def axis_values(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive arithmetic grid start, start+step, ..., stop."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError("stop must not be below start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(count), 10)


@dataclass(frozen=True)
class GridSpec:
    """A phase-grid experiment over (alpha, beta) cells.

    alpha_range and beta_range are (start, stop, step), inclusive of stop.
    Each cell runs `trials` independent instances; trial t of cell (i, j)
    seeds its streams from (base_seed, i, j, t).
    """

    n: int = 300
    K: int = 3
    alpha_range: tuple[float, float, float] = (0.0, 30.0, 2.5)
    beta_range: tuple[float, float, float] = (0.0, 10.0, 2.0)
    trials: int = 20
    base_seed: int = 0
    init: str = "spectral"
    stopping: str = "cycle"
    max_iterations: int | None = None
    self_loops: bool = True

    def alphas(self) -> np.ndarray:
        return axis_values(*self.alpha_range)

    def betas(self) -> np.ndarray:
        return axis_values(*self.beta_range)


FULL_GRID = GridSpec(
    n=300, K=3,
    alpha_range=(0.0, 30.0, 0.5),
    beta_range=(0.0, 10.0, 0.4),
    trials=40,
)


@dataclass
class GridCellRecord:
    """Aggregated outcome of one (alpha, beta) cell."""

    n: int
    K: int
    alpha: float
    beta: float
    success_count: int
    trials: int
    mean_iterations: float
    mean_wall_time: float
    threshold_margin: float
    error: str = ""

    @property
    def success_rate(self) -> float:
        return self.success_count / self.trials if self.trials else 0.0

    def csv_row(self) -> dict:
        return {
            "n": self.n,
            "K": self.K,
            "alpha": format(self.alpha, ".10g"),
            "beta": format(self.beta, ".10g"),
            "success_count": self.success_count,
            "trials": self.trials,
            "success_rate": format(self.success_rate, ".4f"),
            "mean_iterations": format(self.mean_iterations, ".4f"),
            "mean_wall_time": format(self.mean_wall_time, ".6f"),
            "threshold_margin": format(self.threshold_margin, ".6f"),
            "error": self.error,
        }


def threshold_margin(alpha: float, beta: float, K: int) -> float:
    """sqrt(alpha) - sqrt(beta) - sqrt(K); exact recovery is possible iff > 0."""
    return math.sqrt(alpha) - math.sqrt(beta) - math.sqrt(K)


def _make_initial(kind: str, adjacency, capacities, seed) -> Clustering:
    if kind == "random":
        return random_init(adjacency.shape[0], capacities, seed)
    if kind == "spectral":
        return spectral_init(adjacency, capacities, seed)
    raise ValueError(f"unknown initializer: {kind!r}")


def run_grid_cell(spec: GridSpec, alpha_index: int, beta_index: int) -> GridCellRecord:
    """Run all trials of one cell; failures become an error record, not a raise."""
    alpha = float(spec.alphas()[alpha_index])
    beta = float(spec.betas()[beta_index])
    margin = threshold_margin(alpha, beta, spec.K)
    base = GridCellRecord(
        n=spec.n, K=spec.K, alpha=alpha, beta=beta,
        success_count=0, trials=spec.trials,
        mean_iterations=math.nan, mean_wall_time=math.nan,
        threshold_margin=margin,
    )
    try:
        params = SbmParams.logarithmic(spec.n, spec.K, alpha, beta)
        capacities = np.full(spec.K, spec.n // spec.K, dtype=np.int64)
        config = RunConfig(stopping=spec.stopping, max_iterations=spec.max_iterations)
        successes = 0
        iterations = []
        timings = []
        for trial in range(spec.trials):
            root = np.random.SeedSequence((spec.base_seed, alpha_index, beta_index, trial))
            seed_truth, seed_graph, seed_init = root.spawn(3)
            truth = planted_truth(spec.n, spec.K, seed_truth)
            adjacency = sample_graph(params, truth, seed_graph, self_loops=spec.self_loops)
            started = time.perf_counter()
            initial = _make_initial(spec.init, adjacency, capacities, seed_init)
            result = run(adjacency, initial, capacities, config)
            timings.append(time.perf_counter() - started)
            iterations.append(result.iterations_used)
            successes += int(exact_recovery(result.final, truth))
        base.success_count = successes
        base.mean_iterations = float(np.mean(iterations))
        base.mean_wall_time = float(np.mean(timings))
        return base
    except Exception as exc:  # error rows must never abort the grid
        base.error = f"{type(exc).__name__}: {exc}"
        return base


def _cell_entry(args):
    return run_grid_cell(*args)


def run_phase_grid(spec: GridSpec, workers: int | None = None):
    """Yield one GridCellRecord per (alpha, beta) cell, ordered by (alpha, beta).

    Cells execute on a process pool (size from `workers`, the SBM_PPM_THREADS
    environment variable, or the cpu count); results are identical for every
    worker count because each trial's RNG stream depends only on
    (base_seed, cell indices, trial).
    """
    jobs = [
        (spec, ai, bi)
        for ai in range(spec.alphas().size)
        for bi in range(spec.betas().size)
    ]
    count = resolve_workers(workers)
    if count == 1:
        for job in jobs:
            yield _cell_entry(job)
        return
    with ProcessPoolExecutor(max_workers=count) as pool:
        yield from pool.map(_cell_entry, jobs, chunksize=1)


def write_grid_csv(records, path) -> list[GridCellRecord]:
    """Write grid records as CSV (UTF-8, '.' decimals); returns them as a list."""
    out = []
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=GRID_CSV_FIELDS)
        writer.writeheader()
        for record in records:
            writer.writerow(record.csv_row())
            out.append(record)
    return out


# ----------------------------------------------------------------------
# convergence traces
# ----------------------------------------------------------------------

@dataclass
class ConvergenceRun:
    run_id: int
    iterations_used: int
    converged: bool
    trajectory: list = field(default_factory=list)


def run_convergence(
    n: int,
    K: int,
    alpha: float,
    beta: float,
    repeats: int = 10,
    base_seed: int = 0,
    init: str = "random",
    max_iterations: int | None = None,
    self_loops: bool = True,
) -> list[ConvergenceRun]:
    """Per-iteration distance to truth for `repeats` initializations of one graph.

    Samples a single instance, then runs the power iterations from `repeats`
    independent starting points, recording after every step the aligned
    Frobenius distance to the planted truth. Runs stop early at exact
    recovery; an entry of 0 therefore ends each converged trace.
    """
    root = np.random.SeedSequence((base_seed, 0))
    seed_truth, seed_graph, *seed_inits = root.spawn(2 + repeats)
    params = SbmParams.logarithmic(n, K, alpha, beta)
    truth = planted_truth(n, K, seed_truth)
    adjacency = sample_graph(params, truth, seed_graph, self_loops=self_loops)
    capacities = np.full(K, n // K, dtype=np.int64)
    config = RunConfig(
        stopping="truth", max_iterations=max_iterations, record_trajectory=True
    )
    runs = []
    for run_id in range(repeats):
        initial = _make_initial(init, adjacency, capacities, seed_inits[run_id])
        result = run(adjacency, initial, capacities, config, truth=truth)
        runs.append(
            ConvergenceRun(
                run_id=run_id,
                iterations_used=result.iterations_used,
                converged=result.converged_reason == "truth",
                trajectory=list(result.trajectory),
            )
        )
    return runs


def write_convergence_csv(runs, path) -> None:
    """Rows (run_id, iteration, frobenius_distance_to_truth), iteration 1-based."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CONVERGENCE_CSV_FIELDS)
        for entry in runs:
            for iteration, distance in enumerate(entry.trajectory, start=1):
                writer.writerow([entry.run_id, iteration, format(distance, ".6f")])


# ----------------------------------------------------------------------
# real graphs
# ----------------------------------------------------------------------

@dataclass
class RealRunResult:
    """Best-of-`repeats` summary for one real graph."""

    name: str
    n: int
    K: int
    repeats: int
    best_run: int
    best_objective: int
    misclassified: int | None
    mean_iterations: float
    wall_time: float
    final: Clustering | None = None

    def csv_row(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "K": self.K,
            "repeats": self.repeats,
            "best_run": self.best_run,
            "best_objective": self.best_objective,
            "misclassified": "" if self.misclassified is None else self.misclassified,
            "mean_iterations": format(self.mean_iterations, ".4f"),
            "wall_time": format(self.wall_time, ".6f"),
        }


def run_real(
    graph: RealGraph,
    capacities=None,
    repeats: int = 10,
    base_seed: int = 0,
    max_iterations: int = 1000,
) -> RealRunResult:
    """Community recovery on a real graph: best objective over random restarts.

    Capacities default to the label-derived community sizes (unbalanced
    groups are fine); without labels they must be supplied. Each restart runs
    with cycle-detection stopping and the given iteration cap; the restart
    with the highest final objective <A H, H> wins (ties to the lowest run
    id). Misclassified counts are reported only when labels exist.
    """
    if capacities is None:
        if graph.labels is None:
            raise ValueError("capacities are required when the graph has no labels")
        capacities = graph.labels.capacities
    caps = np.asarray(capacities, dtype=np.int64)
    if caps.sum() != graph.n:
        raise ValueError("capacities must sum to the number of vertices")
    K = caps.shape[0]
    config = RunConfig(stopping="cycle", max_iterations=max_iterations)
    best = None
    best_id = -1
    iterations = []
    started = time.perf_counter()
    for run_id in range(repeats):
        seed = np.random.SeedSequence((base_seed, run_id))
        initial = random_init(graph.n, caps, seed)
        result = run(graph.adjacency, initial, caps, config)
        iterations.append(result.iterations_used)
        if best is None or result.objective > best.objective:
            best = result
            best_id = run_id
    wall = time.perf_counter() - started
    mismatches = None
    if graph.labels is not None and graph.labels.n_groups == K:
        mismatches = align(best.final, graph.labels).mismatches
    return RealRunResult(
        name=graph.name,
        n=graph.n,
        K=K,
        repeats=repeats,
        best_run=best_id,
        best_objective=best.objective,
        misclassified=mismatches,
        mean_iterations=float(np.mean(iterations)),
        wall_time=wall,
        final=best.final,
    )


def write_real_csv(results, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.DictWriter(handle, fieldnames=REAL_CSV_FIELDS)
        writer.writeheader()
        for result in results:
            writer.writerow(result.csv_row())
