"""Community recovery in symmetric stochastic block models.

The method alternates a one-pass scoring of vertices against groups with an
exact projection onto capacity-constrained clusterings; see the module
docstrings for the pieces:

    sbm           model parameters, planted truth, graph sampling
    assignment    exact capacitated projection, duals, certificates
    power         the projected power iterations and stopping rules
    initializers  random and spectral starting points
    metrics       agreement between clusterings up to relabeling
    graphio       edge-list / MatrixMarket loading
    bench         phase grids, convergence traces, real-graph harness
"""

from .assignment import (
    ProjectionResult,
    brute_force_project,
    project,
    project_k2,
    verify_certificate,
)
from .bench import (
    GridCellRecord,
    GridSpec,
    RealRunResult,
    run_convergence,
    run_phase_grid,
    run_real,
    write_convergence_csv,
    write_grid_csv,
    write_real_csv,
)
from .graphio import GraphParseError, RealGraph, load_graph, remove_small_communities
from .initializers import SpectralInfo, random_init, spectral_init
from .metrics import Alignment, align, confusion_matrix, exact_recovery
from .power import (
    RunConfig,
    RunResult,
    default_iteration_cap,
    mle_objective,
    power_step,
    run,
    score,
    theorem_budget,
)
from .sbm import (
    Clustering,
    SbmParams,
    logarithmic_rates,
    planted_truth,
    sample_graph,
)

__version__ = "0.1.0"

__all__ = [
    "Alignment",
    "Clustering",
    "GraphParseError",
    "GridCellRecord",
    "GridSpec",
    "ProjectionResult",
    "RealGraph",
    "RealRunResult",
    "RunConfig",
    "RunResult",
    "SbmParams",
    "SpectralInfo",
    "align",
    "brute_force_project",
    "confusion_matrix",
    "default_iteration_cap",
    "exact_recovery",
    "load_graph",
    "logarithmic_rates",
    "mle_objective",
    "planted_truth",
    "power_step",
    "project",
    "project_k2",
    "random_init",
    "remove_small_communities",
    "run",
    "run_convergence",
    "run_phase_grid",
    "run_real",
    "sample_graph",
    "score",
    "spectral_init",
    "theorem_budget",
    "verify_certificate",
    "write_convergence_csv",
    "write_grid_csv",
    "write_real_csv",
    "__version__",
]
