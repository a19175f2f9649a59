"""Command line interface.

Subcommands: grid (phase diagram over (alpha, beta)), converge (per-iteration
distance traces), real (community recovery on a graph file), project
(one-shot projection of a score matrix, for debugging), plot (render a grid
or convergence CSV to an image).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .assignment import project
from .bench import (
    FULL_GRID,
    GridSpec,
    run_convergence,
    run_phase_grid,
    run_real,
    write_convergence_csv,
    write_grid_csv,
    write_real_csv,
)
from .graphio import load_graph


def _parse_range(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("range must be start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}") from None
    return start, stop, step


def _parse_capacities(text: str) -> list[int]:
    try:
        return [int(p) for p in text.split(",") if p != ""]
    except ValueError:
        raise argparse.ArgumentTypeError("capacities must be comma-separated integers") from None


def _add_grid_parser(sub):
    p = sub.add_parser("grid", help="success-rate phase grid over (alpha, beta)")
    p.add_argument("--n", type=int, default=300)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--alpha-range", type=_parse_range, default=None, metavar="A0:A1:STEP")
    p.add_argument("--beta-range", type=_parse_range, default=None, metavar="B0:B1:STEP")
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("spectral", "random"), default="spectral")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--stopping", choices=("budget", "cycle"), default="cycle")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-self-loops", action="store_true")
    p.add_argument("--full", action="store_true",
                   help="fine grid: alpha step 0.5, beta step 0.4, 40 trials")
    p.add_argument("--out", default="grid.csv")


def _add_converge_parser(sub):
    p = sub.add_parser("converge", help="per-iteration distance to planted truth")
    p.add_argument("--n", type=int, default=6000)
    p.add_argument("--k", type=int, default=4)
    p.add_argument("--alpha", type=float, default=18.0)
    p.add_argument("--beta", type=float, default=4.0)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--init", choices=("random", "spectral"), default="random")
    p.add_argument("--max-iters", type=int, default=None)
    p.add_argument("--no-self-loops", action="store_true")
    p.add_argument("--out", default="converge.csv")


def _add_real_parser(sub):
    p = sub.add_parser("real", help="recover communities in a graph file")
    p.add_argument("graph", help="edge list or MatrixMarket file")
    p.add_argument("--format", choices=("edgelist", "mtx"), default=None)
    p.add_argument("--labels", default=None, help="one integer label per line")
    p.add_argument("--min-community", type=int, default=None,
                   help="drop communities smaller than this before running")
    p.add_argument("--capacities", type=_parse_capacities, default=None)
    p.add_argument("--repeats", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=1000)
    p.add_argument("--keep-self-loops", action="store_true")
    p.add_argument("--out", default=None, help="also write a summary CSV")


def _add_project_parser(sub):
    p = sub.add_parser("project", help="project a score matrix (debugging)")
    p.add_argument("scores", help="matrix file: .npy, or text rows (csv/whitespace)")
    p.add_argument("--capacities", type=_parse_capacities, required=True)
    p.add_argument("--out", default=None, help="write labels, one per line")


def _add_plot_parser(sub):
    p = sub.add_parser("plot", help="render a grid or convergence CSV")
    p.add_argument("csv", help="file produced by the grid or converge subcommand")
    p.add_argument("--out", default=None, help="image path (default: <csv>.svg)")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="sbm-ppm",
        description="Community recovery in stochastic block models by projected power iterations",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    _add_grid_parser(sub)
    _add_converge_parser(sub)
    _add_real_parser(sub)
    _add_project_parser(sub)
    _add_plot_parser(sub)
    args = parser.parse_args(argv)
    handler = {
        "grid": _cmd_grid,
        "converge": _cmd_converge,
        "real": _cmd_real,
        "project": _cmd_project,
        "plot": _cmd_plot,
    }[args.command]
    return handler(args)


def _cmd_grid(args) -> int:
    base = FULL_GRID if args.full else GridSpec()
    spec = GridSpec(
        n=args.n,
        K=args.k,
        alpha_range=args.alpha_range or base.alpha_range,
        beta_range=args.beta_range or base.beta_range,
        trials=args.trials if args.trials is not None else base.trials,
        base_seed=args.seed,
        init=args.init,
        stopping=args.stopping,
        max_iterations=args.max_iters,
        self_loops=not args.no_self_loops,
    )
    cells = spec.alphas().size * spec.betas().size
    print(f"grid: {cells} cells x {spec.trials} trials, n={spec.n}, K={spec.K}")
    records = write_grid_csv(run_phase_grid(spec, args.workers), args.out)
    failures = [r for r in records if r.error]
    print(f"wrote {args.out} ({len(records)} rows, {len(failures)} failed cells)")
    return 0


def _cmd_converge(args) -> int:
    runs = run_convergence(
        n=args.n,
        K=args.k,
        alpha=args.alpha,
        beta=args.beta,
        repeats=args.repeats,
        base_seed=args.seed,
        init=args.init,
        max_iterations=args.max_iters,
        self_loops=not args.no_self_loops,
    )
    write_convergence_csv(runs, args.out)
    converged = sum(r.converged for r in runs)
    print(f"{converged}/{len(runs)} runs reached the planted truth")
    for entry in runs:
        tail = "converged" if entry.converged else "stopped"
        print(f"  run {entry.run_id}: {tail} after {entry.iterations_used} iterations")
    print(f"wrote {args.out}")
    return 0


def _cmd_real(args) -> int:
    graph = load_graph(
        args.graph,
        fmt=args.format,
        labels_path=args.labels,
        drop_self_loops=not args.keep_self_loops,
        min_community_size=args.min_community,
    )
    k_note = "no labels" if graph.labels is None else f"K={graph.labels.n_groups}"
    print(f"{graph.name}: n={graph.n}, nnz={graph.adjacency.nnz}, {k_note}")
    result = run_real(
        graph,
        capacities=args.capacities,
        repeats=args.repeats,
        base_seed=args.seed,
        max_iterations=args.max_iters,
    )
    print(f"best objective {result.best_objective} (run {result.best_run}), "
          f"mean iterations {result.mean_iterations:.1f}")
    if result.misclassified is not None:
        print(f"misclassified vertices: {result.misclassified}")
    if args.out:
        write_real_csv([result], args.out)
        print(f"wrote {args.out}")
    return 0


def _load_matrix(path: str) -> np.ndarray:
    if path.endswith(".npy"):
        return np.load(path)
    with open(path, "rt", encoding="utf-8") as handle:
        sample = handle.read(4096)
    delimiter = "," if "," in sample.splitlines()[0] else None
    return np.loadtxt(path, delimiter=delimiter, ndmin=2)


def _cmd_project(args) -> int:
    scores = _load_matrix(args.scores)
    result = project(scores, args.capacities)
    labels = result.clustering.labels
    print(f"objective: {result.objective}")
    print("labels:", ",".join(str(v) for v in labels))
    print("dual:", ",".join(format(v, ".6g") for v in result.dual))
    if args.out:
        Path(args.out).write_text("\n".join(str(v) for v in labels) + "\n", encoding="utf-8")
        print(f"wrote {args.out}")
    return 0


def _cmd_plot(args) -> int:
    try:
        import matplotlib
    except ImportError:
        print("matplotlib is required for plotting: pip install matplotlib", file=sys.stderr)
        return 1
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out = args.out or str(Path(args.csv).with_suffix(".svg"))
    with open(args.csv, "rt", encoding="utf-8") as handle:
        header = handle.readline().strip().split(",")

    if "alpha" in header and "beta" in header:
        _plot_grid(plt, args.csv, out)
    elif "run_id" in header:
        _plot_convergence(plt, args.csv, out)
    else:
        print(f"unrecognized CSV header in {args.csv}", file=sys.stderr)
        return 1
    print(f"wrote {out}")
    return 0


def _plot_grid(plt, csv_path, out) -> None:
    import csv as csvmod

    rows = []
    with open(csv_path, newline="", encoding="utf-8") as handle:
        for row in csvmod.DictReader(handle):
            if row["error"]:
                continue
            rows.append((float(row["alpha"]), float(row["beta"]),
                         float(row["success_rate"]), int(row["K"])))
    alphas = sorted({r[0] for r in rows})
    betas = sorted({r[1] for r in rows})
    K = rows[0][3]
    grid = np.full((len(alphas), len(betas)), np.nan)
    a_idx = {a: i for i, a in enumerate(alphas)}
    b_idx = {b: j for j, b in enumerate(betas)}
    for a, b, rate, _ in rows:
        grid[a_idx[a], b_idx[b]] = rate

    fig, ax = plt.subplots(figsize=(7, 5))
    mesh = ax.pcolormesh(betas, alphas, grid, cmap="gray", vmin=0.0, vmax=1.0, shading="nearest")
    fig.colorbar(mesh, ax=ax, label="exact recovery rate")
    curve_b = np.linspace(min(betas), max(betas), 200)
    curve_a = (np.sqrt(curve_b) + np.sqrt(K)) ** 2
    keep = (curve_a >= min(alphas)) & (curve_a <= max(alphas))
    ax.plot(curve_b[keep], curve_a[keep], "r-", linewidth=2,
            label=r"$\sqrt{\alpha}-\sqrt{\beta}=\sqrt{K}$")
    ax.set_xlabel("beta")
    ax.set_ylabel("alpha")
    ax.set_title("exact recovery phase diagram")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


def _plot_convergence(plt, csv_path, out) -> None:
    import csv as csvmod

    traces: dict[int, list[tuple[int, float]]] = {}
    with open(csv_path, newline="", encoding="utf-8") as handle:
        for row in csvmod.DictReader(handle):
            traces.setdefault(int(row["run_id"]), []).append(
                (int(row["iteration"]), float(row["frobenius_distance_to_truth"]))
            )
    fig, ax = plt.subplots(figsize=(7, 5))
    for run_id, points in sorted(traces.items()):
        points.sort()
        ax.plot([p[0] for p in points], [p[1] for p in points], label=f"run {run_id}")
    ax.set_xlabel("iteration")
    ax.set_ylabel("Frobenius distance to truth")
    ax.set_title("convergence of projected power iterations")
    if len(traces) <= 12:
        ax.legend(fontsize="small")
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)


if __name__ == "__main__":
    raise SystemExit(main())
