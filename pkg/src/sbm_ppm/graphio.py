"""Reading real graphs and label files.

Two input formats: a whitespace-separated edge list ('#' or '%' comment
lines) and MatrixMarket coordinate files. Either way the result is an
undirected simple 0/1 adjacency: duplicate edges are collapsed, the matrix
is symmetrized, and self-loops are dropped unless requested otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse

from .sbm import Clustering


class GraphParseError(ValueError):
    """A malformed input file; message carries the path and line number."""

    def __init__(self, path, line_number, message):
        super().__init__(f"{path}:{line_number}: {message}")
        self.path = str(path)
        self.line_number = line_number


@dataclass(frozen=True)
class RealGraph:
    """Adjacency plus optional ground-truth labels for a named graph."""

    adjacency: sparse.csr_array
    labels: Clustering | None
    name: str

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @cached_property
    def capacities(self) -> np.ndarray | None:
        return None if self.labels is None else self.labels.capacities


def _data_lines(path):
    with open(path, "rt", encoding="utf-8") as handle:
        for number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#") or line.startswith("%"):
                continue
            yield number, line


def _parse_edge_list(path) -> np.ndarray:
    """Pairs of raw integer vertex ids, one edge per line (extra columns ignored)."""
    edges = []
    for number, line in _data_lines(path):
        parts = line.split()
        if len(parts) < 2:
            raise GraphParseError(path, number, "expected at least two columns")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise GraphParseError(path, number, f"non-integer vertex id in {line!r}") from None
    if not edges:
        raise GraphParseError(path, 0, "no edges found")
    return np.asarray(edges, dtype=np.int64)


def _parse_matrix_market(path) -> tuple[int, np.ndarray]:
    """(n, edge id pairs) from a MatrixMarket coordinate file (1-based ids)."""
    with open(path, "rt", encoding="utf-8") as handle:
        header = handle.readline()
        if not header.lower().startswith("%%matrixmarket"):
            raise GraphParseError(path, 1, "missing MatrixMarket header")
        fields = header.lower().split()
        if "coordinate" not in fields:
            raise GraphParseError(path, 1, "only coordinate format is supported")
        pattern = "pattern" in fields

        number = 1
        dims = None
        edges = []
        for raw in handle:
            number += 1
            line = raw.strip()
            if not line or line.startswith("%"):
                continue
            parts = line.split()
            if dims is None:
                if len(parts) != 3:
                    raise GraphParseError(path, number, "expected 'rows cols nnz'")
                rows, cols, _ = (int(p) for p in parts)
                if rows != cols:
                    raise GraphParseError(path, number, "adjacency must be square")
                dims = rows
                continue
            if len(parts) < 2 or (not pattern and len(parts) < 3):
                raise GraphParseError(path, number, "truncated coordinate entry")
            try:
                i, j = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphParseError(path, number, f"non-integer index in {line!r}") from None
            if not 1 <= i <= dims or not 1 <= j <= dims:
                raise GraphParseError(path, number, "index out of range")
            if not pattern and float(parts[2]) == 0.0:
                continue
            edges.append((i, j))
        if dims is None:
            raise GraphParseError(path, number, "missing dimensions line")
    if not edges:
        raise GraphParseError(path, 0, "no entries found")
    return dims, np.asarray(edges, dtype=np.int64)


def _read_label_file(path) -> np.ndarray:
    values = []
    for number, line in _data_lines(path):
        parts = line.split()
        if len(parts) != 1:
            raise GraphParseError(path, number, "expected one label per line")
        try:
            values.append(int(parts[0]))
        except ValueError:
            raise GraphParseError(path, number, f"non-integer label {parts[0]!r}") from None
    if not values:
        raise GraphParseError(path, 0, "no labels found")
    return np.asarray(values, dtype=np.int64)


def _labels_to_clustering(raw: np.ndarray) -> Clustering:
    # arbitrary distinct integers allowed; 0- and 1-based files both map to 0-based
    distinct = np.unique(raw)
    remapped = np.searchsorted(distinct, raw)
    return Clustering(remapped, distinct.size)


def _build_adjacency(n: int, pairs: np.ndarray, drop_self_loops: bool) -> sparse.csr_array:
    i, j = pairs[:, 0], pairs[:, 1]
    if drop_self_loops:
        off = i != j
        i, j = i[off], j[off]
    loops = i == j
    sym_i = np.concatenate([i, j[~loops]])
    sym_j = np.concatenate([j, i[~loops]])
    data = np.ones(sym_i.size, dtype=np.int64)
    adj = sparse.coo_array((data, (sym_i, sym_j)), shape=(n, n)).tocsr()
    adj.data[:] = 1  # collapse duplicate edges
    return adj


def load_graph(
    path,
    fmt: str | None = None,
    labels_path=None,
    *,
    drop_self_loops: bool = True,
    min_community_size: int | None = None,
    name: str | None = None,
) -> RealGraph:
    """Load an undirected graph and optional per-vertex community labels.

    Args:
        path: edge list or MatrixMarket file.
        fmt: "edgelist" or "mtx"; inferred from the extension when None.
        labels_path: text file with one integer label per line, aligned with
            vertex order; required for min_community_size.
        drop_self_loops: remove diagonal entries (default true for real data).
        min_community_size: drop every vertex whose community has fewer
            members than this, then relabel the survivors contiguously.

    Edge-list vertex ids are 1-based when the smallest id is >= 1, else
    0-based. Vertices beyond the largest id in the file but covered by the
    label file are kept as isolated vertices.
    """
    path = Path(path)
    if fmt is None:
        fmt = "mtx" if path.suffix.lower() in (".mtx", ".mm") else "edgelist"
    if fmt not in ("edgelist", "mtx"):
        raise ValueError(f"unknown graph format: {fmt!r}")

    if fmt == "mtx":
        n, raw = _parse_matrix_market(path)
        pairs = raw - 1
    else:
        raw = _parse_edge_list(path)
        offset = 1 if raw.min() >= 1 else 0
        pairs = raw - offset
        n = int(pairs.max()) + 1

    labels = None
    if labels_path is not None:
        values = _read_label_file(labels_path)
        if values.size < n:
            raise ValueError(
                f"label/graph size mismatch: {values.size} labels for {n} vertices"
            )
        n = max(n, values.size)
        labels = _labels_to_clustering(values)

    adjacency = _build_adjacency(n, pairs, drop_self_loops)
    graph = RealGraph(adjacency, labels, name or path.stem)

    if min_community_size is not None:
        graph = remove_small_communities(graph, min_community_size)
    return graph


def remove_small_communities(graph: RealGraph, min_size: int) -> RealGraph:
    """Drop vertices in communities smaller than min_size; relabel the rest."""
    if graph.labels is None:
        raise ValueError("community removal requires labels")
    sizes = graph.labels.capacities
    keep_groups = np.flatnonzero(sizes >= min_size)
    if keep_groups.size == sizes.size:
        return graph
    if keep_groups.size == 0:
        raise ValueError("min_size removes every community")
    keep_mask = np.isin(graph.labels.labels, keep_groups)
    idx = np.flatnonzero(keep_mask)
    sub = graph.adjacency[idx][:, idx]
    old_to_new = np.searchsorted(keep_groups, graph.labels.labels[idx])
    labels = Clustering(old_to_new, keep_groups.size)
    return RealGraph(sparse.csr_array(sub), labels, graph.name)
