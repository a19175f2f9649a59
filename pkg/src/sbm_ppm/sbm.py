"""Symmetric stochastic block model: parameters, planted truth, graph sampling.

The model has n vertices split into K equal communities of size m = n/K.
Edges appear independently with probability p inside a community and q
across, in the logarithmic regime p = alpha*ln(n)/n, q = beta*ln(n)/n.
Exact recovery is information-theoretically possible above the threshold
sqrt(alpha) - sqrt(beta) > sqrt(K).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import sparse

SeedLike = int | np.random.SeedSequence | np.random.Generator


def _rng(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class Clustering:
    """A hard assignment of n items to groups 0..n_groups-1.

    Equivalent to the n x K matrix with exactly one 1 per row; group sizes
    are free unless a caller imposes capacities.
    """

    labels: np.ndarray
    n_groups: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if self.n_groups < 1:
            raise ValueError("n_groups must be positive")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_groups):
            raise ValueError("labels out of range [0, n_groups)")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    @cached_property
    def capacities(self) -> np.ndarray:
        """Group sizes as a length-n_groups vector (sums to n)."""
        sizes = np.bincount(self.labels, minlength=self.n_groups)
        sizes.flags.writeable = False
        return sizes

    def to_matrix(self, dtype=np.float64) -> np.ndarray:
        """Dense n x n_groups 0/1 membership matrix."""
        out = np.zeros((self.n, self.n_groups), dtype=dtype)
        out[np.arange(self.n), self.labels] = 1
        return out

    def relabel(self, permutation: np.ndarray) -> "Clustering":
        """Apply a group permutation: new label of item i is permutation[labels[i]]."""
        perm = np.asarray(permutation, dtype=np.int64)
        if sorted(perm.tolist()) != list(range(self.n_groups)):
            raise ValueError("permutation must be a bijection on groups")
        return Clustering(perm[self.labels], self.n_groups)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Clustering):
            return NotImplemented
        return self.n_groups == other.n_groups and np.array_equal(self.labels, other.labels)

    def __repr__(self) -> str:
        return f"Clustering(n={self.n}, n_groups={self.n_groups})"


def logarithmic_rates(alpha: float, beta: float, n: int) -> tuple[float, float]:
    """Edge probabilities (p, q) = (alpha*ln(n)/n, beta*ln(n)/n), clamped to [0, 1].

    Natural logarithm. alpha and beta must be non-negative and n >= 2.
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    if alpha < 0 or beta < 0:
        raise ValueError("alpha and beta must be non-negative")
    scale = math.log(n) / n
    return min(1.0, alpha * scale), min(1.0, beta * scale)


@dataclass(frozen=True)
class SbmParams:
    """Model parameters. p and q are the actual edge probabilities used."""

    n: int
    K: int
    alpha: float
    beta: float
    p: float
    q: float

    def __post_init__(self):
        if self.n < 2 or self.K < 2:
            raise ValueError("need n >= 2 and K >= 2")
        for rate in (self.p, self.q):
            if not 0.0 <= rate <= 1.0:
                raise ValueError("p and q must lie in [0, 1]")

    @classmethod
    def logarithmic(cls, n: int, K: int, alpha: float, beta: float) -> "SbmParams":
        """Build parameters in the logarithmic regime from (alpha, beta)."""
        p, q = logarithmic_rates(alpha, beta, n)
        return cls(n=n, K=K, alpha=alpha, beta=beta, p=p, q=q)

    @property
    def community_size(self) -> int:
        if self.n % self.K:
            raise ValueError("n is not divisible by K")
        return self.n // self.K

    @property
    def threshold_margin(self) -> float:
        """sqrt(alpha) - sqrt(beta) - sqrt(K); positive above the recovery threshold."""
        return math.sqrt(self.alpha) - math.sqrt(self.beta) - math.sqrt(self.K)


def planted_truth(n: int, K: int, seed: SeedLike = 0, *, permute: bool = True) -> Clustering:
    """Balanced ground-truth clustering: K blocks of size n/K.

    Vertices are assigned in contiguous blocks and then shuffled by a seeded
    random permutation; permute=False keeps the block layout.
    """
    if K < 2:
        raise ValueError("K must be at least 2")
    if n % K:
        raise ValueError("n must be divisible by K for the balanced model")
    block = np.repeat(np.arange(K, dtype=np.int64), n // K)
    if not permute:
        return Clustering(block, K)
    perm = _rng(seed).permutation(n)
    labels = np.empty(n, dtype=np.int64)
    labels[perm] = block
    return Clustering(labels, K)


def _uniform_subset(rng: np.random.Generator, total: int, count: int) -> np.ndarray:
    """count distinct integers from [0, total), uniform over subsets."""
    if count >= total:
        return np.arange(total, dtype=np.int64)
    if count > total // 3:
        return rng.permutation(total)[:count].astype(np.int64)
    # sparse regime: oversample with replacement, keep first occurrences
    # (draw order is exchangeable, so the first `count` distinct are uniform)
    seen = np.empty(0, dtype=np.int64)
    need = count
    while True:
        extra = rng.integers(0, total, size=int(need * 1.3) + 16, dtype=np.int64)
        seen = np.concatenate([seen, extra])
        _, first = np.unique(seen, return_index=True)
        in_order = seen[np.sort(first)]
        if in_order.size >= count:
            return in_order[:count]
        need = count - in_order.size


def _decode_triangular(flat: np.ndarray, size: int, include_diagonal: bool) -> tuple[np.ndarray, np.ndarray]:
    """Map flat indices to (i, j) pairs with i <= j (or i < j) in a size x size block."""
    if include_diagonal:
        # row i starts at offset i*size - i*(i-1)/2
        rows = np.arange(size + 1, dtype=np.int64)
        starts = rows * size - rows * (rows - 1) // 2
        i = np.searchsorted(starts, flat, side="right") - 1
        j = flat - starts[i] + i
    else:
        rows = np.arange(size + 1, dtype=np.int64)
        starts = rows * size - rows * (rows + 1) // 2
        i = np.searchsorted(starts, flat, side="right") - 1
        j = flat - starts[i] + i + 1
    return i, j


def _sample_block_pairs(rng, members_a, members_b, prob, self_loops):
    """Bernoulli(prob) over unordered pairs of one block (a is b) or across two blocks."""
    out_i, out_j = [], []
    if members_a is members_b:
        s = members_a.size
        total = s * (s + 1) // 2 if self_loops else s * (s - 1) // 2
        if total > 0 and prob > 0:
            count = rng.binomial(total, prob)
            if count:
                flat = _uniform_subset(rng, total, int(count))
                i, j = _decode_triangular(flat, s, self_loops)
                out_i.append(members_a[i])
                out_j.append(members_a[j])
    else:
        total = members_a.size * members_b.size
        if total > 0 and prob > 0:
            count = rng.binomial(total, prob)
            if count:
                flat = _uniform_subset(rng, total, int(count))
                out_i.append(members_a[flat // members_b.size])
                out_j.append(members_b[flat % members_b.size])
    return out_i, out_j


def sample_graph(
    params: SbmParams,
    truth: Clustering,
    seed: SeedLike = 0,
    *,
    self_loops: bool = True,
) -> sparse.csr_array:
    """Sample a symmetric 0/1 adjacency matrix from the block model.

    Every unordered pair 1 <= i <= j <= n is an independent Bernoulli draw:
    probability p when truth places i and j in the same community, else q.
    The diagonal is included (Bernoulli(p)) unless self_loops=False. The
    result is an n x n scipy CSR array with int64 entries, exactly symmetric.
    """
    if truth.n != params.n:
        raise ValueError("truth size does not match params.n")
    if truth.n_groups != params.K:
        raise ValueError("truth group count does not match params.K")
    rng = _rng(seed)
    n, K = params.n, params.K
    members = [np.flatnonzero(truth.labels == k).astype(np.int64) for k in range(K)]

    rows, cols = [], []
    for a in range(K):
        for b in range(a, K):
            prob = params.p if a == b else params.q
            block_a = members[a]
            block_b = block_a if a == b else members[b]
            i_parts, j_parts = _sample_block_pairs(rng, block_a, block_b, prob, self_loops)
            rows.extend(i_parts)
            cols.extend(j_parts)

    if rows:
        i = np.concatenate(rows)
        j = np.concatenate(cols)
    else:
        i = np.empty(0, dtype=np.int64)
        j = np.empty(0, dtype=np.int64)

    off = i != j
    sym_i = np.concatenate([i, j[off]])
    sym_j = np.concatenate([j, i[off]])
    data = np.ones(sym_i.size, dtype=np.int64)
    adj = sparse.coo_array((data, (sym_i, sym_j)), shape=(n, n)).tocsr()
    return adj
