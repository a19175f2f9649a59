"""Agreement between two clusterings up to relabeling of the groups."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .sbm import Clustering


@dataclass(frozen=True)
class Alignment:
    """Best group matching between a candidate and a reference clustering.

    permutation[k] is the reference group matched to candidate group k;
    mismatches counts items left disagreeing under that matching; frobenius
    is the matched Frobenius distance sqrt(2 * mismatches) between the
    membership matrices.
    """

    permutation: np.ndarray
    mismatches: int
    frobenius: float


def confusion_matrix(candidate: Clustering, reference: Clustering) -> np.ndarray:
    """K x K counts N[k, l] = |candidate group k intersect reference group l|."""
    if candidate.n != reference.n:
        raise ValueError("clusterings have different sizes")
    if candidate.n_groups != reference.n_groups:
        raise ValueError("clusterings have different group counts")
    K = candidate.n_groups
    flat = candidate.labels * K + reference.labels
    return np.bincount(flat, minlength=K * K).reshape(K, K)


def align(candidate: Clustering, reference: Clustering) -> Alignment:
    """Match groups by maximum total agreement (Hungarian on the confusion matrix)."""
    N = confusion_matrix(candidate, reference)
    rows, cols = linear_sum_assignment(N, maximize=True)
    permutation = np.empty(candidate.n_groups, dtype=np.int64)
    permutation[rows] = cols
    agreement = int(N[rows, cols].sum())
    mismatches = candidate.n - agreement
    return Alignment(permutation, mismatches, math.sqrt(2.0 * mismatches))


def exact_recovery(candidate: Clustering, reference: Clustering) -> bool:
    """True when the clusterings are identical up to a group relabeling."""
    return align(candidate, reference).mismatches == 0
