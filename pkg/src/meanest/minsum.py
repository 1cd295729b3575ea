"""Order-statistics aggregation: truncated distance sums and recursive splitting.

``compute_winner`` scores every candidate by the summed distance to its
``ceil(0.7 |P|)`` nearest candidates (itself included, at distance 0) and
returns the lowest scorer. ``minsum_select`` splits the candidates into about
``sqrt(|P|)`` contiguous clusters, picks a winner in each (recursively), and
runs ``compute_winner`` over the cluster winners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import DomainError, _select_inplace, as_points
from .sampling import CandidateMeans, EstimatorConfig


@njit(cache=True)
def _truncated_count(n):
    # ceil(7n / 10) in exact integer arithmetic
    return (7 * n + 9) // 10


@njit(cache=True)
def _scores(P, lo, hi):
    n = hi - lo
    d = P.shape[1]
    t = _truncated_count(n)
    D = np.empty(n)
    row = np.empty(n)
    buf = np.empty(n)
    for j in range(n):
        for i in range(n):
            acc = 0.0
            for k in range(d):
                diff = P[lo + j, k] - P[lo + i, k]
                acc += diff * diff
            row[i] = np.sqrt(acc)
            buf[i] = row[i]
        kth = _select_inplace(buf, t - 1)
        # ties at the cutoff distance count only as often as needed to reach t
        total = 0.0
        below = 0
        for i in range(n):
            if row[i] < kth:
                total += row[i]
                below += 1
        D[j] = total + (t - below) * kth
    return D


@njit(cache=True)
def _argmin_first(D):
    best = 0
    for j in range(1, D.shape[0]):
        if D[j] < D[best]:
            best = j
    return best


@njit(cache=True)
def _winner(P, lo, hi):
    return lo + _argmin_first(_scores(P, lo, hi))


@njit(cache=True)
def _cluster_winners(P, bounds):
    k = bounds.shape[0] - 1
    out = np.empty(k, dtype=np.int64)
    for c in range(k):
        out[c] = _winner(P, bounds[c], bounds[c + 1])
    return out


@dataclass(frozen=True)
class WinnerScore:
    index: int
    D: float
    t: int


def _points(P) -> np.ndarray:
    X = P.means if isinstance(P, CandidateMeans) else as_points(P)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise DomainError("no candidate points")
    return X


def truncated_count(n: int) -> int:
    return int(_truncated_count(n))


def winner_scores(P) -> np.ndarray:
    """Truncated distance sum ``D_j`` of every candidate."""
    X = _points(P)
    return _scores(X, 0, X.shape[0])


def compute_winner(P, return_score: bool = False):
    """The candidate with the smallest truncated distance sum; ties go to the lowest index."""
    X = _points(P)
    D = _scores(X, 0, X.shape[0])
    j = int(_argmin_first(D))
    if return_score:
        return X[j].copy(), WinnerScore(index=j, D=float(D[j]), t=truncated_count(X.shape[0]))
    return X[j].copy()


def num_clusters(n: int, exponent: float = 0.5) -> int:
    if exponent == 0.5:
        k = math.isqrt(n)
        k += k * k < n
    else:
        x = n**exponent
        k = math.ceil(x - 1e-9 * x)
    return min(n, max(1, k))


def split_bounds(n: int, k: int) -> np.ndarray:
    """Boundaries of ``k`` contiguous blocks of ``range(n)`` whose sizes differ by at most one."""
    q, r = divmod(n, k)
    sizes = np.full(k, q, dtype=np.int64)
    sizes[:r] += 1
    return np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)


def _select_index(X: np.ndarray, lo: int, hi: int, depth: int, exponent: float) -> int:
    n = hi - lo
    if depth == 0 or n == 1:
        return int(_winner(X, lo, hi))
    bounds = lo + split_bounds(n, num_clusters(n, exponent))
    if depth == 1:
        idx = _cluster_winners(X, bounds)
    else:
        idx = np.array(
            [_select_index(X, int(a), int(b), depth - 1, exponent) for a, b in zip(bounds[:-1], bounds[1:])],
            dtype=np.int64,
        )
    W = np.ascontiguousarray(X[idx])
    return int(idx[_winner(W, 0, W.shape[0])])


def minsum_select_index(P, depth: int, cluster_exponent: float = 0.5) -> int:
    """Index into ``P`` of the point ``minsum_select`` returns."""
    if depth < 0:
        raise DomainError(f"recursion depth must be nonnegative, got {depth}")
    X = _points(P)
    return _select_index(X, 0, X.shape[0], int(depth), cluster_exponent)


def minsum_select(P, depth: int, cluster_exponent: float = 0.5) -> np.ndarray:
    """Recursive winner selection; the result is always one of the input points."""
    X = _points(P)
    return X[minsum_select_index(X, depth, cluster_exponent)].copy()


def minsum_estimate(P: CandidateMeans, cfg: EstimatorConfig) -> np.ndarray:
    return minsum_select(P, cfg.depth_i, cfg.cluster_exponent)
