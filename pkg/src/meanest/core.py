"""Point sets, exact cost oracles, and the selection primitives shared by the aggregators.

All arrays are float64. A ``PointSet`` owns a read-only ``(n, d)`` array, so one
instance can be handed to any number of concurrent trials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit


class DomainError(ValueError):
    """Raised when an input violates an operation's precondition."""


@dataclass(frozen=True, eq=False)
class PointSet:
    """The ground set: ``n`` points in ``R^d`` stored row-major."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=np.float64, order="C", copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise DomainError(f"points must be a 2-D array, got shape {pts.shape}")
        if pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DomainError(f"point set must have n >= 1 and d >= 1, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("point coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def __repr__(self):
        return f"PointSet(n={self.n}, d={self.d})"


@dataclass(frozen=True)
class CostOracle:
    """Exact mean, optimal cost and size of a ground set."""

    mean: np.ndarray
    opt: float
    n: int

    def __post_init__(self):
        mu = np.array(self.mean, dtype=np.float64).reshape(-1)
        mu.setflags(write=False)
        object.__setattr__(self, "mean", mu)
        if not self.opt >= 0:
            raise DomainError(f"opt must be nonnegative, got {self.opt}")
        if self.n < 1:
            raise DomainError(f"n must be positive, got {self.n}")

    @classmethod
    def from_points(cls, A: PointSet) -> "CostOracle":
        mu = mean(A)
        return cls(mean=mu, opt=cost(A, mu), n=A.n)

    @property
    def radius(self) -> float:
        """Distance to the mean that separates (1+eps)-approximations, per unit eps: sqrt(OPT/n)."""
        return math.sqrt(self.opt / self.n)


def as_points(A) -> np.ndarray:
    """Return the ``(n, d)`` float64 array behind a PointSet or array-like."""
    if isinstance(A, PointSet):
        return A.points
    X = np.asarray(A, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return X


def _as_center(c, d: int) -> np.ndarray:
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    if c.shape[0] != d:
        raise DomainError(f"center has dimension {c.shape[0]}, point set has dimension {d}")
    return c


# -- summation ---------------------------------------------------------------

def pairwise_sum(x, axis: int = 0) -> np.ndarray:
    """Tree-sum ``x`` along ``axis``.

    Each pass adds adjacent pairs, so rounding error grows like ``log n``
    instead of ``n``. An odd trailing slice is carried to the next pass.
    """
    x = np.moveaxis(np.asarray(x, dtype=np.float64), axis, 0)
    if x.shape[0] == 0:
        raise DomainError("cannot sum an empty axis")
    while x.shape[0] > 1:
        if x.shape[0] % 2:
            x = np.concatenate([x[0:-1:2] + x[1::2], x[-1:]])
        else:
            x = x[0::2] + x[1::2]
    return x[0]


def mean(A) -> np.ndarray:
    """Coordinate-wise average of a nonempty point set."""
    X = as_points(A)
    if X.shape[0] == 0:
        raise DomainError("mean of an empty point set")
    return pairwise_sum(X, axis=0) / X.shape[0]


def batch_means(X: np.ndarray) -> np.ndarray:
    """Means of ``X[..., s, d]`` over the batch axis ``s``; same summation as ``mean``."""
    X = np.asarray(X, dtype=np.float64)
    return pairwise_sum(X, axis=-2) / X.shape[-2]


def squared_distances(X: np.ndarray, c: np.ndarray) -> np.ndarray:
    diff = X - c
    return np.einsum("ij,ij->i", diff, diff)


def cost(A, c) -> float:
    """Sum of squared Euclidean distances from the points of ``A`` to ``c``."""
    X = as_points(A)
    if X.shape[0] == 0:
        raise DomainError("cost of an empty point set")
    c = _as_center(c, X.shape[1])
    return float(pairwise_sum(squared_distances(X, c)))


def decomposition_check(A, c) -> tuple[float, float]:
    """Both sides of cost(A, c) = cost(A, mu) + n * |mu - c|^2."""
    X = as_points(A)
    c = _as_center(c, X.shape[1])
    mu = mean(X)
    lhs = cost(X, c)
    gap = mu - c
    rhs = cost(X, mu) + X.shape[0] * float(gap @ gap)
    return lhs, rhs


# Relative width of the band around the approximation boundary that counts as
# a failure; the lower-bound instances put estimates exactly on the boundary.
_BOUNDARY_RTOL = 1e-12


def eps_threshold(oracle: CostOracle, eps: float) -> float:
    """Largest admissible squared distance to the mean: eps * OPT / n."""
    return eps * oracle.opt / oracle.n


def is_eps_approx(oracle: CostOracle, c, eps: float) -> bool:
    """True iff ``c`` is strictly better than the (1+eps)-approximation boundary.

    Hitting the boundary exactly (cost == (1+eps) * OPT) counts as a failure. A
    point equal to the mean always succeeds, including when OPT is zero.
    """
    if not eps > 0:
        raise DomainError(f"eps must be positive, got {eps}")
    c = _as_center(c, oracle.mean.shape[0])
    gap = c - oracle.mean
    dist2 = float(gap @ gap)
    floor = (1e-12 * (1.0 + float(np.max(np.abs(oracle.mean))))) ** 2
    if dist2 <= floor:
        return True
    return dist2 < eps_threshold(oracle, eps) * (1.0 - _BOUNDARY_RTOL)


def approx_ratio(oracle: CostOracle, c) -> float:
    """cost(A, c) / OPT, evaluated through the mean-variance decomposition."""
    c = _as_center(c, oracle.mean.shape[0])
    gap = c - oracle.mean
    excess = oracle.n * float(gap @ gap)
    if oracle.opt == 0:
        return 1.0 if excess == 0 else math.inf
    return 1.0 + excess / oracle.opt


# -- selection ---------------------------------------------------------------

_SMALL = 16


@njit(cache=True)
def _insertion_sort(a, lo, hi):
    for i in range(lo + 1, hi + 1):
        v = a[i]
        j = i - 1
        while j >= lo and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


@njit(cache=True)
def _partition3(a, lo, hi, pivot):
    """Dutch-flag partition of a[lo:hi+1]; returns (lt, gt) with a[lt:gt+1] == pivot."""
    lt = lo
    i = lo
    gt = hi
    while i <= gt:
        v = a[i]
        if v < pivot:
            a[i] = a[lt]
            a[lt] = v
            lt += 1
            i += 1
        elif v > pivot:
            a[i] = a[gt]
            a[gt] = v
            gt -= 1
        else:
            i += 1
    return lt, gt


@njit(cache=True)
def _mom_select(a, lo, hi, k):
    """Worst-case linear selection (median of medians) of absolute rank k in a[lo:hi+1].

    The pivot search is itself a selection on the group medians; it runs on an
    explicit frame stack because numba's on-disk cache cannot hold recursive
    functions.
    """
    f_lo = np.empty(64, dtype=np.int64)
    f_hi = np.empty(64, dtype=np.int64)
    f_k = np.empty(64, dtype=np.int64)
    top = 0
    f_lo[0] = lo
    f_hi[0] = hi
    f_k[0] = k
    result = 0.0
    returning = False
    while True:
        flo = f_lo[top]
        fhi = f_hi[top]
        fk = f_k[top]
        if returning:
            returning = False
            lt, gt = _partition3(a, flo, fhi, result)
            if fk < lt:
                f_hi[top] = lt - 1
            elif fk > gt:
                f_lo[top] = gt + 1
            else:
                if top == 0:
                    return result
                top -= 1
                returning = True
            continue
        if fhi - flo < _SMALL:
            _insertion_sort(a, flo, fhi)
            result = a[fk]
            if top == 0:
                return result
            top -= 1
            returning = True
            continue
        # move each group-of-5 median to the front of the range
        g = 0
        for s in range(flo, fhi + 1, 5):
            e = min(s + 4, fhi)
            _insertion_sort(a, s, e)
            mid = s + (e - s) // 2
            v = a[mid]
            a[mid] = a[flo + g]
            a[flo + g] = v
            g += 1
        top += 1
        f_lo[top] = flo
        f_hi[top] = flo + g - 1
        f_k[top] = flo + (g - 1) // 2


@njit(cache=True)
def _select_inplace(a, k):
    """k-th smallest (0-indexed) of ``a``; reorders ``a``.

    Median-of-three quickselect with a three-way partition. After ``2 log2 n``
    rounds without finishing it hands the remaining range to the
    median-of-medians routine, which bounds the worst case at O(n).
    """
    lo = 0
    hi = a.shape[0] - 1
    budget = 2 * (int(np.log2(a.shape[0])) + 1)
    while True:
        if hi - lo < _SMALL:
            _insertion_sort(a, lo, hi)
            return a[k]
        if budget == 0:
            return _mom_select(a, lo, hi, k)
        budget -= 1
        x = a[lo]
        y = a[(lo + hi) // 2]
        z = a[hi]
        if x > y:
            x, y = y, x
        if y > z:
            y = z
        pivot = y if y > x else x
        lt, gt = _partition3(a, lo, hi, pivot)
        if k < lt:
            hi = lt - 1
        elif k > gt:
            lo = gt + 1
        else:
            return pivot


@njit(cache=True)
def _lower_median(values):
    buf = values.copy()
    return _select_inplace(buf, (buf.shape[0] + 1) // 2 - 1)


@njit(cache=True)
def _coordinate_median(X):
    n, d = X.shape
    out = np.empty(d)
    buf = np.empty(n)
    for j in range(d):
        for i in range(n):
            buf[i] = X[i, j]
        out[j] = _select_inplace(buf, (n + 1) // 2 - 1)
    return out


def _as_values(values) -> np.ndarray:
    a = np.array(values, dtype=np.float64, copy=True).reshape(-1)
    if np.isnan(a).any():
        raise DomainError("cannot select among NaN values")
    return a


def select_kth(values, k: int) -> float:
    """The ``k``-th smallest value, 1-indexed, in expected and worst-case linear time."""
    a = _as_values(values)
    if not 1 <= k <= a.shape[0]:
        raise DomainError(f"rank {k} out of range for {a.shape[0]} values")
    return float(_select_inplace(a, k - 1))


def median_1d(values) -> float:
    """Lower median: the ceil(len/2)-th smallest value."""
    a = _as_values(values)
    if a.shape[0] == 0:
        raise DomainError("median of an empty sequence")
    return float(_select_inplace(a, (a.shape[0] + 1) // 2 - 1))


def coordinate_median(P) -> np.ndarray:
    """Per-coordinate lower median of a point set."""
    X = np.ascontiguousarray(as_points(P))
    if X.shape[0] == 0:
        raise DomainError("coordinate median of an empty point set")
    return _coordinate_median(X)
