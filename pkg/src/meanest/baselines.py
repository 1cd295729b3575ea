"""Reference estimators: Weiszfeld geometric median-of-means and coordinate-wise median-of-means."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DomainError, PointSet, as_points, coordinate_median
from .fastgd import TAU_COLOC_REL, TAU_GRAD_REL
from .sampling import EstimatorConfig, RngStream, draw_candidate_means


@dataclass(frozen=True)
class WeiszfeldResult:
    point: np.ndarray
    n_iter: int
    grad_norm: float
    status: str  # "converged", "stalled" or "max_iter"
    objective: np.ndarray

    @property
    def converged(self) -> bool:
        return self.status == "converged"


def _objective(X, x):
    return float(np.sqrt(((X - x) ** 2).sum(axis=1)).sum())


def _local_state(X, x):
    """Distances, co-location mask and the (sub)gradient residual at ``x``.

    Points within ``1e-12 * (1 + |x|)`` of ``x`` are excluded from the
    gradient. With ``eta`` such points, ``x`` is optimal iff the remaining
    gradient has norm at most ``eta``; the residual is the excess.
    """
    diff = x - X
    dist = np.sqrt(np.einsum("ij,ij->i", diff, diff))
    coloc = dist < TAU_COLOC_REL * (1.0 + np.linalg.norm(x))
    far = ~coloc
    R = (diff[far] / dist[far, None]).sum(axis=0)
    r = float(np.linalg.norm(R))
    eta = int(coloc.sum())
    return dist, far, r, eta, max(0.0, r - eta)


def weiszfeld(P, tol: float = 1e-10, max_iter: int = 10_000, return_info: bool = False):
    """Geometric median by the Weiszfeld fixed-point iteration, started at the coordinate median.

    When the iterate sits on input points the Vardi-Zhang modification is used:
    the plain Weiszfeld target is blended with the current point according to
    how many points coincide with it, which keeps the objective non-increasing
    and lets a data point be certified optimal. Iteration stops once the
    gradient residual drops below ``1e-9 * m`` (``converged``), once a step moves
    less than ``tol`` times the data spread (``stalled``), or at ``max_iter``.
    """
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol}")
    X = as_points(P)
    m = X.shape[0]
    if m == 0:
        raise DomainError("geometric median of an empty set")
    tau_grad = TAU_GRAD_REL * m
    spread = float(np.max(np.ptp(X, axis=0)))
    scale = spread if spread > 0 else 1.0

    x = coordinate_median(X)
    history = [_objective(X, x)]
    status = "max_iter"
    n_iter = 0
    dist, far, r, eta, resid = _local_state(X, x)
    while n_iter < max_iter:
        if resid < tau_grad:
            status = "converged"
            break
        w = 1.0 / dist[far]
        target = (X[far] * w[:, None]).sum(axis=0) / w.sum()
        if eta:
            beta = min(1.0, eta / r)
            x_new = (1.0 - beta) * target + beta * x
        else:
            x_new = target
        move = float(np.linalg.norm(x_new - x))
        x = x_new
        n_iter += 1
        history.append(_objective(X, x))
        dist, far, r, eta, resid = _local_state(X, x)
        if move <= tol * scale:
            status = "converged" if resid < tau_grad else "stalled"
            break
    if status == "max_iter" and resid < tau_grad:
        status = "converged"
    if return_info:
        return x, WeiszfeldResult(
            point=x, n_iter=n_iter, grad_norm=resid, status=status, objective=np.array(history)
        )
    return x


def geometric_median_of_means(A: PointSet, cfg: EstimatorConfig, stream: RngStream | None = None):
    """Weiszfeld geometric median of the candidate means."""
    return weiszfeld(draw_candidate_means(A, cfg, stream).means)


def coordinate_median_of_means(A: PointSet, cfg: EstimatorConfig, stream: RngStream | None = None):
    """Coordinate-wise lower median of the candidate means."""
    return coordinate_median(draw_candidate_means(A, cfg, stream).means)
