"""Gradient descent on the geometric-median objective with median line search.

Each step computes the gradient of ``sum_i |c - p_i|`` at the current point,
projects every candidate onto the line through ``c`` along ``-grad``, and
moves to the lower median of the projections. Starting from the
coordinate-wise median, ``ceil(ln m / ln(10/7))`` steps suffice to shrink the
initial error (at most ``m`` goodness radii) by the per-step factor 0.7.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

from .core import DomainError, _coordinate_median, _select_inplace, as_points
from .sampling import CandidateMeans, EstimatorConfig

TAU_COLOC_REL = 1e-12
TAU_GRAD_REL = 1e-9
CONTRACTION = 0.7
DEFAULT_T_SLACK = 2


@njit(cache=True)
def _gradient(q, P):
    m, d = P.shape
    qn = 0.0
    for k in range(d):
        qn += q[k] * q[k]
    tol = TAU_COLOC_REL * (1.0 + np.sqrt(qn))
    g = np.zeros(d)
    diff = np.empty(d)
    for i in range(m):
        dist2 = 0.0
        for k in range(d):
            diff[k] = q[k] - P[i, k]
            dist2 += diff[k] * diff[k]
        dist = np.sqrt(dist2)
        if dist < tol:
            continue
        for k in range(d):
            g[k] += diff[k] / dist
    return g


@njit(cache=True)
def _line_step(c, g, P):
    m, d = P.shape
    gg = 0.0
    for k in range(d):
        gg += g[k] * g[k]
    s = np.empty(m)
    for i in range(m):
        acc = 0.0
        for k in range(d):
            acc -= (P[i, k] - c[k]) * g[k]
        s[i] = acc / gg
    med = _select_inplace(s, (m + 1) // 2 - 1)
    out = np.empty(d)
    for k in range(d):
        out[k] = c[k] - med * g[k]
    return out


@njit(cache=True)
def _fastgd_kernel(P, T, tau_grad):
    m, d = P.shape
    iterates = np.empty((T + 1, d))
    gnorms = np.empty(T)
    c = _coordinate_median(P)
    iterates[0] = c
    for j in range(T):
        g = _gradient(c, P)
        gn = np.sqrt(np.sum(g * g))
        gnorms[j] = gn
        if gn < tau_grad:
            return iterates[: j + 1], gnorms[: j + 1], True
        c = _line_step(c, g, P)
        iterates[j + 1] = c
    return iterates, gnorms, False


def _candidates(P) -> np.ndarray:
    X = P.means if isinstance(P, CandidateMeans) else as_points(P)
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise DomainError("no candidate means")
    return X


def geo_median_gradient(q, P) -> np.ndarray:
    """Sum of unit vectors ``(q - p) / |q - p|``, skipping candidates co-located with ``q``."""
    X = _candidates(P)
    q = np.asarray(q, dtype=np.float64).reshape(-1)
    if q.shape[0] != X.shape[1]:
        raise DomainError(f"point has dimension {q.shape[0]}, candidates have {X.shape[1]}")
    return _gradient(q, X)


def line_median_step(c, grad, P) -> np.ndarray:
    """Lower median of the candidates' projections onto the line ``c - s * grad``."""
    X = _candidates(P)
    c = np.asarray(c, dtype=np.float64).reshape(-1)
    grad = np.asarray(grad, dtype=np.float64).reshape(-1)
    if c.shape[0] != X.shape[1] or grad.shape[0] != X.shape[1]:
        raise DomainError("dimension mismatch between point, gradient and candidates")
    if not np.any(grad):
        raise DomainError("line search needs a nonzero gradient")
    return _line_step(c, grad, X)


def iteration_count(m: int, T_slack: int = DEFAULT_T_SLACK) -> int:
    return math.ceil(math.log(max(2, m)) / math.log(1 / CONTRACTION)) + T_slack


@dataclass(frozen=True)
class GDTrace:
    iterates: np.ndarray
    gradient_norms: np.ndarray
    terminated_early: bool
    T: int

    @property
    def steps(self) -> int:
        return self.iterates.shape[0] - 1

    def to_json(self, include_iterates: bool = False) -> dict:
        out = {
            "T": self.T,
            "steps": self.steps,
            "terminated_early": self.terminated_early,
            "gradient_norms": self.gradient_norms.tolist(),
        }
        if include_iterates:
            out["iterates"] = self.iterates.tolist()
        return out


def fastgd(P, cfg: EstimatorConfig | None = None, T: int | None = None):
    """Aggregate candidate means; returns ``(estimate, trace)``.

    ``T`` overrides the derived iteration count. Stops early when the gradient
    norm falls below ``1e-9 * m``, which certifies a near-stationary point.
    """
    X = _candidates(P)
    m = X.shape[0]
    if T is None:
        T = iteration_count(m, cfg.T_slack if cfg is not None else DEFAULT_T_SLACK)
    iterates, gnorms, early = _fastgd_kernel(X, int(T), TAU_GRAD_REL * m)
    trace = GDTrace(iterates=iterates, gradient_norms=gnorms, terminated_early=bool(early), T=int(T))
    return iterates[-1].copy(), trace
