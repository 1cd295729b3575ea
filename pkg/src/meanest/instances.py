"""Instance generators, each returning a point set and its exact cost oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import CostOracle, DomainError, PointSet


def gen_two_point_lb(n: int, eps: float):
    """``n`` points at 0 and ``floor(eps * n)`` points at 1 on the line.

    The mean sits at ``k / (n + k)`` and OPT is ``n k / (n + k)``; for integral
    ``eps * n`` these are ``eps / (1 + eps)`` and ``eps n / (1 + eps)``. Answering
    0 costs exactly ``(1 + k/n) * OPT``.
    """
    if n < 1 or not eps > 0:
        raise DomainError(f"need n >= 1 and eps > 0, got n={n}, eps={eps}")
    k = math.floor(eps * n + 1e-9)
    if k < 1:
        raise DomainError(f"eps * n = {eps * n} places no point at 1")
    total = n + k
    X = np.concatenate([np.zeros(n), np.ones(k)])[:, None]
    oracle = CostOracle(mean=[k / total], opt=n * k / total, n=total)
    return PointSet(X), oracle


def gen_empirical_mean_lb(total: int, S_size: int, eps: float):
    """Symmetric three-atom set on which a size-``S_size`` empirical mean often fails.

    A ``1 / (2 S^2 eps)`` fraction of the points sits at each of ``-S sqrt(eps)``
    and ``+S sqrt(eps)``, the rest at 0, so the average cost is 1. Spike counts
    are rounded to the nearest integer (minimum 1) and the oracle reports the
    realized OPT, not the ideal one.
    """
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if S_size < 1 or S_size * S_size * eps <= 1:
        raise DomainError(f"need S_size^2 * eps > 1, got S_size={S_size}, eps={eps}")
    spike = S_size * math.sqrt(eps)
    frac = 1.0 / (2 * S_size * S_size * eps)
    count = max(1, round(total * frac))
    zeros = total - 2 * count
    if zeros < 0:
        raise DomainError(f"total={total} cannot hold two spikes of {count} points")
    X = np.concatenate([np.full(count, -spike), np.zeros(zeros), np.full(count, spike)])[:, None]
    return PointSet(X), CostOracle(mean=[0.0], opt=2 * count * spike * spike, n=total)


def _with_oracle(X):
    A = PointSet(X)
    return A, CostOracle.from_points(A)


def gen_gaussian(n: int, d: int, sigma: float = 1.0, seed: int = 0):
    rng = np.random.default_rng(seed)
    return _with_oracle(rng.normal(0.0, sigma, size=(n, d)))


def gen_two_cluster(n: int, d: int, sep: float = 10.0, sigma: float = 0.0, seed: int = 0):
    """Two clusters of ``n // 2`` points around ``+-sep * e_1`` (plus one extra at ``+`` for odd ``n``)."""
    if n < 1 or d < 1:
        raise DomainError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.zeros((n, d))
    X[:half, 0] = -sep
    X[half:, 0] = sep
    if sigma > 0:
        X += rng.normal(0.0, sigma, size=(n, d))
    return _with_oracle(X)


def gen_pareto_tail(n: int, d: int, alpha: float = 2.5, scale: float = 1.0, seed: int = 0):
    """Coordinates are symmetric Lomax (Pareto II) variables with tail index ``alpha``."""
    if not alpha > 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    rng = np.random.default_rng(seed)
    mag = rng.pareto(alpha, size=(n, d)) * scale
    sign = rng.choice([-1.0, 1.0], size=(n, d))
    return _with_oracle(mag * sign)


GENERATORS = {
    "two_point_lb": gen_two_point_lb,
    "empirical_mean_lb": gen_empirical_mean_lb,
    "gaussian": gen_gaussian,
    "two_cluster": gen_two_cluster,
    "pareto_tail": gen_pareto_tail,
}

_SEEDED = {"gaussian", "two_cluster", "pareto_tail"}


@dataclass(frozen=True)
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        if self.kind not in GENERATORS:
            raise DomainError(f"unknown instance kind {self.kind!r}; choose from {sorted(GENERATORS)}")

    @property
    def name(self) -> str:
        args = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.kind}({args})"

    def build(self):
        fn = GENERATORS[self.kind]
        kw = dict(self.params)
        if self.kind in _SEEDED:
            kw.setdefault("seed", self.seed)
        try:
            return fn(**kw)
        except TypeError as exc:
            raise DomainError(f"bad parameters for {self.kind}: {exc}") from exc
