"""Uniform batch sampling: the candidate means every aggregator consumes."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .core import DomainError, PointSet, as_points, batch_means, mean

# Constants under which the success guarantees hold; the descent needs a = 1440, b = 50.
GUARANTEED_GD_A = 1440.0
GUARANTEED_GD_B = 50.0
GUARANTEED_MINSUM_B = 3.0
PRACTICAL_A = 40.0
PRACTICAL_B = 10.0


def _ceil(x: float) -> int:
    # ln(1/e^-1) or 1440/0.1 must not round up past an integer they equal
    return math.ceil(x - 1e-9 * max(1.0, abs(x)))


def guaranteed_minsum_a(depth: int) -> float:
    """Smallest integer batch constant covering 2 * 25^(i+1) * (10/3)^(i+1)."""
    return float(math.ceil(2 * 25 ** (depth + 1) * (10 / 3) ** (depth + 1) - 1e-9))


@dataclass(frozen=True)
class EstimatorConfig:
    """Tunables shared by the sampler and the aggregators.

    ``a`` scales the batch size (``ceil(a / eps)``), ``b`` the batch count
    (``ceil(b * ln(1/delta))``). ``T_slack`` adds descent iterations beyond the
    derived count, ``depth_i`` is the min-sum recursion depth and
    ``cluster_exponent`` sets how many clusters each level splits into
    (``ceil(|P| ** cluster_exponent)``).
    """

    eps: float
    delta: float
    a: float = PRACTICAL_A
    b: float = PRACTICAL_B
    seed: int = 0
    T_slack: int = 2
    depth_i: int = 0
    cluster_exponent: float = 0.5

    def __post_init__(self):
        if not (self.eps > 0 and math.isfinite(self.eps)):
            raise DomainError(f"eps must be positive, got {self.eps}")
        if not 0 < self.delta < 1:
            raise DomainError(f"delta must lie in (0, 1), got {self.delta}")
        if not (self.a >= 1 and self.b >= 1):
            raise DomainError(f"constants a and b must be >= 1, got a={self.a}, b={self.b}")
        if not 0 <= self.seed < 2**64:
            raise DomainError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        if self.T_slack < 0 or self.depth_i < 0:
            raise DomainError("T_slack and depth_i must be nonnegative")
        if not 0 < self.cluster_exponent < 1:
            raise DomainError(f"cluster_exponent must lie in (0, 1), got {self.cluster_exponent}")

    @property
    def batch_size(self) -> int:
        return max(1, _ceil(self.a / self.eps))

    @property
    def num_batches(self) -> int:
        return max(1, _ceil(self.b * math.log(1.0 / self.delta)))

    @property
    def sample_count(self) -> int:
        return self.batch_size * self.num_batches

    @classmethod
    def practical(cls, eps: float, delta: float, **kw) -> "EstimatorConfig":
        return cls(eps=eps, delta=delta, a=PRACTICAL_A, b=PRACTICAL_B, **kw)

    @classmethod
    def guaranteed(cls, eps: float, delta: float, method: str = "fastgd", **kw) -> "EstimatorConfig":
        """Constants under which the success guarantees are proven.

        The min-sum batch constant depends on ``depth_i``; every other
        method uses the gradient-descent constants.
        """
        if method == "minsum":
            depth = kw.get("depth_i", 0)
            return cls(eps=eps, delta=delta, a=guaranteed_minsum_a(depth), b=GUARANTEED_MINSUM_B, **kw)
        return cls(eps=eps, delta=delta, a=GUARANTEED_GD_A, b=GUARANTEED_GD_B, **kw)

    @classmethod
    def preset(cls, name: str, eps: float, delta: float, method: str = "fastgd", **kw):
        """``"practical"`` (a=40, b=10) or ``"paper"``, the guaranteed constants."""
        if name == "practical":
            return cls.practical(eps, delta, **kw)
        if name == "paper":
            return cls.guaranteed(eps, delta, method=method, **kw)
        raise DomainError(f"unknown preset {name!r}; expected 'paper' or 'practical'")

    def with_(self, **changes) -> "EstimatorConfig":
        return replace(self, **changes)


@dataclass(frozen=True)
class RngStream:
    """A splittable, reproducible source of randomness.

    A stream is a seed plus a key path. ``child(i)`` extends the path, so
    batch ``i`` of trial ``t`` always sees the same numbers no matter which
    worker draws it or in what order.
    """

    seed: int
    key: tuple = ()

    def child(self, *key: int) -> "RngStream":
        return RngStream(self.seed, self.key + tuple(int(k) for k in key))

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.seed, spawn_key=self.key)
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class CandidateMeans:
    """Empirical means of ``m`` independent uniform batches of size ``batch_size``."""

    means: np.ndarray
    batch_size: int

    @property
    def m(self) -> int:
        return self.means.shape[0]

    @property
    def d(self) -> int:
        return self.means.shape[1]

    @property
    def samples(self) -> int:
        return self.m * self.batch_size


def draw_indices(n: int, m: int, s: int, stream: RngStream) -> np.ndarray:
    """``(m, s)`` indices into ``range(n)``, uniform with replacement, one substream per row."""
    idx = np.empty((m, s), dtype=np.int64)
    for i in range(m):
        idx[i] = stream.child(i).generator().integers(0, n, size=s)
    return idx


def draw_candidate_means(
    A: PointSet, cfg: EstimatorConfig, stream: RngStream | None = None
) -> CandidateMeans:
    """Draw ``cfg.num_batches`` batches of ``cfg.batch_size`` points and average each.

    Sampling is with replacement, so the batches stay independent even when
    ``m * s`` exceeds ``n``.
    """
    X = as_points(A)
    if X.shape[0] == 0:
        raise DomainError("cannot sample from an empty point set")
    if stream is None:
        stream = RngStream(cfg.seed)
    idx = draw_indices(X.shape[0], cfg.num_batches, cfg.batch_size, stream)
    return CandidateMeans(means=batch_means(X[idx]), batch_size=cfg.batch_size)


def empirical_mean_estimate(A: PointSet, sample_size: int, stream: RngStream) -> np.ndarray:
    """Plain average of ``sample_size`` uniform draws with replacement."""
    if sample_size < 1:
        raise DomainError(f"sample_size must be >= 1, got {sample_size}")
    X = as_points(A)
    idx = stream.generator().integers(0, X.shape[0], size=sample_size)
    return mean(X[idx])
