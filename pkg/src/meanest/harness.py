"""Monte Carlo experiments and runtime-scaling benchmarks.

Every trial draws from its own substream ``(seed, trial_id)``, so results are
identical whatever the worker count or scheduling; only the timing columns
vary between runs. All estimators in one trial share that substream, which
gives them the same samples whenever their batch constants agree.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .baselines import weiszfeld
from .core import (
    CostOracle,
    DomainError,
    PointSet,
    approx_ratio,
    coordinate_median,
    cost,
    is_eps_approx,
)
from .fastgd import GDTrace, fastgd
from .formats import read_pointset
from .instances import InstanceSpec
from .minsum import compute_winner, minsum_estimate, minsum_select
from .sampling import EstimatorConfig, RngStream, draw_candidate_means, empirical_mean_estimate

log = logging.getLogger(__name__)

METHODS = ("fastgd", "minsum", "gmom", "empirical", "coordmed")
CSV_COLUMNS = (
    "trial_id", "estimator", "instance", "eps", "delta", "samples",
    "approx_ratio", "success", "t_sample_ns", "t_agg_ns",
)


class ConfigError(ValueError):
    """An experiment or benchmark configuration is invalid."""


@dataclass
class EstimateReport:
    method: str
    point: np.ndarray
    samples: int
    t_sample_ns: int
    t_agg_ns: int
    cost: float | None = None
    approx_ratio: float | None = None
    success: bool | None = None
    trace: GDTrace | None = None

    def to_json(self, include_iterates: bool = False) -> dict:
        out = {
            "method": self.method,
            "point": self.point.tolist(),
            "samples": self.samples,
            "t_sample_ns": self.t_sample_ns,
            "t_agg_ns": self.t_agg_ns,
            "cost": self.cost,
            "approx_ratio": self.approx_ratio,
            "success": self.success,
        }
        if self.trace is not None:
            out["trace"] = self.trace.to_json(include_iterates)
        return out


def estimate(
    A: PointSet,
    cfg: EstimatorConfig,
    method: str = "fastgd",
    stream: RngStream | None = None,
    oracle: CostOracle | None = None,
    sample_size: int | None = None,
    with_cost: bool = False,
) -> EstimateReport:
    """Run one estimator end to end: sample, aggregate, and score against ``oracle`` if given.

    ``sample_size`` only applies to ``empirical``, which otherwise spends the
    same budget ``m * s`` as the aggregating methods.
    """
    if method not in METHODS:
        raise ConfigError(f"unknown method {method!r}; choose from {METHODS}")
    if stream is None:
        stream = RngStream(cfg.seed)
    trace = None
    t0 = time.perf_counter_ns()
    if method == "empirical":
        samples = sample_size or cfg.sample_count
        point = empirical_mean_estimate(A, samples, stream)
        t1 = t2 = time.perf_counter_ns()
    else:
        cand = draw_candidate_means(A, cfg, stream)
        samples = cand.samples
        t1 = time.perf_counter_ns()
        if method == "fastgd":
            point, trace = fastgd(cand, cfg)
        elif method == "minsum":
            point = minsum_estimate(cand, cfg)
        elif method == "gmom":
            point = weiszfeld(cand.means)
        else:
            point = coordinate_median(cand.means)
        t2 = time.perf_counter_ns()
    report = EstimateReport(method, point, samples, t1 - t0, t2 - t1, trace=trace)
    if oracle is not None:
        report.approx_ratio = approx_ratio(oracle, point)
        report.success = is_eps_approx(oracle, point, cfg.eps)
        report.cost = report.approx_ratio * oracle.opt
    if with_cost:
        report.cost = cost(A, point)
    return report


# -- experiments -------------------------------------------------------------

@dataclass(frozen=True)
class EstimatorSpec:
    method: str
    label: str
    cfg: EstimatorConfig
    sample_size: int | None = None


@dataclass(frozen=True)
class ExperimentConfig:
    instance: dict
    estimators: tuple
    eps: float
    delta: float
    trials: int = 100
    seed: int = 0
    preset: str = "practical"
    workers: int = 1
    raw: dict = field(default_factory=dict, compare=False)

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        try:
            eps = float(raw["eps"])
            delta = float(raw["delta"])
            instance = dict(raw["instance"])
            names = raw.get("estimators", ["fastgd"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"experiment config needs eps, delta and instance: {exc}") from exc
        preset = raw.get("preset", "practical")
        shared = {k: raw[k] for k in ("a", "b", "T_slack", "depth", "cluster_exponent", "sample_size") if k in raw}
        specs = []
        for entry in names:
            entry = {"method": entry} if isinstance(entry, str) else dict(entry)
            specs.append(_estimator_spec({**shared, **entry}, eps, delta, entry.get("preset", preset)))
        labels = [s.label for s in specs]
        if len(set(labels)) != len(labels):
            raise ConfigError(f"estimator labels must be unique, got {labels}")
        trials = int(raw.get("trials", 100))
        if trials < 1:
            raise ConfigError("trials must be >= 1")
        return cls(
            instance=instance, estimators=tuple(specs), eps=eps, delta=delta, trials=trials,
            seed=int(raw.get("seed", 0)), preset=preset, workers=int(raw.get("workers", 1)), raw=dict(raw),
        )

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
        return cls.from_dict(raw)


def _estimator_spec(entry: dict, eps: float, delta: float, preset: str) -> EstimatorSpec:
    method = entry.get("method")
    if method not in METHODS:
        raise ConfigError(f"unknown estimator {method!r}; choose from {METHODS}")
    kw = {}
    if "T_slack" in entry:
        kw["T_slack"] = int(entry["T_slack"])
    if "depth" in entry:
        kw["depth_i"] = int(entry["depth"])
    if "cluster_exponent" in entry:
        kw["cluster_exponent"] = float(entry["cluster_exponent"])
    try:
        cfg = EstimatorConfig.preset(preset, eps, delta, method=method, **kw)
        if "a" in entry or "b" in entry:
            cfg = cfg.with_(a=float(entry.get("a", cfg.a)), b=float(entry.get("b", cfg.b)))
    except DomainError as exc:
        raise ConfigError(str(exc)) from exc
    label = entry.get("label")
    if label is None:
        label = method if method != "minsum" or "depth" not in entry else f"minsum-d{cfg.depth_i}"
    size = entry.get("sample_size")
    return EstimatorSpec(method, label, cfg, int(size) if size is not None else None)


def load_instance(spec: dict):
    """Build ``(PointSet, CostOracle, name)`` from an instance entry of a config."""
    if "file" in spec:
        try:
            A = read_pointset(spec["file"])
        except DomainError as exc:
            raise ConfigError(str(exc)) from exc
        return A, CostOracle.from_points(A), Path(spec["file"]).name
    try:
        ispec = InstanceSpec(spec["kind"], dict(spec.get("params", {})), int(spec.get("seed", 0)))
        A, oracle = ispec.build()
    except (KeyError, DomainError) as exc:
        raise ConfigError(f"bad instance spec {spec!r}: {exc}") from exc
    return A, oracle, ispec.name


@dataclass(frozen=True)
class TrialRecord:
    trial_id: int
    estimator: str
    instance: str
    eps: float
    delta: float
    samples: int
    approx_ratio: float
    success: bool
    t_sample_ns: int
    t_agg_ns: int

    def row(self) -> list:
        return [
            self.trial_id, self.estimator, self.instance, repr(self.eps), repr(self.delta),
            self.samples, repr(self.approx_ratio), int(self.success), self.t_sample_ns, self.t_agg_ns,
        ]


def run_trial(A, oracle, name, cfg: ExperimentConfig, trial_id: int) -> list[TrialRecord]:
    stream = RngStream(cfg.seed, (trial_id,))
    out = []
    for est in cfg.estimators:
        rep = estimate(A, est.cfg, est.method, stream, oracle, est.sample_size)
        out.append(
            TrialRecord(
                trial_id, est.label, name, cfg.eps, cfg.delta, rep.samples,
                rep.approx_ratio, rep.success, rep.t_sample_ns, rep.t_agg_ns,
            )
        )
    return out


def _run_chunk(args):
    cfg, ids = args
    A, oracle, name = load_instance(cfg.instance)
    return [rec for t in ids for rec in run_trial(A, oracle, name, cfg, t)]


def _summary(values) -> dict:
    v = np.asarray(values, dtype=np.float64)
    return {
        "mean": float(v.mean()),
        "median": float(np.median(v)),
        "p90": float(np.quantile(v, 0.9)),
        "p99": float(np.quantile(v, 0.99)),
        "max": float(v.max()),
    }


@dataclass
class ExperimentReport:
    config: dict
    seed: int
    trials: int
    instance: str
    estimators: dict
    records: list = field(repr=False, default_factory=list)

    def success_rate(self, label: str) -> float:
        return self.estimators[label]["success_rate"]

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "seed": self.seed,
            "trials": self.trials,
            "instance": self.instance,
            "estimators": self.estimators,
        }

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "trials.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(CSV_COLUMNS)
            w.writerows(rec.row() for rec in self.records)
        (out / "report.json").write_text(json.dumps(self.to_json(), indent=2) + "\n")


def summarize(cfg: ExperimentConfig, name: str, records: list[TrialRecord]) -> ExperimentReport:
    records = sorted(records, key=lambda r: (r.trial_id, [e.label for e in cfg.estimators].index(r.estimator)))
    per = {}
    for est in cfg.estimators:
        rows = [r for r in records if r.estimator == est.label]
        succ = sum(r.success for r in rows)
        per[est.label] = {
            "method": est.method,
            "a": est.cfg.a,
            "b": est.cfg.b,
            "depth": est.cfg.depth_i,
            "samples": rows[0].samples,
            "success_rate": succ / len(rows),
            "failure_rate": 1 - succ / len(rows),
            "approx_ratio": _summary([r.approx_ratio for r in rows]),
            "t_sample_ns": _summary([r.t_sample_ns for r in rows]),
            "t_agg_ns": _summary([r.t_agg_ns for r in rows]),
        }
    config = dict(cfg.raw) if cfg.raw else {"eps": cfg.eps, "delta": cfg.delta, "trials": cfg.trials}
    return ExperimentReport(config, cfg.seed, cfg.trials, name, per, records)


def run_experiment(spec, out_dir=None) -> ExperimentReport:
    """Run ``spec.trials`` independent trials of every estimator and summarize them.

    ``spec`` is an ``ExperimentConfig`` or the equivalent dict. When
    ``out_dir`` is given, ``trials.csv`` and ``report.json`` are written there.
    """
    cfg = spec if isinstance(spec, ExperimentConfig) else ExperimentConfig.from_dict(spec)
    A, oracle, name = load_instance(cfg.instance)
    ids = list(range(cfg.trials))
    if cfg.workers > 1:
        chunks = [(cfg, ids[i :: cfg.workers]) for i in range(cfg.workers)]
        with ProcessPoolExecutor(cfg.workers) as pool:
            records = [rec for part in pool.map(_run_chunk, chunks) for rec in part]
    else:
        records = [rec for t in ids for rec in run_trial(A, oracle, name, cfg, t)]
    report = summarize(cfg, name, records)
    for label, s in report.estimators.items():
        log.info("%s on %s: success rate %.4f", label, name, s["success_rate"])
    if out_dir is not None:
        report.write(out_dir)
    return report


# -- scaling benchmark ---------------------------------------------------------

BENCH_METHODS = ("compute_winner", "minsum1", "fastgd")

_BENCH_FN = {
    "compute_winner": compute_winner,
    "minsum1": lambda P: minsum_select(P, 1),
    "fastgd": lambda P: fastgd(P)[0],
}


def _time_call(fn, arg, min_ns: int) -> float:
    """Nanoseconds per call, averaged over enough calls to span ``min_ns``."""
    number = 1
    while True:
        t0 = time.perf_counter_ns()
        for _ in range(number):
            fn(arg)
        elapsed = time.perf_counter_ns() - t0
        if elapsed >= min_ns:
            return elapsed / number
        number *= max(2, math.ceil(min_ns / max(elapsed, 1)))


def fit_slope(sizes, times) -> float:
    """Least-squares slope of log(time) against log(size)."""
    return float(np.polyfit(np.log(sizes), np.log(times), 1)[0])


@dataclass
class BenchResult:
    d: int
    reps: int
    rows: list  # dicts: method, m, median_ns, reps_ns
    slopes: dict

    def to_json(self) -> dict:
        return asdict(self)

    def write(self, path) -> None:
        path = Path(path)
        if path.suffix == ".json":
            path.write_text(json.dumps(self.to_json(), indent=2) + "\n")
            return
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["method", "m", "d", "median_ns", "slope"])
            for r in self.rows:
                w.writerow([r["method"], r["m"], self.d, repr(r["median_ns"]), repr(self.slopes[r["method"]])])


def run_scaling_bench(
    sizes=(256, 1024, 4096),
    d: int = 16,
    reps: int = 5,
    methods=BENCH_METHODS,
    seed: int = 0,
    min_ns: int = 20_000_000,
) -> BenchResult:
    """Time the aggregation phase alone on Gaussian candidate sets of each size.

    Each point is the median of ``reps`` repetitions; a repetition averages as
    many calls as needed to last ``min_ns``.
    """
    sizes = [int(s) for s in sizes]
    if sizes != sorted(sizes) or len(set(sizes)) != len(sizes) or len(sizes) < 2:
        raise ConfigError(f"sizes must be at least two strictly ascending values, got {sizes}")
    if reps < 5:
        raise ConfigError("reps must be >= 5")
    unknown = set(methods) - set(_BENCH_FN)
    if unknown:
        raise ConfigError(f"unknown bench methods {sorted(unknown)}; choose from {BENCH_METHODS}")
    rng = np.random.default_rng(seed)
    warm = rng.normal(size=(32, d))
    for method in methods:
        _BENCH_FN[method](warm)
    rows = []
    slopes = {}
    for method in methods:
        medians = []
        for m in sizes:
            P = np.random.default_rng([seed, m]).normal(size=(m, d))
            times = [_time_call(_BENCH_FN[method], P, min_ns) for _ in range(reps)]
            med = float(np.median(times))
            medians.append(med)
            rows.append({"method": method, "m": m, "median_ns": med, "reps_ns": times})
        slopes[method] = fit_slope(sizes, medians)
        log.info("%s: log-log slope %.3f", method, slopes[method])
    return BenchResult(d=d, reps=reps, rows=rows, slopes=slopes)
