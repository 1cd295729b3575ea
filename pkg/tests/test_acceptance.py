"""Acceptance criteria, one test each, at the stated tolerances and time budgets.

Each test records a one-line verdict that is printed in the terminal summary.
"""

import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

from _configs import gd_bound_case, minsum_bound_case
from conftest import ACCEPTANCE
from meanest.core import PointSet, decomposition_check
from meanest.fastgd import fastgd, geo_median_gradient
from meanest.harness import run_experiment, run_scaling_bench
from meanest.instances import gen_gaussian
from meanest.minsum import compute_winner, minsum_select
from meanest.sampling import EstimatorConfig, RngStream, draw_candidate_means

LOWER_BOUND = {"kind": "two_point_lb", "params": {"n": 1000, "eps": 0.5}}
GAUSSIAN = {"kind": "gaussian", "params": {"n": 1000, "d": 32}, "seed": 1}


@contextmanager
def criterion(key, title):
    state = {"detail": ""}
    ok = False
    try:
        yield state
        ok = True
    finally:
        ACCEPTANCE[key] = (ok, title, state["detail"])


def _budget(state, t0, limit):
    elapsed = time.perf_counter() - t0
    state["detail"] += f" [{elapsed:.1f}s, limit {limit}s]"
    assert elapsed < limit, f"took {elapsed:.1f}s, budget {limit}s"


def test_1_decomposition_identity():
    with criterion(1, "mean-variance decomposition, 1000 pairs") as st:
        t0 = time.perf_counter()
        rng = np.random.default_rng(2024)
        worst = 0.0
        for _ in range(1000):
            n, d = int(rng.integers(1, 201)), int(rng.integers(1, 33))
            scale = 10 ** rng.uniform(-3, 3)
            X = rng.normal(size=(n, d)) * scale + rng.normal(size=d) * scale * 10
            c = rng.normal(size=d) * scale * 10 ** rng.uniform(-2, 2)
            lhs, rhs = decomposition_check(X, c)
            worst = max(worst, abs(lhs - rhs) / max(1.0, lhs))
        st["detail"] = f"max |lhs-rhs|/max(1,lhs) = {worst:.2e} (tol 1e-9)"
        assert worst <= 1e-9
        _budget(st, t0, 5)


def test_2_batch_mean_error():
    with criterion(2, "batch-mean squared error, 10^5 batches of 10") as st:
        t0 = time.perf_counter()
        A, oracle = gen_gaussian(1000, 5, seed=7)
        cfg = EstimatorConfig(eps=1.0, delta=math.exp(-1), a=10, b=100_000, seed=11)
        cand = draw_candidate_means(A, cfg)
        assert cand.m == 100_000 and cand.batch_size == 10
        err = float(((cand.means - oracle.mean) ** 2).sum(axis=1).mean())
        target = oracle.opt / (oracle.n * 10)
        rel = abs(err / target - 1)
        st["detail"] = f"E|mu_hat-mu|^2 = {err:.5f} vs OPT/(n s) = {target:.5f}, rel dev {rel:.3%} (tol 5%)"
        assert rel <= 0.05
        _budget(st, t0, 30)


@pytest.fixture(scope="module")
def lower_bound_runs():
    """One 1000-trial run of the min-sum and geometric-median aggregators on the two-point instance, timed."""
    t0 = time.perf_counter()
    rep = run_experiment({
        "instance": LOWER_BOUND,
        "estimators": [{"method": "minsum", "depth": 0}, {"method": "minsum", "depth": 1}, "gmom"],
        "eps": 0.5, "delta": 0.1, "trials": 1000, "seed": 1, "preset": "practical",
    })
    return rep, time.perf_counter() - t0


def test_3_fastgd_success():
    with criterion(3, "median line-search descent success rate") as st:
        t0 = time.perf_counter()
        rep = run_experiment({"instance": LOWER_BOUND, "estimators": ["fastgd"], "eps": 0.5, "delta": 0.1,
                              "trials": 1000, "seed": 1})
        g = run_experiment({"instance": GAUSSIAN, "estimators": ["fastgd"], "eps": 0.5, "delta": 0.1,
                            "trials": 1000, "seed": 2})
        p = run_experiment({"instance": LOWER_BOUND, "estimators": ["fastgd"], "eps": 0.5, "delta": 0.1,
                            "trials": 50, "seed": 3, "preset": "paper"})
        rates = (rep.success_rate("fastgd"), g.success_rate("fastgd"), p.success_rate("fastgd"))
        st["detail"] = (
            f"two-point {rates[0]:.3f}, gaussian d=32 {rates[1]:.3f} (need >= 0.90); "
            f"large constants {rates[2]:.3f} over 50 trials (need 1.0)"
        )
        assert rates[0] >= 0.90 and rates[1] >= 0.90 and rates[2] == 1.0
        _budget(st, t0, 60)


def test_4_minsum_success(lower_bound_runs):
    with criterion(4, "recursive min-sum success rate") as st:
        rep, elapsed = lower_bound_runs
        r0, r1 = rep.success_rate("minsum-d0"), rep.success_rate("minsum-d1")
        st["detail"] = f"depth 0 {r0:.3f}, depth 1 {r1:.3f} (need >= 0.90 each)"
        assert r0 >= 0.90 and r1 >= 0.90
        st["detail"] += f" [shared run {elapsed:.1f}s, limit 60s]"
        assert elapsed < 60


def test_5_geometric_median_of_means_success(lower_bound_runs):
    with criterion(5, "geometric median-of-means success rate") as st:
        rep, _ = lower_bound_runs
        r = rep.success_rate("gmom")
        st["detail"] = f"{r:.3f} (need >= 0.90)"
        assert r >= 0.90


def test_6_deterministic_bound_suites():
    with criterion(6, "descent and min-sum bounds on fuzzed configurations") as st:
        rng = np.random.default_rng(6)
        failures = {}
        counts = 0
        for m in (10, 50, 200):
            for _ in range(500):
                for check, ok in gd_bound_case(rng, m).items():
                    failures[check] = failures.get(check, 0) + (not ok)
                for depth in (0, 1, 2):
                    ok, _, _ = minsum_bound_case(rng, m, depth)
                    failures[f"minsum-d{depth}"] = failures.get(f"minsum-d{depth}", 0) + (not ok)
                counts += 1
        bad = {k: v for k, v in failures.items() if v}
        st["detail"] = f"{counts} configurations x {len(failures)} checks, failures: {bad or 'none'}"
        assert not bad


def test_7_empirical_mean_insufficiency():
    with criterion(7, "plain empirical mean fails on the spike instance") as st:
        rep = run_experiment({
            "instance": {"kind": "empirical_mean_lb", "params": {"total": 160_000, "S_size": 40, "eps": 0.05}},
            "estimators": [{"method": "empirical", "sample_size": 40}],
            "eps": 0.05, "delta": 0.1, "trials": 10_000, "seed": 7,
        })
        fail = 1 - rep.success_rate("empirical")
        # a sample holding one more spike on one side than the other lands on or past the boundary;
        # that has probability 0.357, above the 0.25 lower bound
        st["detail"] = f"failure rate {fail:.4f} over 10^4 trials (need >= 0.15; exact rate 0.357)"
        assert fail >= 0.15


def test_8_complexity_slopes():
    with criterion(8, "aggregation runtime scaling") as st:
        t0 = time.perf_counter()
        res = run_scaling_bench(sizes=(256, 1024, 4096), d=16, reps=5)
        windows = {"compute_winner": (1.8, 2.2), "minsum1": (1.3, 1.7), "fastgd": (0.9, 1.3)}
        st["detail"] = ", ".join(f"{k} {res.slopes[k]:.3f} in [{lo}, {hi}]" for k, (lo, hi) in windows.items())
        for k, (lo, hi) in windows.items():
            assert lo <= res.slopes[k] <= hi, (k, res.slopes[k])
        _budget(st, t0, 120)


def test_9_structural_invariants():
    with criterion(9, "structural invariants and determinism") as st:
        rng = np.random.default_rng(9)
        for _ in range(200):
            m, d = int(rng.integers(1, 120)), int(rng.integers(1, 6))
            P = rng.standard_t(1.5, size=(m, d))
            for depth in (0, 1, 2):
                out = minsum_select(P, depth)
                assert any(np.array_equal(out, p) for p in P)
            assert minsum_select(P, 0).tobytes() == compute_winner(P).tobytes()
            _, trace = fastgd(P)
            for j in range(1, trace.steps + 1):
                c = trace.iterates[j - 1]
                g = geo_median_gradient(c, P)
                u = g / np.linalg.norm(g)
                off = trace.iterates[j] - c
                assert np.linalg.norm(off - np.dot(off, u) * u) <= 1e-9 * max(1.0, np.linalg.norm(off))
        spec = {"instance": GAUSSIAN, "estimators": ["fastgd", {"method": "minsum", "depth": 1}, "gmom",
                                                      "empirical", "coordmed"],
                "eps": 0.5, "delta": 0.1, "trials": 30, "seed": 5}
        a, b = run_experiment(spec), run_experiment(dict(spec, workers=2))
        key = lambda rep: [(r.trial_id, r.estimator, r.samples, r.approx_ratio, r.success) for r in rep.records]
        assert key(a) == key(b)
        c1 = draw_candidate_means(PointSet(P), EstimatorConfig(eps=1, delta=0.1), RngStream(1, (2,)))
        c2 = draw_candidate_means(PointSet(P), EstimatorConfig(eps=1, delta=0.1), RngStream(1, (2,)))
        assert c1.means.tobytes() == c2.means.tobytes()
        st["detail"] = "membership, depth-0 identity, iterates on their lines, seeded runs bit-identical"
