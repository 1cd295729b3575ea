import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from meanest.core import (
    CostOracle,
    DomainError,
    PointSet,
    _select_inplace,
    approx_ratio,
    coordinate_median,
    cost,
    decomposition_check,
    is_eps_approx,
    mean,
    median_1d,
    pairwise_sum,
    select_kth,
)
from meanest.instances import gen_two_point_lb

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


@st.composite
def point_sets(draw, max_n=40, max_d=6):
    n = draw(st.integers(1, max_n))
    d = draw(st.integers(1, max_d))
    X = draw(hnp.arrays(np.float64, (n, d), elements=finite))
    c = draw(hnp.arrays(np.float64, (d,), elements=finite))
    return X, c


def test_mean_examples():
    assert mean(PointSet([[0.0], [2.0]])) == pytest.approx([1.0])
    np.testing.assert_array_equal(mean(PointSet([[3.0, 4.0]])), [3.0, 4.0])
    A = PointSet(np.r_[np.zeros(100), np.ones(50)])
    assert mean(A)[0] == pytest.approx(0.5 / 1.5, rel=1e-15)


def test_mean_of_empty_raises():
    with pytest.raises(DomainError):
        mean(np.empty((0, 2)))
    with pytest.raises(DomainError):
        PointSet(np.empty((0, 2)))


def test_pointset_rejects_nonfinite_and_is_read_only():
    with pytest.raises(DomainError):
        PointSet([[0.0, np.nan]])
    A = PointSet([[1.0, 2.0]])
    with pytest.raises(ValueError):
        A.points[0, 0] = 5.0


def test_pairwise_sum_beats_naive_accumulation():
    x = np.full(2**20 + 3, 0.1)
    exact = math.fsum(x)
    assert abs(pairwise_sum(x) - exact) <= 1e-12 * exact


def test_cost_examples():
    A = PointSet([[0.0], [2.0]])
    assert cost(A, [3.0]) == 10.0
    assert cost(A, [1.0]) == 2.0
    B, _ = gen_two_point_lb(100, 0.5)
    assert cost(B, mean(B)) == pytest.approx(100 / 3, rel=1e-12)


def test_cost_dimension_mismatch():
    with pytest.raises(DomainError):
        cost(PointSet([[0.0, 1.0]]), [1.0])
    with pytest.raises(DomainError):
        decomposition_check(PointSet([[0.0, 1.0]]), [1.0, 2.0, 3.0])


def test_decomposition_examples():
    A = PointSet([[0.0], [2.0]])
    assert decomposition_check(A, [3.0]) == (10.0, 10.0)
    lhs, rhs = decomposition_check(A, mean(A))
    assert lhs == rhs == 2.0


def test_decomposition_gaussian():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(200, 10))
    c = rng.normal(size=10) * 3
    lhs, rhs = decomposition_check(X, c)
    # independent evaluation of both sides with exact summation
    direct = math.fsum(math.fsum((x - c) ** 2) for x in X)
    mu = np.array([math.fsum(col) / 200 for col in X.T])
    other = math.fsum(math.fsum((x - mu) ** 2) for x in X) + 200 * math.fsum((mu - c) ** 2)
    assert lhs == pytest.approx(direct, rel=1e-12)
    assert rhs == pytest.approx(other, rel=1e-12)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, lhs)


@settings(max_examples=300, deadline=None)
@given(point_sets())
def test_decomposition_identity_property(data):
    X, c = data
    lhs, rhs = decomposition_check(X, c)
    assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))


@settings(max_examples=200, deadline=None)
@given(point_sets())
def test_mean_is_optimal(data):
    X, c = data
    best = cost(X, mean(X))
    assert best <= cost(X, c) * (1 + 1e-12) + 1e-9


def test_is_eps_approx_examples():
    A, oracle = gen_two_point_lb(100, 0.5)
    assert is_eps_approx(oracle, oracle.mean, 1e-6)
    # 0 costs exactly (1 + eps) * OPT: on the boundary, so not an approximation
    assert cost(A, [0.0]) == pytest.approx(1.5 * oracle.opt, rel=1e-14)
    assert not is_eps_approx(oracle, [0.0], 0.5)

    rng = np.random.default_rng(7)
    X = rng.normal(size=(3, 4))
    o = CostOracle.from_points(PointSet(X))
    u = np.ones(4) / 2.0
    c = o.mean + u * 2 * math.sqrt(0.3 * o.opt / o.n)
    assert not is_eps_approx(o, c, 0.3)


def test_is_eps_approx_singleton_zero_opt():
    o = CostOracle.from_points(PointSet([[1.5, -2.0]]))
    assert o.opt == 0
    assert is_eps_approx(o, [1.5, -2.0], 0.1)
    assert not is_eps_approx(o, [1.5, -1.9], 0.1)
    assert approx_ratio(o, [1.5, -2.0]) == 1.0


def test_is_eps_approx_rejects_bad_eps():
    o = CostOracle(mean=[0.0], opt=1.0, n=1)
    with pytest.raises(DomainError):
        is_eps_approx(o, [0.0], 0.0)


@settings(max_examples=300, deadline=None)
@given(point_sets(max_n=30, max_d=5), st.floats(1e-3, 10), st.floats(0, 3))
def test_is_eps_approx_matches_cost_criterion(data, eps, spread):
    X, _ = data
    A = PointSet(X)
    o = CostOracle.from_points(A)
    if o.opt < 1e-6:
        return
    rng = np.random.default_rng(abs(hash((X.tobytes(), eps))) % 2**32)
    v = rng.normal(size=A.d)
    c = o.mean + v / np.linalg.norm(v) * spread * math.sqrt(eps * o.opt / o.n)
    ratio = cost(A, c) / o.opt
    # stay clear of the boundary band, where both sides are within rounding
    if abs(ratio - (1 + eps)) <= 1e-7 * (1 + eps):
        return
    assert is_eps_approx(o, c, eps) == (ratio <= 1 + eps + 1e-9)
    assert approx_ratio(o, c) == pytest.approx(ratio, rel=1e-9)


def test_select_kth_examples():
    assert select_kth([5, 1, 3], 2) == 3
    assert select_kth([7], 1) == 7
    rng = np.random.default_rng(11)
    x = rng.uniform(size=1000)
    assert select_kth(x, 700) == np.sort(x)[699]


def test_select_kth_out_of_range():
    with pytest.raises(DomainError):
        select_kth([1.0, 2.0], 0)
    with pytest.raises(DomainError):
        select_kth([1.0, 2.0], 3)
    with pytest.raises(DomainError):
        select_kth([1.0, np.nan], 1)


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-1e9, 1e9, allow_nan=False), min_size=1, max_size=400), st.data())
def test_select_kth_matches_sort(values, data):
    k = data.draw(st.integers(1, len(values)))
    assert select_kth(values, k) == sorted(values)[k - 1]


@pytest.mark.parametrize("n", [17, 100, 1000, 10_000])
def test_select_kth_against_sort_long_inputs(n):
    rng = np.random.default_rng(n)
    for x in (rng.uniform(size=n), rng.integers(0, 5, size=n).astype(float), np.arange(n, 0, -1.0)):
        for k in (1, n // 3 + 1, (n + 1) // 2, n):
            assert select_kth(x, k) == np.sort(x)[k - 1]


def test_select_kth_does_not_mutate_input():
    x = np.array([3.0, 1.0, 2.0])
    select_kth(x, 1)
    np.testing.assert_array_equal(x, [3.0, 1.0, 2.0])


def _organ_pipe(n):
    half = np.arange(n // 2, dtype=float)
    return np.concatenate([half, half[::-1]])


@pytest.mark.parametrize("n", [1000, 4097])
def test_select_fallback_on_adversarial_input(n):
    # inputs where median-of-three pivots stall push selection onto the median-of-medians path
    for x in (_organ_pipe(n), np.tile([0.0, 1.0], n // 2), np.sort(np.random.default_rng(0).uniform(size=n))):
        a = x.copy()
        k = len(x) // 2
        assert _select_inplace(a, k) == np.sort(x)[k]


def test_median_1d_examples():
    assert median_1d([1, 2, 3]) == 2
    assert median_1d([1, 2, 3, 4]) == 2
    assert median_1d([4, 3, 2, 1]) == sorted([4, 3, 2, 1])[1]
    assert median_1d([5, 5, 5]) == 5
    with pytest.raises(DomainError):
        median_1d([])


def test_coordinate_median_examples():
    np.testing.assert_array_equal(coordinate_median([[0, 10], [10, 0], [5, 5]]), [5, 5])
    np.testing.assert_array_equal(coordinate_median([[1.5, -2.0, 3.0]]), [1.5, -2.0, 3.0])
    rng = np.random.default_rng(5)
    P = rng.normal(size=(9, 4))
    np.testing.assert_array_equal(coordinate_median(P), np.sort(P, axis=0)[4])


@settings(max_examples=100, deadline=None)
@given(hnp.arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(1, 5)), elements=finite), st.randoms())
def test_coordinate_median_permutation_invariant(X, rnd):
    perm = list(range(X.shape[0]))
    rnd.shuffle(perm)
    np.testing.assert_array_equal(coordinate_median(X), coordinate_median(X[perm]))
    k = (X.shape[0] + 1) // 2 - 1
    np.testing.assert_array_equal(coordinate_median(X), np.sort(X, axis=0)[k])
