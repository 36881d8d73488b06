import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from arseg.core import DecorrelatedSeries
from arseg.errors import IndexOutOfRange, InfeasibleConstraints, InvalidConfig
from arseg.segmentation import (
    CostMatrix,
    SegmentationConstraints,
    default_m_max,
    dp_segment,
    dp_segment_all,
    segment_cost,
)

from oracles import brute_force_segment, direct_ss

finite = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize(
    "w, u, v, expected",
    [([1, 2, 3], 0, 3, 2.0), ([0, 0, 4, 4], 0, 4, 16.0), ([5, -2, 7], 1, 2, 0.0)],
)
def test_segment_cost_examples(w, u, v, expected):
    assert segment_cost(CostMatrix.from_values(w), u, v) == expected


@pytest.mark.parametrize("u, v", [(-1, 2), (2, 2), (0, 4), (3, 1)])
def test_segment_cost_bounds(u, v):
    with pytest.raises(IndexOutOfRange):
        segment_cost(CostMatrix.from_values([1.0, 2.0, 3.0]), u, v)


@given(st.lists(finite, min_size=1, max_size=30), st.data())
def test_segment_cost_nonnegative_and_direct(w, data):
    cm = CostMatrix.from_values(w)
    u = data.draw(st.integers(0, len(w) - 1))
    v = data.draw(st.integers(u + 1, len(w)))
    c = segment_cost(cm, u, v)
    assert c >= 0.0
    seg = np.asarray(w[u:v])
    assert c == pytest.approx(float(np.sum((seg - seg.mean()) ** 2)), rel=1e-9, abs=1e-7)


def test_constraints_validation():
    with pytest.raises(InvalidConfig):
        SegmentationConstraints(min_segment_length=0)
    with pytest.raises(InvalidConfig):
        SegmentationConstraints(m_max=-1)


@pytest.mark.parametrize("n, expected", [(2, 0), (10, 4), (160, 75), (1600, 75)])
def test_default_m_max(n, expected):
    assert default_m_max(n) == expected


def test_two_level_split():
    fit = dp_segment(DecorrelatedSeries(np.array([0, 0, 0, 4, 4, 4.0]), 0.0), 1)
    assert fit.changepoints == (3,)
    assert fit.ss == 0.0
    assert fit.deltas == (0.0, 4.0)


def test_m_zero_is_whole_segment():
    w = np.random.default_rng(0).normal(size=20)
    fit = dp_segment(w, 0)
    assert fit.changepoints == ()
    assert fit.ss == segment_cost(CostMatrix.from_values(w), 0, 20)


def test_all_zero_attained_and_preserved():
    fits = dp_segment_all(np.array([0, 0, 0, 4, 4, 4.0]), SegmentationConstraints(1, 2))
    assert fits[1].ss == 0.0 and fits[2].ss == 0.0


def test_brute_force_200_instances():
    rng = np.random.default_rng(2024)
    for _ in range(200):
        n = int(rng.integers(8, 17))
        m = int(rng.integers(1, 4))
        w = rng.normal(size=n) + rng.integers(0, 3, size=n)
        fit = dp_segment(w, m)
        best, cps = brute_force_segment(w, m)
        assert fit.ss == pytest.approx(best, rel=1e-10, abs=1e-12)
        assert fit.changepoints == cps


def test_all_m_vs_brute_force_n12():
    rng = np.random.default_rng(7)
    for _ in range(20):
        w = rng.normal(size=12)
        fits = dp_segment_all(w, SegmentationConstraints(1, 3))
        for m, fit in enumerate(fits):
            assert fit.ss == pytest.approx(brute_force_segment(w, m)[0], rel=1e-10, abs=1e-12)


@pytest.mark.parametrize("min_len", [2, 3])
def test_min_segment_length_vs_brute_force(min_len):
    rng = np.random.default_rng(min_len)
    for _ in range(30):
        w = rng.normal(size=13)
        for m in range(1, 4):
            fit = dp_segment(w, m, SegmentationConstraints(min_len, m))
            best, cps = brute_force_segment(w, m, min_len)
            assert fit.ss == pytest.approx(best, rel=1e-10, abs=1e-12)
            assert fit.changepoints == cps
            assert min(fit.segmentation.lengths) >= min_len


def test_ties_prefer_smallest_last_changepoint():
    # every split of a constant series costs zero
    fit = dp_segment(np.zeros(8), 2)
    assert fit.changepoints == (1, 2)
    w = np.array([0, 1, 0, 1, 0, 1.0])
    for m in range(1, 4):
        assert dp_segment(w, m).changepoints == brute_force_segment(w, m)[1]


@given(st.lists(st.integers(-3, 3).map(float), min_size=6, max_size=11), st.integers(1, 3))
@settings(max_examples=80, deadline=None)
def test_integer_data_optimal(w, m):
    # mathematically tied costs may round apart, so only the optimum is compared
    fit = dp_segment(np.array(w), m)
    best = brute_force_segment(w, m)[0]
    assert fit.ss == pytest.approx(best, rel=1e-10, abs=1e-10)
    assert direct_ss(w, fit.changepoints) == pytest.approx(best, rel=1e-10, abs=1e-10)


def test_infeasible():
    with pytest.raises(InfeasibleConstraints):
        dp_segment(np.zeros(6), 2, SegmentationConstraints(3, 2))
    with pytest.raises(InfeasibleConstraints):
        dp_segment_all(np.zeros(6), SegmentationConstraints(2, 3))


def test_all_agrees_with_single():
    w = np.random.default_rng(11).normal(size=40)
    fits = dp_segment_all(w, SegmentationConstraints(1, 6))
    for m, fit in enumerate(fits):
        single = dp_segment(w, m)
        assert fit.changepoints == single.changepoints
        assert fit.ss == single.ss


@given(st.lists(finite, min_size=4, max_size=40), st.integers(0, 5))
@settings(max_examples=100, deadline=None)
def test_monotone_ss(w, m_max):
    m_max = min(m_max, len(w) - 1)
    ss = [f.ss for f in dp_segment_all(np.array(w), SegmentationConstraints(1, m_max))]
    assert all(b <= a + 1e-9 * max(1.0, abs(a)) for a, b in zip(ss, ss[1:]))


@given(st.integers(0, 10_000), st.floats(-100, 100), st.integers(1, 4))
@settings(max_examples=60, deadline=None)
def test_shift_covariance(seed, c, m):
    rng = np.random.default_rng(seed)
    w = rng.normal(size=25) + np.repeat(rng.normal(scale=3, size=5), 5)
    a, b = dp_segment(w, m), dp_segment(w + c, m)
    assert a.changepoints == b.changepoints
    np.testing.assert_allclose(np.array(b.deltas) - c, a.deltas, atol=1e-9)


@given(st.lists(finite, min_size=5, max_size=40), st.integers(0, 4))
@settings(max_examples=100, deadline=None)
def test_reconstruction(w, m):
    m = min(m, len(w) - 1)
    fit = dp_segment(np.array(w), m)
    assert fit.ss == pytest.approx(direct_ss(w, fit.changepoints), rel=1e-10, abs=1e-8)
    lengths = fit.segmentation.lengths
    starts = np.concatenate(([0], np.cumsum(lengths)[:-1]))
    for d, s, k in zip(fit.deltas, starts, lengths):
        assert d == pytest.approx(np.mean(w[s:s + k]), rel=1e-9, abs=1e-9)


def test_rho_is_carried():
    w = DecorrelatedSeries(np.arange(10.0), 0.25)
    assert dp_segment(w, 1).rho == 0.25
