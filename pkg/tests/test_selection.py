import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arseg.core import DecorrelatedSeries, FitResult, Segmentation
from arseg.errors import AllDegenerate, EmptyFits, InvalidConfig, ZeroSS
from arseg.segmentation import SegmentationConstraints, dp_segment_all
from arseg.selection import (
    Criterion,
    PenaltyConfig,
    mbic_score,
    parse_criterion,
    select,
    select_beta,
    select_mbic,
)

from oracles import mbic_mpmath

# frozen from the mpmath oracle (50 digits)
MBIC_N30_SS4_M1 = -1.692030819563915659055482


def _fit(n, cps, ss):
    seg = Segmentation(n, tuple(cps))
    return FitResult(seg, tuple(0.0 for _ in range(seg.m + 1)), ss)


def _fits(ss, n=100):
    return [_fit(n, tuple(range(1, m + 1)), s) for m, s in enumerate(ss)]


def test_beta_worked_example():
    trace = select_beta(_fits([10, 2, 1.9, 1.89]), 100, PenaltyConfig(beta_n=0.05))
    np.testing.assert_allclose(trace.criterion_values, [0.1, 0.07, 0.119, 0.1689], rtol=1e-12)
    assert trace.chosen_m == 1
    assert trace.criterion is Criterion.PENALIZED_BETA


def test_beta_huge_penalty():
    assert select_beta(_fits([10, 2, 1.9, 1.89]), 100, PenaltyConfig(beta_n=1e9)).chosen_m == 0


def test_beta_zero_penalty_ties_to_smaller_m():
    assert select_beta(_fits([10, 2, 1.9, 1.89]), 100, PenaltyConfig(beta_n=0.0)).chosen_m == 3
    assert select_beta(_fits([10, 2, 2, 2]), 100, PenaltyConfig(beta_n=0.0)).chosen_m == 1


def test_beta_default_exponent():
    cfg = PenaltyConfig()
    assert cfg.beta_exponent == 0.25
    assert cfg.value(10_000) == pytest.approx(0.1)


@pytest.mark.parametrize("kwargs", [{"beta_exponent": 0.0}, {"beta_exponent": 0.5}, {"beta_n": -1.0}])
def test_penalty_config_validation(kwargs):
    with pytest.raises(InvalidConfig):
        PenaltyConfig(**kwargs)


def test_empty_fits():
    with pytest.raises(EmptyFits):
        select_beta([], 10)
    with pytest.raises(EmptyFits):
        select_mbic([], 10)


@given(st.lists(st.floats(0, 1e3), min_size=1, max_size=10), st.floats(0, 1), st.floats(0, 1))
def test_beta_monotone_in_penalty(ss, b1, b2):
    ss = sorted(ss, reverse=True)
    lo, hi = sorted((b1, b2))
    fits = _fits(ss, n=50)
    m_lo = select_beta(fits, 50, PenaltyConfig(beta_n=lo)).chosen_m
    m_hi = select_beta(fits, 50, PenaltyConfig(beta_n=hi)).chosen_m
    assert m_hi <= m_lo


def test_mbic_frozen_oracle():
    fit = _fit(30, (12,), 4.0)
    assert mbic_mpmath(4.0, 30, 1, (12, 18)) == pytest.approx(MBIC_N30_SS4_M1, rel=1e-15)
    assert mbic_score(fit, 30) == pytest.approx(MBIC_N30_SS4_M1, rel=1e-12)


def test_mbic_m0_specialisation():
    n, ss = 50, 7.5
    expected = -(n + 1) / 2 * math.log(ss) + math.lgamma((n + 1) / 2) - 0.5 * math.log(n)
    assert mbic_score(_fit(n, (), ss), n) == pytest.approx(expected, rel=1e-13)


@given(st.integers(10, 500), st.floats(1e-3, 1e4), st.data())
def test_mbic_matches_mpmath(n, ss, data):
    m = data.draw(st.integers(0, min(5, n - 1)))
    cps = sorted(data.draw(st.sets(st.integers(1, n - 1), min_size=m, max_size=m)))
    fit = _fit(n, cps, ss)
    assert mbic_score(fit, n) == pytest.approx(mbic_mpmath(ss, n, m, fit.segmentation.lengths), rel=1e-11, abs=1e-9)


def test_mbic_bit_identical():
    fit = _fit(40, (10, 25), 3.3)
    assert mbic_score(fit, 40) == mbic_score(fit, 40)


def test_mbic_zero_ss():
    with pytest.raises(ZeroSS):
        mbic_score(_fit(10, (5,), 0.0), 10)


def test_select_mbic_single_fit():
    assert select_mbic([_fit(20, (), 3.0)], 20).chosen_m == 0


def test_select_mbic_argmax():
    fits = [_fit(100, (), 100.0), _fit(100, (50,), 50.0), _fit(100, (30, 60), 1.0), _fit(100, (30, 60, 61), 0.99)]
    values = [mbic_score(f, 100) for f in fits]
    assert int(np.argmax(values)) == 2
    assert select_mbic(fits, 100).chosen_m == 2


def test_select_mbic_skips_degenerate():
    fits = [_fit(10, (), 5.0), _fit(10, (5,), 0.0)]
    trace = select_mbic(fits, 10)
    assert trace.chosen_m == 0
    assert trace.criterion_values[1] == -math.inf
    assert trace.summary()["criterion_values"][1] is None


def test_select_mbic_all_degenerate():
    with pytest.raises(AllDegenerate):
        select_mbic([_fit(10, (), 0.0), _fit(10, (5,), 1e-13)], 10)


def test_plug_in_identity():
    rng = np.random.default_rng(5)
    y = rng.normal(size=61)
    rho = 0.4
    w = DecorrelatedSeries(y[1:] - rho * y[:-1], rho)
    fits = dp_segment_all(w, SegmentationConstraints(1, 4))
    for m, fit in enumerate(fits):
        direct = mbic_mpmath(fit.ss, 60, m, fit.segmentation.lengths)
        assert mbic_score(fit, 60) == pytest.approx(direct, rel=1e-11)


@pytest.mark.parametrize(
    "text, criterion, beta",
    [("mbic", Criterion.MBIC, None), ("MBIC", Criterion.MBIC, None), ("beta", Criterion.PENALIZED_BETA, 0.25), ("beta:0.3", Criterion.PENALIZED_BETA, 0.3)],
)
def test_parse_criterion(text, criterion, beta):
    c, p = parse_criterion(text)
    assert c is criterion
    assert (p.beta_exponent if p else None) == beta


@pytest.mark.parametrize("text", ["aic", "betas", "beta:0.7", "beta:x"])
def test_parse_criterion_errors(text):
    with pytest.raises(InvalidConfig):
        parse_criterion(text)


def test_select_dispatch():
    fits = _fits([10, 2, 1.9, 1.89])
    assert select(fits, 100, Criterion.PENALIZED_BETA, PenaltyConfig(beta_n=0.05)).chosen_m == 1
    assert select(fits, 100).criterion is Criterion.MBIC
