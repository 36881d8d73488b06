"""Quasi-likelihood baseline with all AR(1) parameters free in each segment.

Each segment gets its own intercept, AR coefficient and innovation
variance. Profiling out the parameters leaves
``(v - u) * log(RSS / (v - u)) + (v - u)`` per segment, which is additive,
so the same exact dynamic programme applies.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Segmentation, Series
from .errors import DegenerateRegressor, IndexOutOfRange, InfeasibleConstraints
from .segmentation import backtrack, dp_table

VARIANCE_FLOOR = 1e-12
# relative size below which the lagged regressor counts as constant
_REGRESSOR_TOL = 1e-12


@dataclass(frozen=True)
class BardetSegmentFit:
    rho_k: float
    delta_k: float
    sigma2_k: float
    cost: float


def _profiled(k: int, rss: float) -> tuple[float, float]:
    sigma2 = max(rss / k, VARIANCE_FLOOR)
    return sigma2, k * math.log(sigma2) + k


def bardet_segment_cost(series: Series, u: int, v: int) -> BardetSegmentFit:
    """OLS of ``y_i`` on ``(1, y_{i-1})`` over ``i = u+1..v`` and its profiled cost."""
    n = series.n
    if not 0 <= u < v <= n:
        raise IndexOutOfRange(f"need 0 <= u < v <= {n}, got ({u}, {v})")
    if v - u < 3:
        raise IndexOutOfRange("segments need at least 3 points")
    y = series.values
    x, z = y[u:v], y[u + 1 : v + 1]
    xc, zc = x - x.mean(), z - z.mean()
    sxx = float(xc @ xc)
    if sxx <= _REGRESSOR_TOL * max(float(x @ x), np.finfo(float).tiny):
        raise DegenerateRegressor(f"lagged values are constant on ({u}, {v}]")
    rho = float(xc @ zc) / sxx
    delta = float(z.mean() - rho * x.mean())
    resid = zc - rho * xc
    sigma2, cost = _profiled(v - u, float(resid @ resid))
    return BardetSegmentFit(rho, delta, sigma2, cost)


def bardet_cost_table(series: Series, min_len: int = 3) -> np.ndarray:
    """Profiled costs ``C[u, v]`` for every segment; disallowed entries are ``inf``."""
    y = series.values
    n = series.n
    cost = np.full((n + 1, n + 1), np.inf)
    for u in range(0, n - min_len + 1):
        # shift by the first lagged value to limit cancellation in the running sums
        x = y[u:n] - y[u]
        z = y[u + 1 : n + 1] - y[u]
        k = np.arange(1, n - u + 1, dtype=float)
        sx, sz = np.cumsum(x), np.cumsum(z)
        sxx = np.cumsum(x * x) - sx * sx / k
        szz = np.cumsum(z * z) - sz * sz / k
        sxz = np.cumsum(x * z) - sx * sz / k
        ok = (k >= min_len) & (sxx > _REGRESSOR_TOL * np.maximum(np.cumsum(x * x), np.finfo(float).tiny))
        with np.errstate(divide="ignore", invalid="ignore"):
            rss = np.where(ok, szz - sxz * sxz / sxx, np.nan)
        sigma2 = np.maximum(rss / k, VARIANCE_FLOOR)
        row = np.where(ok, k * np.log(sigma2) + k, np.inf)
        cost[u, u + 1 :] = row
    return cost


def bardet_segment(series: Series, m: int, min_len: int = 3) -> Segmentation:
    """Exact minimiser of the summed profiled costs with ``m`` change-points."""
    n = series.n
    if min_len < 3:
        raise InfeasibleConstraints("min_len must be at least 3")
    if (m + 1) * min_len > n:
        raise InfeasibleConstraints(f"{m + 1} segments of length >= {min_len} do not fit in n={n}")
    D, B = dp_table(bardet_cost_table(series, min_len), m)
    if not math.isfinite(D[m, n]):
        raise InfeasibleConstraints("no admissible segmentation has finite cost")
    return Segmentation(n, backtrack(B, m, n))


def bardet_total_cost(series: Series, seg: Segmentation) -> float:
    b = seg.bounds
    return sum(bardet_segment_cost(series, u, v).cost for u, v in zip(b[:-1], b[1:]))
