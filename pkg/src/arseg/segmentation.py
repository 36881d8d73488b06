"""Exact least-squares segmentation of a decorrelated series.

For a fixed number of change-points the objective is the within-segment
residual sum of squares. It is additive over segments, so dynamic
programming over the full ``(n+1) x (n+1)`` cost table returns the global
optimum for every ``m = 0..m_max`` in one pass.

Ties are broken towards the smallest change-point at each backtracking
step (``argmin`` returns the first minimiser).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DecorrelatedSeries, FitResult, Segmentation, recover_means
from .errors import IndexOutOfRange, InfeasibleConstraints, InvalidConfig


@dataclass(frozen=True)
class SegmentationConstraints:
    min_segment_length: int = 1
    m_max: int = 0

    def __post_init__(self):
        if self.min_segment_length < 1:
            raise InvalidConfig("min_segment_length must be positive")
        if self.m_max < 0:
            raise InvalidConfig("m_max must be nonnegative")

    def check(self, n: int, m: int | None = None) -> None:
        m = self.m_max if m is None else m
        if (m + 1) * self.min_segment_length > n:
            raise InfeasibleConstraints(
                f"{m + 1} segments of length >= {self.min_segment_length} do not fit in n={n}"
            )


def default_m_max(n: int) -> int:
    return max(0, min(75, n // 2 - 1))


@dataclass(frozen=True, eq=False)
class CostMatrix:
    """Prefix sums of ``w`` and ``w**2``, centred for numerical stability."""

    prefix_sum: np.ndarray
    prefix_sumsq: np.ndarray

    @classmethod
    def from_values(cls, w) -> "CostMatrix":
        w = np.asarray(w, dtype=float)
        # segment costs are shift invariant; centring keeps the cancellation small
        c = w - w.mean() if w.size else w
        s = np.concatenate(([0.0], np.cumsum(c)))
        s2 = np.concatenate(([0.0], np.cumsum(c * c)))
        return cls(s, s2)

    @property
    def n(self) -> int:
        return len(self.prefix_sum) - 1

    def table(self, min_segment_length: int = 1) -> np.ndarray:
        """Full cost table ``C[u, v]``; entries with ``v - u < min_len`` are ``inf``."""
        s, s2 = self.prefix_sum, self.prefix_sumsq
        length = np.subtract.outer(np.arange(self.n + 1), np.arange(self.n + 1)).T
        valid = length >= min_segment_length
        with np.errstate(divide="ignore", invalid="ignore"):
            seg_sum = s[None, :] - s[:, None]
            cost = (s2[None, :] - s2[:, None]) - seg_sum * seg_sum / length
        cost = np.maximum(cost, 0.0)
        cost[~valid] = np.inf
        return cost


def segment_cost(cm: CostMatrix, u: int, v: int) -> float:
    """Least-squares cost of fitting one constant to ``w_{u+1..v}``."""
    if not 0 <= u < v <= cm.n:
        raise IndexOutOfRange(f"need 0 <= u < v <= {cm.n}, got ({u}, {v})")
    seg = cm.prefix_sum[v] - cm.prefix_sum[u]
    cost = (cm.prefix_sumsq[v] - cm.prefix_sumsq[u]) - seg * seg / (v - u)
    return max(float(cost), 0.0)


def _as_values(w) -> tuple[np.ndarray, float]:
    if isinstance(w, DecorrelatedSeries):
        return w.values, w.rho_used
    return np.asarray(w, dtype=float), 0.0


def dp_table(cost: np.ndarray, m_max: int):
    """Optimal cost rows ``D[m, v]`` and back-pointers ``B[m, v]`` for an additive cost table.

    ``cost[u, v]`` is the cost of segment ``u+1..v`` (``inf`` if not allowed).
    """
    n = cost.shape[0] - 1
    D = np.full((m_max + 1, n + 1), np.inf)
    B = np.zeros((m_max + 1, n + 1), dtype=np.int64)
    D[0] = cost[0]
    for m in range(1, m_max + 1):
        total = D[m - 1][:, None] + cost
        arg = np.argmin(total, axis=0)
        B[m] = arg
        D[m] = total[arg, np.arange(n + 1)]
    return D, B


def _dp(values: np.ndarray, m_max: int, min_len: int):
    return dp_table(CostMatrix.from_values(values).table(min_len), m_max)


def backtrack(B: np.ndarray, m: int, n: int) -> tuple[int, ...]:
    cps = []
    v = n
    for k in range(m, 0, -1):
        v = int(B[k, v])
        cps.append(v)
    return tuple(reversed(cps))


def _fit(values: np.ndarray, rho: float, cps: tuple[int, ...], ss: float) -> FitResult:
    seg = Segmentation(values.size, cps)
    b = seg.bounds
    deltas = tuple(float(np.mean(values[u:v])) for u, v in zip(b[:-1], b[1:]))
    return FitResult(
        segmentation=seg,
        deltas=deltas,
        ss=float(ss),
        rho=rho,
        means=recover_means(deltas, rho),
    )


def dp_segment_all(w, constraints: SegmentationConstraints) -> list[FitResult]:
    """Optimal fits for every ``m`` in ``0..constraints.m_max``."""
    values, rho = _as_values(w)
    n = values.size
    constraints.check(n)
    D, B = _dp(values, constraints.m_max, constraints.min_segment_length)
    return [
        _fit(values, rho, backtrack(B, m, n), D[m, n]) for m in range(constraints.m_max + 1)
    ]


def dp_segment(w, m: int, constraints: SegmentationConstraints | None = None) -> FitResult:
    """Optimal fit with exactly ``m`` change-points."""
    min_len = 1 if constraints is None else constraints.min_segment_length
    return dp_segment_all(w, SegmentationConstraints(min_len, m))[m]
