"""Choosing the number of change-points from a sequence of optimal fits."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from scipy.special import gammaln

from .core import FitResult
from .errors import AllDegenerate, EmptyFits, InvalidConfig, ZeroSS

#: Fits whose residual sum of squares is at or below this are interpolating.
SS_FLOOR = 1e-12


class Criterion(str, enum.Enum):
    PENALIZED_BETA = "PenalizedBeta"
    MBIC = "MBIC"


@dataclass(frozen=True)
class PenaltyConfig:
    """Penalty ``beta_n`` per change-point, either explicit or ``n**-beta_exponent``."""

    beta_exponent: float | None = 0.25
    beta_n: float | None = None

    def __post_init__(self):
        if self.beta_n is None:
            if self.beta_exponent is None or not 0.0 < self.beta_exponent < 0.5:
                raise InvalidConfig("beta_exponent must lie in (0, 0.5)")
        elif self.beta_n < 0.0:
            raise InvalidConfig("beta_n must be nonnegative")

    def value(self, n: int) -> float:
        if self.beta_n is not None:
            return float(self.beta_n)
        return float(n) ** (-self.beta_exponent)


@dataclass(frozen=True, eq=False)
class SelectionTrace:
    criterion_values: tuple[float, ...]
    chosen_m: int
    chosen_fit: FitResult
    criterion: Criterion

    def summary(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "chosen_m": self.chosen_m,
            "criterion_values": [v if math.isfinite(v) else None for v in self.criterion_values],
        }


def select_beta(fits: Sequence[FitResult], n: int, cfg: PenaltyConfig | None = None) -> SelectionTrace:
    """Minimise ``SS_m / n + beta_n * m``; ties go to the smaller ``m``."""
    if not fits:
        raise EmptyFits("no fits to select from")
    beta = (cfg or PenaltyConfig()).value(n)
    values = tuple(fit.ss / n + beta * m for m, fit in enumerate(fits))
    best = min(range(len(values)), key=lambda m: (values[m], m))
    return SelectionTrace(values, best, fits[best], Criterion.PENALIZED_BETA)


def mbic_score(fit: FitResult, n: int, m: int | None = None) -> float:
    """Modified BIC of a fit with ``m`` change-points on ``n`` points.

    ``-(n-m+1)/2 log SS + log Gamma((n-m+1)/2) - 1/2 sum_k log n_k - m log n``
    """
    m = fit.m if m is None else m
    if fit.ss <= 0.0:
        raise ZeroSS("mBIC is undefined for a zero residual sum of squares")
    lengths = fit.segmentation.lengths
    if len(lengths) != m + 1 or min(lengths) < 1:
        raise InvalidConfig("segment lengths inconsistent with m")
    half = (n - m + 1) / 2.0
    return float(
        -half * math.log(fit.ss)
        + gammaln(half)
        - 0.5 * sum(math.log(nk) for nk in lengths)
        - m * math.log(n)
    )


def select_mbic(fits: Sequence[FitResult], n: int) -> SelectionTrace:
    """Maximise the modified BIC; degenerate fits score ``-inf``."""
    if not fits:
        raise EmptyFits("no fits to select from")
    values = tuple(
        mbic_score(fit, n, m) if fit.ss > SS_FLOOR else -math.inf for m, fit in enumerate(fits)
    )
    if all(v == -math.inf for v in values):
        raise AllDegenerate("every fit has a zero residual sum of squares")
    best = max(range(len(values)), key=lambda m: (values[m], -m))
    return SelectionTrace(values, best, fits[best], Criterion.MBIC)


def parse_criterion(text: str) -> tuple[Criterion, PenaltyConfig | None]:
    """Parse ``mbic`` or ``beta:<exponent>``."""
    text = text.strip().lower()
    if text == "mbic":
        return Criterion.MBIC, None
    if text == "beta" or text.startswith("beta:"):
        exp = text.partition(":")[2]
        try:
            value = float(exp) if exp else 0.25
        except ValueError:
            raise InvalidConfig(f"bad beta exponent in {text!r}") from None
        return Criterion.PENALIZED_BETA, PenaltyConfig(value)
    raise InvalidConfig(f"unknown criterion {text!r}")


def select(fits, n, criterion=Criterion.MBIC, penalty=None) -> SelectionTrace:
    if criterion == Criterion.MBIC:
        return select_mbic(fits, n)
    return select_beta(fits, n, penalty)
