"""Post-processing, Hausdorff scoring and residual diagnostics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import stats

from .core import UNIT_ROOT_GUARD, FitResult, Segmentation, Series, decorrelate
from .errors import DegenerateResiduals, InvalidConfig


def postprocess(seg: Segmentation) -> Segmentation:
    """Drop the trailing member of each isolated adjacent change-point pair.

    Decorrelating a mean shift leaves a one-sample spike, so the estimate
    often contains ``t, t+1``. A change-point is removed when it directly
    follows its predecessor and is not itself directly followed by another
    one. Both conditions are read off the input, in a single pass.
    """
    b = seg.bounds
    keep = [
        b[i]
        for i in range(1, len(b) - 1)
        if not (b[i] == b[i - 1] + 1 and b[i + 1] != b[i] + 1)
    ]
    return Segmentation(seg.n, tuple(keep))


def has_adjacent_pair(seg: Segmentation) -> bool:
    cps = seg.changepoints
    return any(b - a == 1 for a, b in zip(cps[:-1], cps[1:]))


@dataclass(frozen=True)
class HausdorffResult:
    d1: float
    d2: float

    @property
    def d(self) -> float:
        return max(self.d1, self.d2)

    def to_dict(self) -> dict:
        return {"d1": self.d1, "d2": self.d2, "d": self.d}


def _directed(src: np.ndarray, dst: np.ndarray) -> float:
    return float(np.max(np.min(np.abs(src[:, None] - dst[None, :]), axis=1)))


def hausdorff(true_taus: Iterable[float], est_taus: Iterable[float]) -> HausdorffResult:
    """Directed Hausdorff distances in fraction-of-length units.

    ``d1`` is the worst distance from an estimated point to the truth,
    ``d2`` the worst distance from a true point to the estimate. Both sets
    are augmented with the boundaries 0 and 1, so empty sets are allowed.
    """
    a = np.unique(np.concatenate(([0.0, 1.0], np.asarray(list(true_taus), dtype=float))))
    b = np.unique(np.concatenate(([0.0, 1.0], np.asarray(list(est_taus), dtype=float))))
    return HausdorffResult(d1=_directed(b, a), d2=_directed(a, b))


@dataclass(frozen=True)
class DiagnosticsReport:
    ljung_box_stat: float
    ljung_box_lags: int
    ljung_box_pvalue: float
    jarque_bera_stat: float
    jarque_bera_pvalue: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def fit_residuals(series: Series, fit: FitResult, rho: float) -> np.ndarray:
    """Decorrelated residuals of the series around the fitted piecewise means.

    The fitted levels are subtracted from ``y`` before decorrelating, so the
    boundary samples are compared with ``mu_k - rho * mu_{k-1}`` rather than
    with a segment intercept. Inside a segment this equals ``w_i - delta_k``.
    When the means are suppressed near a unit root, ``w_i - delta_k`` is used
    throughout.
    """
    if fit.segmentation.n != series.n:
        raise InvalidConfig("fit does not match the series length")
    lengths = np.diff(fit.segmentation.bounds)
    if fit.means is None or abs(1.0 - rho) < UNIT_ROOT_GUARD:
        w = decorrelate(series, rho).values
        return w - np.repeat(np.asarray(fit.deltas), lengths)
    means = np.asarray(fit.deltas) / (1.0 - rho)
    level = np.concatenate((means[:1], np.repeat(means, lengths)))
    z = series.values - level
    return z[1:] - rho * z[:-1]


def ljung_box(resid: np.ndarray, lags: int) -> tuple[float, float]:
    n = resid.size
    e = resid - resid.mean()
    denom = float(e @ e)
    h = np.arange(1, lags + 1)
    acf = np.array([e[k:] @ e[:-k] for k in h]) / denom
    stat = float(n * (n + 2) * np.sum(acf**2 / (n - h)))
    return stat, float(stats.chi2.sf(stat, lags))


def jarque_bera(resid: np.ndarray) -> tuple[float, float]:
    n = resid.size
    e = resid - resid.mean()
    m2 = np.mean(e**2)
    skew = np.mean(e**3) / m2**1.5
    kurt = np.mean(e**4) / m2**2
    stat = float(n / 6.0 * (skew**2 + (kurt - 3.0) ** 2 / 4.0))
    return stat, float(stats.chi2.sf(stat, 2))


def residual_diagnostics(series: Series, fit: FitResult, rho: float, lags: int = 20) -> DiagnosticsReport:
    """Ljung-Box and Jarque-Bera tests on the decorrelated residuals."""
    resid = fit_residuals(series, fit, rho)
    if lags < 1 or lags >= resid.size / 2:
        raise InvalidConfig(f"lags must be in [1, n/2), got {lags}")
    if np.var(resid) < 1e-12:
        raise DegenerateResiduals("residual variance is numerically zero")
    lb, lb_p = ljung_box(resid, lags)
    jb, jb_p = jarque_bera(resid)
    return DiagnosticsReport(lb, lags, lb_p, jb, jb_p)
