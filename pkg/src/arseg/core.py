"""Domain types, series validation and AR(1) decorrelation.

Indexing follows the model convention: a series holds observations
``y_0..y_n``; the decorrelated series and every segment cost live on
indices ``1..n`` (stored at array positions ``0..n-1``), and a change-point
``t`` means that ``y_t`` is the last observation of its segment.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import InvalidConfig, NonFinite, TooShort

#: Below this distance from a unit root, means are not recovered from deltas.
UNIT_ROOT_GUARD = 1e-6


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Series:
    """Validated observations ``y_0..y_n``; use :func:`validate_series`."""

    values: np.ndarray

    @property
    def n(self) -> int:
        return len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class Segmentation:
    """Interior change-points ``0 < t_1 < ... < t_m < n``."""

    n: int
    changepoints: tuple[int, ...] = ()

    def __post_init__(self):
        cps = tuple(int(t) for t in self.changepoints)
        object.__setattr__(self, "changepoints", cps)
        prev = 0
        for t in cps:
            if not prev < t:
                raise InvalidConfig(f"change-points must be strictly increasing: {cps}")
            prev = t
        if cps and cps[-1] >= self.n:
            raise InvalidConfig(f"change-point {cps[-1]} not below n={self.n}")

    @property
    def m(self) -> int:
        return len(self.changepoints)

    @property
    def bounds(self) -> tuple[int, ...]:
        """Change-points with the sentinels ``0`` and ``n`` attached."""
        return (0, *self.changepoints, self.n)

    @property
    def lengths(self) -> list[int]:
        b = self.bounds
        return [b[k + 1] - b[k] for k in range(len(b) - 1)]

    @property
    def taus(self) -> list[float]:
        return [t / self.n for t in self.changepoints]


@dataclass(frozen=True, eq=False)
class DecorrelatedSeries:
    """``w_i = y_i - rho * y_{i-1}`` for ``i = 1..n``."""

    values: np.ndarray
    rho_used: float

    @property
    def n(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class FitResult:
    """An optimal segmentation with its per-segment intercepts.

    ``deltas`` are segment means of the decorrelated series; ``means`` are
    the recovered levels ``delta / (1 - rho)``, or ``None`` when ``rho`` is
    within :data:`UNIT_ROOT_GUARD` of one.
    """

    segmentation: Segmentation
    deltas: tuple[float, ...]
    ss: float
    rho: float = 0.0
    means: tuple[float, ...] | None = field(default=None)

    @property
    def m(self) -> int:
        return self.segmentation.m

    @property
    def changepoints(self) -> tuple[int, ...]:
        return self.segmentation.changepoints

    @property
    def means_suppressed(self) -> bool:
        return self.means is None

    def to_dict(self) -> dict:
        return {
            "n": self.segmentation.n,
            "changepoints": list(self.changepoints),
            "deltas": list(self.deltas),
            "means": None if self.means is None else list(self.means),
            "ss": self.ss,
            "rho": self.rho,
        }


def recover_means(deltas: Sequence[float], rho: float) -> tuple[float, ...] | None:
    if abs(1.0 - rho) < UNIT_ROOT_GUARD:
        return None
    return tuple(float(d) / (1.0 - rho) for d in deltas)


def fit_from_segmentation(w: DecorrelatedSeries, seg: Segmentation) -> FitResult:
    """Build a :class:`FitResult` for a given segmentation by direct recomputation."""
    if seg.n != w.n:
        raise InvalidConfig(f"segmentation n={seg.n} does not match series n={w.n}")
    b = seg.bounds
    deltas = []
    ss = 0.0
    for u, v in zip(b[:-1], b[1:]):
        chunk = w.values[u:v]
        d = float(np.mean(chunk))
        deltas.append(d)
        ss += float(np.sum((chunk - d) ** 2))
    return FitResult(
        segmentation=seg,
        deltas=tuple(deltas),
        ss=ss,
        rho=w.rho_used,
        means=recover_means(deltas, w.rho_used),
    )


def validate_series(raw: Iterable[float]) -> Series:
    """Check length and finiteness and wrap ``raw`` as a :class:`Series`.

    Raises
    ------
    TooShort
        Fewer than three values.
    NonFinite
        A NaN or infinite entry; the first offending index is reported.
    """
    arr = np.asarray(list(raw) if not isinstance(raw, np.ndarray) else raw, dtype=float)
    if arr.ndim != 1:
        raise InvalidConfig("series must be one-dimensional")
    if arr.size < 3:
        raise TooShort(f"need at least 3 observations, got {arr.size}")
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise NonFinite(bad[0], arr[bad[0]])
    return Series(_frozen(arr))


def decorrelate(series: Series, rho: float) -> DecorrelatedSeries:
    """Remove the AR(1) dependence: ``w_i = y_i - rho * y_{i-1}``."""
    rho = float(rho)
    if not math.isfinite(rho):
        raise InvalidConfig(f"rho must be finite, got {rho}")
    y = series.values
    return DecorrelatedSeries(_frozen(y[1:] - rho * y[:-1]), rho)


def _parse_float(token: str) -> float | None:
    try:
        return float(token)
    except ValueError:
        return None


def parse_series_text(text: str) -> Series:
    """Parse one value per line; a leading non-numeric header line is skipped.

    Lines may be CSV rows, in which case the first column is used. Blank
    lines are ignored.
    """
    values = []
    first = True
    for lineno, line in enumerate(io.StringIO(text), start=1):
        token = line.strip().split(",")[0].strip()
        if not token:
            continue
        x = _parse_float(token)
        if x is None:
            if first:
                first = False
                continue
            raise InvalidConfig(f"line {lineno}: not a number: {token!r}")
        first = False
        values.append(x)
    return validate_series(values)


def read_series(path) -> Series:
    return parse_series_text(Path(path).read_text())


def format_series(values: Iterable[float]) -> str:
    return "".join(f"{float(v)!r}\n" for v in values)
