"""End-to-end detection: estimate rho, decorrelate, segment, select, post-process."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .core import FitResult, Series, decorrelate, fit_from_segmentation
from .errors import InvalidConfig
from .evaluation import DiagnosticsReport, postprocess, residual_diagnostics
from .robust_rho import (
    RhoEstimate,
    estimate_rho_cauchy,
    estimate_rho_mg,
    estimate_rho_tilde,
    fixed_rho,
)
from .segmentation import SegmentationConstraints, default_m_max, dp_segment_all
from .selection import Criterion, PenaltyConfig, SelectionTrace, select


def estimate_rho(series: Series, method: str) -> RhoEstimate:
    """Dispatch on ``robust``, ``mg``, ``cauchy``, ``zero`` or ``fixed:<rho>``."""
    method = method.strip().lower()
    if method == "robust":
        return estimate_rho_tilde(series)
    if method == "mg":
        return estimate_rho_mg(series)
    if method == "cauchy":
        return estimate_rho_cauchy(series)
    if method == "zero":
        return fixed_rho(0.0)
    if method.startswith("fixed:"):
        try:
            return fixed_rho(float(method.split(":", 1)[1]))
        except ValueError:
            raise InvalidConfig(f"bad fixed rho in {method!r}") from None
    raise InvalidConfig(f"unknown rho method {method!r}")


@dataclass(frozen=True, eq=False)
class DetectResult:
    rho: RhoEstimate
    rho_used: float
    selection: SelectionTrace
    fits: list[FitResult]
    raw: FitResult
    final: FitResult
    postprocessed: bool
    diagnostics: DiagnosticsReport | None = None
    timing_ms: dict = field(default_factory=dict)

    @property
    def changepoints_raw(self) -> tuple[int, ...]:
        return self.raw.changepoints

    @property
    def changepoints_pp(self) -> tuple[int, ...]:
        return postprocess(self.raw.segmentation).changepoints

    def to_dict(self, timing: bool = True) -> dict:
        out = self.final.to_dict()
        out["rho"] = self.rho_used
        out["rho_estimate"] = self.rho.to_dict()
        out["means_suppressed"] = self.final.means is None
        out["selection"] = self.selection.summary()
        out["m_hat"] = self.selection.chosen_m
        out["postprocessed"] = self.postprocessed
        out["changepoints_raw"] = list(self.changepoints_raw)
        out["changepoints_pp"] = list(self.changepoints_pp)
        out["diagnostics"] = None if self.diagnostics is None else self.diagnostics.to_dict()
        if timing:
            out["timing_ms"] = dict(self.timing_ms)
        return out


def detect(
    series: Series,
    method: str = "robust",
    criterion: Criterion = Criterion.MBIC,
    penalty: PenaltyConfig | None = None,
    m_max: int | None = None,
    min_segment_length: int = 1,
    do_postprocess: bool = True,
    diagnostics: bool = False,
    lags: int = 20,
) -> DetectResult:
    """Run the full plug-in pipeline on one series.

    The fit reported as ``final`` is recomputed on the post-processed
    segmentation, so its deltas and residual sum of squares describe the
    change-points actually returned.
    """
    timing = {}
    t0 = time.perf_counter()
    rho = estimate_rho(series, method)
    rho_used = rho.clamped_value
    w = decorrelate(series, rho_used)
    t1 = time.perf_counter()
    timing["rho"] = (t1 - t0) * 1e3

    if m_max is None:
        m_max = default_m_max(series.n)
        # keep the default feasible when a longer minimum segment is requested
        m_max = min(m_max, series.n // min_segment_length - 1)
    fits = dp_segment_all(w, SegmentationConstraints(min_segment_length, m_max))
    t2 = time.perf_counter()
    timing["segmentation"] = (t2 - t1) * 1e3

    trace = select(fits, series.n, criterion, penalty)
    raw = trace.chosen_fit
    final = fit_from_segmentation(w, postprocess(raw.segmentation)) if do_postprocess else raw
    t3 = time.perf_counter()
    timing["selection"] = (t3 - t2) * 1e3

    report = None
    if diagnostics:
        report = residual_diagnostics(series, final, rho_used, min(lags, max(1, (series.n - 1) // 2)))
        timing["diagnostics"] = (time.perf_counter() - t3) * 1e3
    return DetectResult(
        rho=rho,
        rho_used=rho_used,
        selection=trace,
        fits=fits,
        raw=raw,
        final=final,
        postprocessed=do_postprocess,
        diagnostics=report,
        timing_ms=timing,
    )
