"""Multiple change-point detection in the mean of AR(1) series.

The pipeline estimates the autocorrelation robustly, decorrelates the
series, segments it exactly by dynamic programming, chooses the number of
change-points with a modified BIC and removes the one-sample artefact
segments that decorrelation creates.
"""

__version__ = "0.1.0"

from importlib.resources import files

from .core import (
    DecorrelatedSeries,
    FitResult,
    Segmentation,
    Series,
    decorrelate,
    read_series,
    validate_series,
)
from .evaluation import DiagnosticsReport, HausdorffResult, hausdorff, postprocess, residual_diagnostics
from .pipeline import DetectResult, detect, estimate_rho
from .robust_rho import (
    RhoEstimate,
    RhoMethod,
    cauchy_transform,
    estimate_rho_mg,
    estimate_rho_tilde,
    qn_quartile_scale,
)
from .segmentation import SegmentationConstraints, dp_segment, dp_segment_all
from .selection import Criterion, PenaltyConfig, mbic_score, select_beta, select_mbic
from .simulation import SimulationConfig, paper_design, simulate

__all__ = [
    "Criterion",
    "DecorrelatedSeries",
    "DetectResult",
    "DiagnosticsReport",
    "FitResult",
    "HausdorffResult",
    "PenaltyConfig",
    "RhoEstimate",
    "RhoMethod",
    "Segmentation",
    "SegmentationConstraints",
    "Series",
    "SimulationConfig",
    "cauchy_transform",
    "decorrelate",
    "detect",
    "dp_segment",
    "dp_segment_all",
    "estimate_rho",
    "estimate_rho_mg",
    "estimate_rho_tilde",
    "hausdorff",
    "mbic_score",
    "paper_design",
    "postprocess",
    "qn_quartile_scale",
    "read_series",
    "residual_diagnostics",
    "select_beta",
    "select_mbic",
    "simulate",
    "validate_series",
]


def schema_path(name: str):
    """Path of a shipped JSON schema (``detect_report``, ``rho_report`` or ``error``)."""
    return files(__name__) / "schemas" / f"{name}.schema.json"
