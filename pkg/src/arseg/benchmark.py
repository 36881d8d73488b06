"""Monte Carlo harness over a grid of simulation settings.

Each replication is seeded from ``(base_seed, cell_index, replication)``
so records never depend on evaluation order or on the number of worker
processes. Aggregates are a fold over records sorted by index.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bardet import bardet_segment
from .core import Segmentation, decorrelate
from .errors import ArsegError, InvalidConfig
from .evaluation import has_adjacent_pair, hausdorff, postprocess
from .robust_rho import estimate_rho_cauchy, estimate_rho_mg, estimate_rho_tilde
from .segmentation import SegmentationConstraints, default_m_max, dp_segment, dp_segment_all
from .selection import Criterion, PenaltyConfig, parse_criterion, select
from .simulation import Noise, SimulationConfig, paper_design, simulate

#: rho route for each segmentation family
FAMILIES = {"LS": "zero", "Robust": "robust", "Oracle": "oracle", "MG": "mg"}
VARIANTS = ("LS", "LS-P", "Robust", "Robust-P", "Oracle", "Oracle-P", "MG", "MG-P", "Bardet")
RHO_ESTIMATORS = ("robust", "mg", "cauchy")
DEFAULT_VARIANTS = ("LS", "Robust", "Robust-P", "Oracle", "Oracle-P")


@dataclass(frozen=True)
class BenchCell:
    """One grid point; ``design`` is ``paper`` or ``none`` (constant zero mean)."""

    n: int
    rho_star: float
    sigma_star: float
    noise: Noise = field(default_factory=Noise)
    design: str = "paper"

    def config(self, seed) -> SimulationConfig:
        if self.design == "paper":
            return SimulationConfig.paper(self.n, self.rho_star, self.sigma_star, self.noise, seed)
        if self.design == "none":
            return SimulationConfig(self.n, self.rho_star, self.sigma_star, noise=self.noise, seed=seed)
        raise InvalidConfig(f"unknown design {self.design!r}")

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "rho_star": self.rho_star,
            "sigma_star": self.sigma_star,
            "noise": self.noise.label(),
            "design": self.design,
        }


@dataclass(frozen=True)
class BenchSettings:
    variants: tuple[str, ...] = DEFAULT_VARIANTS
    rho_estimators: tuple[str, ...] = ("robust",)
    criterion: Criterion = Criterion.MBIC
    penalty: PenaltyConfig | None = None
    m_max: int | None = None
    min_segment_length: int = 1
    known_m: bool = False

    def __post_init__(self):
        bad = [v for v in self.variants if v not in VARIANTS]
        if bad:
            raise InvalidConfig(f"unknown variants {bad}; choose from {VARIANTS}")
        bad = [r for r in self.rho_estimators if r not in RHO_ESTIMATORS]
        if bad:
            raise InvalidConfig(f"unknown rho estimators {bad}; choose from {RHO_ESTIMATORS}")


def replication_seed(base_seed: int, cell_index: int, rep: int) -> tuple[int, int, int]:
    return (int(base_seed), int(cell_index), int(rep))


def _family_fit(series, rho, n_true, settings: BenchSettings):
    w = decorrelate(series, rho)
    if settings.known_m:
        return dp_segment(w, n_true, SegmentationConstraints(settings.min_segment_length, n_true))
    m_max = settings.m_max if settings.m_max is not None else default_m_max(series.n)
    fits = dp_segment_all(w, SegmentationConstraints(settings.min_segment_length, m_max))
    return select(fits, series.n, settings.criterion, settings.penalty).chosen_fit


def _score(seg: Segmentation, true_cps, n) -> dict:
    h = hausdorff([t / n for t in true_cps], seg.taus)
    return {"m_hat": seg.m, "d1": h.d1, "d2": h.d2, "changepoints": list(seg.changepoints)}


def run_replication(cell: BenchCell, cell_index: int, rep: int, base_seed: int, settings: BenchSettings) -> dict:
    """Simulate one series and score every requested variant on it."""
    seed = replication_seed(base_seed, cell_index, rep)
    record = {"cell": cell_index, "rep": rep, "seed": list(seed), "status": "ok", "error": None}
    try:
        cfg = cell.config(seed)
        series = simulate(cfg)
        true_cps = cfg.changepoints
        n = cfg.n
        estimators = {
            "robust": estimate_rho_tilde,
            "mg": estimate_rho_mg,
            "cauchy": estimate_rho_cauchy,
        }
        rho_hat = {}
        needed = set(settings.rho_estimators)
        for v in settings.variants:
            if v.startswith("Robust"):
                needed.add("robust")
            if v.startswith("MG"):
                needed.add("mg")
        estimates = {}
        for name in RHO_ESTIMATORS:
            if name in needed:
                estimates[name] = estimators[name](series)
                rho_hat[name] = estimates[name].value
        rho_for = {
            "zero": 0.0,
            "oracle": cfg.rho_star,
            "robust": estimates["robust"].clamped_value if "robust" in estimates else None,
            "mg": estimates["mg"].clamped_value if "mg" in estimates else None,
        }
        results = {}
        fitted = {}
        for variant in settings.variants:
            if variant == "Bardet":
                seg = bardet_segment(series, len(true_cps))
                results[variant] = _score(seg, true_cps, n)
                continue
            family, pp = variant.removesuffix("-P"), variant.endswith("-P")
            if family not in fitted:
                fitted[family] = _family_fit(series, rho_for[FAMILIES[family]], len(true_cps), settings)
            seg = fitted[family].segmentation
            results[variant] = _score(postprocess(seg) if pp else seg, true_cps, n)
        record["rho_hat"] = rho_hat
        record["results"] = results
    except ArsegError as exc:
        record["status"] = "failed"
        record["error"] = exc.code
        record["rho_hat"] = {}
        record["results"] = {}
    return record


def _run_task(args):
    return run_replication(*args)


def _quartiles(values) -> list[float] | None:
    if not values:
        return None
    return [float(q) for q in np.quantile(np.asarray(values, dtype=float), [0.25, 0.5, 0.75])]


def aggregate(cell: BenchCell, records: list[dict], settings: BenchSettings) -> dict:
    ok = [r for r in records if r["status"] == "ok"]
    out = {
        "cell": cell.to_dict(),
        "replications": len(records),
        "failed": len(records) - len(ok),
        "failures": sorted({r["error"] for r in records if r["error"]}),
        "rho_bias_quartiles": {},
        "variants": {},
    }
    for name in sorted({k for r in ok for k in r["rho_hat"]}):
        out["rho_bias_quartiles"][name] = _quartiles([r["rho_hat"][name] - cell.rho_star for r in ok])
    for variant in settings.variants:
        res = [r["results"][variant] for r in ok]
        hist, freq = {}, {}
        for x in res:
            hist[x["m_hat"]] = hist.get(x["m_hat"], 0) + 1
            for t in x["changepoints"]:
                freq[t] = freq.get(t, 0) + 1
        out["variants"][variant] = {
            "m_hat_histogram": {str(k): hist[k] for k in sorted(hist)},
            "d1_quartiles": _quartiles([x["d1"] for x in res]),
            "d2_quartiles": _quartiles([x["d2"] for x in res]),
            "changepoint_frequency": {str(k): freq[k] for k in sorted(freq)},
            "adjacent_pair_replications": sum(
                has_adjacent_pair(Segmentation(cell.n, tuple(x["changepoints"]))) for x in res
            ),
        }
    return out


@dataclass(frozen=True, eq=False)
class BenchmarkReport:
    cells: tuple[BenchCell, ...]
    settings: BenchSettings
    replications: int
    base_seed: int
    records: list[dict]

    def cell_records(self, index: int) -> list[dict]:
        return [r for r in self.records if r["cell"] == index]

    @property
    def aggregates(self) -> list[dict]:
        return [aggregate(c, self.cell_records(i), self.settings) for i, c in enumerate(self.cells)]

    def to_dict(self) -> dict:
        return {
            "base_seed": self.base_seed,
            "replications": self.replications,
            "variants": list(self.settings.variants),
            "criterion": self.settings.criterion.value,
            "known_m": self.settings.known_m,
            "cells": [c.to_dict() for c in self.cells],
            "aggregates": self.aggregates,
            "records": self.records,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def csv_columns(self) -> list[str]:
        cols = ["cell", "rep", "n", "rho_star", "sigma_star", "noise", "design", "status", "error"]
        cols += [f"rho_{name}" for name in RHO_ESTIMATORS]
        for v in self.settings.variants:
            cols += [f"{v}_m_hat", f"{v}_d1", f"{v}_d2", f"{v}_changepoints"]
        return cols

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.csv_columns())
        for r in self.records:
            cell = self.cells[r["cell"]]
            row = [r["cell"], r["rep"], cell.n, repr(cell.rho_star), repr(cell.sigma_star),
                   cell.noise.label(), cell.design, r["status"], r["error"] or ""]
            row += [_fmt(r["rho_hat"].get(name)) for name in RHO_ESTIMATORS]
            for v in self.settings.variants:
                x = r["results"].get(v)
                if x is None:
                    row += ["", "", "", ""]
                else:
                    row += [x["m_hat"], _fmt(x["d1"]), _fmt(x["d2"]), ";".join(map(str, x["changepoints"]))]
            writer.writerow(row)
        return buf.getvalue()

    def write(self, output_dir) -> dict:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {"json": out / "benchmark.json", "csv": out / "benchmark.csv"}
        paths["json"].write_text(self.to_json())
        paths["csv"].write_text(self.to_csv())
        return paths


def _fmt(x) -> str:
    if x is None:
        return ""
    return repr(float(x)) if math.isfinite(x) else str(x)


def run_benchmark(
    cells,
    settings: BenchSettings | None = None,
    replications: int = 1,
    base_seed: int = 0,
    jobs: int = 1,
) -> BenchmarkReport:
    """Run every cell for ``replications`` seeded draws; ``jobs > 1`` uses processes."""
    settings = settings or BenchSettings()
    cells = tuple(cells)
    if replications < 1:
        raise InvalidConfig("replications must be at least 1")
    tasks = [
        (cell, i, rep, base_seed, settings) for i, cell in enumerate(cells) for rep in range(replications)
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        records = [_run_task(t) for t in tasks]
    records.sort(key=lambda r: (r["cell"], r["rep"]))
    return BenchmarkReport(cells, settings, replications, base_seed, records)


def _split(value: str) -> list[str]:
    return [v.strip() for v in value.replace(";", " ").replace(",", " ").split() if v.strip()]


def parse_bench_config(text: str) -> tuple[list[BenchCell], BenchSettings, dict]:
    """Parse a ``key=value`` grid file.

    Recognised keys: ``n``, ``rho``, ``sigma`` (lists; the grid is their
    product), ``noise`` (one of ``ar1``, ``cauchy``, ``ar2:p1:p2`` -- colons
    inside the list since commas separate values), ``design``, ``methods``,
    ``rho_estimators``, ``criterion``, ``mmax``, ``min_seg``, ``known_m``,
    ``replications`` and ``seed``. ``#`` starts a comment.
    """
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidConfig(f"line {lineno}: expected key=value")
        raw[key.strip().lower()] = value.strip()
    known = {"n", "rho", "sigma", "noise", "design", "methods", "rho_estimators", "criterion",
             "mmax", "min_seg", "known_m", "replications", "seed"}
    unknown = set(raw) - known
    if unknown:
        raise InvalidConfig(f"unknown config keys {sorted(unknown)}")
    try:
        ns = [int(v) for v in _split(raw.get("n", "400"))]
        rhos = [float(v) for v in _split(raw.get("rho", "0.3"))]
        sigmas = [float(v) for v in _split(raw.get("sigma", "0.1"))]
        noises = [_parse_noise_token(v) for v in _split(raw.get("noise", "ar1"))]
        designs = _split(raw.get("design", "paper"))
        criterion, penalty = parse_criterion(raw.get("criterion", "mbic"))
        settings = BenchSettings(
            variants=tuple(_canonical_variant(v) for v in _split(raw.get("methods", ",".join(DEFAULT_VARIANTS)))),
            rho_estimators=tuple(v.lower() for v in _split(raw.get("rho_estimators", "robust"))),
            criterion=criterion,
            penalty=penalty,
            m_max=int(raw["mmax"]) if "mmax" in raw else None,
            min_segment_length=int(raw.get("min_seg", "1")),
            known_m=raw.get("known_m", "false").lower() in ("1", "true", "yes"),
        )
        extra = {}
        if "replications" in raw:
            extra["replications"] = int(raw["replications"])
        if "seed" in raw:
            extra["seed"] = int(raw["seed"])
    except ValueError as exc:
        raise InvalidConfig(f"bad config value: {exc}") from None
    cells = [
        BenchCell(n, rho, sigma, noise, design)
        for design in designs
        for noise in noises
        for n in ns
        for rho in rhos
        for sigma in sigmas
    ]
    for cell in cells:
        if cell.design == "paper":
            paper_design(cell.n)
    return cells, settings, extra


def _parse_noise_token(token: str) -> Noise:
    # list values are comma separated, so the AR(2) form here is ar2:p1:p2
    kind, _, rest = token.partition(":")
    if kind.lower() == "ar2":
        return Noise.parse("ar2:" + rest.replace(":", ","))
    return Noise.parse(token)


def _canonical_variant(text: str) -> str:
    lookup = {v.lower(): v for v in VARIANTS}
    key = text.strip().lower()
    if key not in lookup:
        raise InvalidConfig(f"unknown method {text!r}; choose from {VARIANTS}")
    return lookup[key]
