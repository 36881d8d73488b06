"""Command-line front end: ``arseg detect | rho | simulate | bench``.

Every command writes JSON. Input errors exit with status 2 and an error
object on stdout; infeasible segmentation constraints exit with status 3.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from . import __version__
from .bardet import bardet_segment, bardet_total_cost
from .benchmark import _canonical_variant, parse_bench_config, run_benchmark
from .core import format_series, parse_series_text
from .errors import ArsegError, InfeasibleConstraints, InvalidConfig
from .pipeline import detect, estimate_rho
from .robust_rho import test_rho_zero
from .selection import parse_criterion
from .simulation import Noise, SimulationConfig, paper_design, simulate

EXIT_INPUT = 2
EXIT_INFEASIBLE = 3


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _emit(obj, output: str | None) -> None:
    text = dumps(obj)
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _read_input(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse_series_text(text)


def _seed(default: int) -> int:
    env = os.environ.get("ARSEG_SEED")
    if env is not None and env.strip():
        try:
            return int(env)
        except ValueError:
            raise InvalidConfig(f"ARSEG_SEED must be an integer, got {env!r}") from None
    return default


def cmd_detect(args) -> int:
    series = _read_input(args.input)
    if args.method == "bardet":
        if args.m is None:
            raise InvalidConfig("--method bardet needs --m")
        start = time.perf_counter()
        seg = bardet_segment(series, args.m, args.min_seg if args.min_seg_given else 3)
        out = {
            "n": series.n,
            "method": "bardet",
            "changepoints": list(seg.changepoints),
            "cost": bardet_total_cost(series, seg),
        }
        if not args.no_timing:
            out["timing_ms"] = {"segmentation": (time.perf_counter() - start) * 1e3}
        _emit(out, args.output)
        return 0
    criterion, penalty = parse_criterion(args.criterion)
    result = detect(
        series,
        method=args.method,
        criterion=criterion,
        penalty=penalty,
        m_max=args.mmax,
        min_segment_length=args.min_seg,
        do_postprocess=not args.no_postprocess,
        diagnostics=args.diagnostics,
        lags=args.lags,
    )
    _emit(result.to_dict(timing=not args.no_timing), args.output)
    return 0


def cmd_rho(args) -> int:
    series = _read_input(args.input)
    est = estimate_rho(series, args.method)
    out = {
        "method": est.method.value,
        "value": est.value,
        "clamped": est.clamped_value,
        "was_clamped": est.was_clamped,
    }
    if args.test_zero:
        out["test"] = test_rho_zero(series, args.mc, _seed(args.seed)).to_dict()
    _emit(out, args.output)
    return 0


def _custom_design(path: str):
    doc = json.loads(Path(path).read_text())
    taus = tuple(Fraction(str(t)) for t in doc.get("taus", []))
    means = tuple(float(m) for m in doc["means"])
    return taus, means


def cmd_simulate(args) -> int:
    seed = _seed(args.seed)
    noise = Noise.parse(args.noise)
    if args.design == "paper":
        taus, means = paper_design(args.n)
    elif args.design == "none":
        taus, means = (), (0.0,)
    else:
        taus, means = _custom_design(args.design)
    cfg = SimulationConfig(args.n, args.rho, args.sigma, means, taus, noise, seed)
    series = simulate(cfg)
    truth = {
        "n": cfg.n,
        "changepoints": list(cfg.changepoints),
        "taus": [float(t) for t in taus],
        "means": list(means),
        "rho": args.rho,
        "sigma": args.sigma,
        "noise": noise.label(),
        "seed": seed,
    }
    text = format_series(series.values)
    if args.output in (None, "-"):
        sys.stdout.write(text)
        if args.truth:
            Path(args.truth).write_text(dumps(truth))
    else:
        Path(args.output).write_text(text)
        Path(args.truth or f"{args.output}.truth.json").write_text(dumps(truth))
    return 0


def cmd_bench(args) -> int:
    cells, settings, extra = parse_bench_config(Path(args.config).read_text())
    if args.methods:
        variants = tuple(_canonical_variant(v) for v in args.methods.split(","))
        settings = replace(settings, variants=variants)
    replications = args.replications or extra.get("replications", 1)
    seed = _seed(args.seed if args.seed is not None else extra.get("seed", 0))
    report = run_benchmark(cells, settings, replications, seed, args.jobs)
    paths = report.write(args.output_dir)
    _emit(
        {
            "json": str(paths["json"]),
            "csv": str(paths["csv"]),
            "records": len(report.records),
            "failed": sum(r["status"] != "ok" for r in report.records),
        },
        None,
    )
    return 0


class _Tracked(argparse.Action):
    def __call__(self, parser, namespace, values, option_string=None):
        setattr(namespace, self.dest, values)
        setattr(namespace, self.dest + "_given", True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="arseg", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"arseg {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="detect change-points in a series")
    p.add_argument("input", help="single-column numeric file, or - for stdin")
    p.add_argument("--method", default="robust",
                   help="robust | mg | cauchy | zero | fixed:<rho> | bardet")
    p.add_argument("--criterion", default="mbic", help="mbic | beta:<exponent>")
    p.add_argument("--mmax", type=int, default=None)
    p.add_argument("--min-seg", type=int, default=1, action=_Tracked)
    p.add_argument("--m", type=int, default=None, help="number of change-points (bardet only)")
    p.add_argument("--no-postprocess", action="store_true")
    p.add_argument("--diagnostics", action="store_true")
    p.add_argument("--lags", type=int, default=20)
    p.add_argument("--no-timing", action="store_true")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_detect, min_seg_given=False)

    p = sub.add_parser("rho", help="estimate the AR(1) coefficient")
    p.add_argument("input")
    p.add_argument("--method", default="robust", choices=["robust", "mg", "cauchy"])
    p.add_argument("--test-zero", action="store_true")
    p.add_argument("--mc", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_rho)

    p = sub.add_parser("simulate", help="simulate a series with known change-points")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rho", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--design", default="paper", help="paper | none | path to a JSON design")
    p.add_argument("--noise", default="ar1", help="ar1 | ar2:<phi1>,<phi2> | cauchy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", default="-")
    p.add_argument("--truth", default=None, help="truth JSON path (default <output>.truth.json)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("bench", help="run a Monte Carlo benchmark grid")
    p.add_argument("config")
    p.add_argument("--replications", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--methods", default=None, help="comma-separated variants, e.g. Robust-P,bardet")
    p.add_argument("--output-dir", default="bench-out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleConstraints as exc:
        sys.stdout.write(dumps(exc.to_dict()))
        return EXIT_INFEASIBLE
    except ArsegError as exc:
        sys.stdout.write(dumps(exc.to_dict()))
        return EXIT_INPUT
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        sys.stdout.write(dumps({"error": type(exc).__name__, "message": str(exc)}))
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
