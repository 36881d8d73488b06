import csv
import io
import json

import pytest

from arseg.benchmark import (
    BenchCell,
    BenchSettings,
    parse_bench_config,
    replication_seed,
    run_benchmark,
    run_replication,
)
from arseg.errors import InvalidConfig, TooShort
from arseg.selection import Criterion, PenaltyConfig
from arseg.simulation import Noise


def test_record_count_and_csv_rows():
    report = run_benchmark([BenchCell(360, 0.3, 0.2)], BenchSettings(), replications=5, base_seed=1)
    assert len(report.records) == 5
    rows = list(csv.reader(io.StringIO(report.to_csv())))
    assert len(rows) == 6
    assert rows[0] == report.csv_columns()
    agg = report.aggregates[0]
    assert agg["replications"] == 5 and agg["failed"] == 0
    assert sum(agg["variants"]["Robust-P"]["m_hat_histogram"].values()) == 5


def test_noiseless_oracle_recovers_truth():
    # unit jumps save at most SS_0/n ~ 0.22, so six of them need beta_n < 0.037
    settings = BenchSettings(variants=("Oracle",), rho_estimators=(),
                             criterion=Criterion.PENALIZED_BETA, penalty=PenaltyConfig(beta_n=1e-3))
    report = run_benchmark([BenchCell(360, 0.0, 0.0)], settings, replications=1)
    res = report.records[0]["results"]["Oracle"]
    assert set(res["changepoints"]) >= {50, 70, 160, 200, 270, 330}
    assert res["d1"] == 0.0 and res["d2"] == 0.0


def test_jobs_do_not_change_report():
    cells = [BenchCell(360, 0.3, 0.3), BenchCell(400, 0.6, 0.3, Noise("cauchy"))]
    settings = BenchSettings(variants=("LS", "Robust-P", "Bardet"), rho_estimators=("robust", "mg"))
    a = run_benchmark(cells, settings, replications=3, base_seed=2, jobs=1)
    b = run_benchmark(cells, settings, replications=3, base_seed=2, jobs=4)
    assert a.to_csv() == b.to_csv()
    assert a.to_json() == b.to_json()


def test_replication_independent_of_grid_order():
    settings = BenchSettings(variants=("Robust",))
    cell = BenchCell(360, 0.3, 0.3)
    direct = run_replication(cell, 1, 2, 7, settings)
    report = run_benchmark([BenchCell(400, 0.0, 1.0), cell], settings, replications=3, base_seed=7)
    assert report.records[1 * 3 + 2] == direct
    assert direct["seed"] == list(replication_seed(7, 1, 2))


def test_failed_replication_is_recorded():
    # a constant series makes the robust estimator degenerate
    report = run_benchmark([BenchCell(100, 0.0, 0.0, design="none")], BenchSettings(variants=("Robust",)), 2)
    assert [r["status"] for r in report.records] == ["failed", "failed"]
    assert report.records[0]["error"] == "DegenerateMedian"
    agg = report.aggregates[0]
    assert agg["failed"] == 2 and agg["failures"] == ["DegenerateMedian"]
    assert len(list(csv.reader(io.StringIO(report.to_csv())))) == 3


def test_write(tmp_path):
    report = run_benchmark([BenchCell(360, 0.3, 0.2)], BenchSettings(variants=("LS",)), 2)
    paths = report.write(tmp_path / "out")
    assert json.loads(paths["json"].read_text())["replications"] == 2
    assert paths["csv"].read_text() == report.to_csv()


def test_parse_config():
    cells, settings, extra = parse_bench_config(
        """
        # grid
        n = 360, 400
        rho = 0.3
        sigma = 0.1 0.2
        noise = ar1, ar2:0.4:0.2
        methods = robust-p, bardet
        criterion = beta:0.3
        known_m = yes
        replications = 4
        seed = 9
        """
    )
    assert len(cells) == 8
    assert Noise("ar2", 0.4, 0.2) in {c.noise for c in cells}
    assert settings.variants == ("Robust-P", "Bardet")
    assert settings.criterion is Criterion.PENALIZED_BETA and settings.penalty.beta_exponent == 0.3
    assert settings.known_m
    assert extra == {"replications": 4, "seed": 9}


@pytest.mark.parametrize(
    "text",
    ["n = 360\nfoo = 1", "n 360", "n = abc", "methods = Magic", "rho_estimators = ols", "design = other\nn=100"],
)
def test_parse_config_errors(text):
    with pytest.raises(InvalidConfig):
        cells, settings, _ = parse_bench_config(text)
        for c in cells:
            c.config(0)


def test_parse_config_short_design():
    with pytest.raises(TooShort):
        parse_bench_config("n = 50")


def test_replications_validation():
    with pytest.raises(InvalidConfig):
        run_benchmark([BenchCell(360, 0.3, 0.2)], replications=0)
