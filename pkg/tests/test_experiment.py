"""Experiment harness: seeding, config validation, reports, determinism."""

import csv
import dataclasses

import numpy as np
import pytest

from labelaudit.experiment import (
    CSV_COLUMNS,
    SCHEMA_VERSION,
    ConfigError,
    ExperimentConfig,
    ExperimentReport,
    ReportRow,
    read_report_json,
    rng_stream,
    run_experiment,
    write_report,
)

SMALL = dict(base_seed=42, n=2000, k=2, eps_list=(2.0,), repetitions=3,
             guess_fractions=(0.05,))


def test_rng_stream_deterministic():
    a = rng_stream(1, 0, 3).random(10)
    b = rng_stream(1, 0, 3).random(10)
    assert np.array_equal(a, b)


def test_rng_streams_are_distinct():
    draws = [rng_stream(1, *path).random(10_000)
             for path in ((0, 0), (0, 1), (1, 0), (0, 0, 5))]
    for i in range(len(draws)):
        for j in range(i + 1, len(draws)):
            assert not np.array_equal(draws[i], draws[j])
            corr = np.corrcoef(draws[i], draws[j])[0, 1]
            assert abs(corr) < 4 / np.sqrt(10_000)


@pytest.mark.parametrize("override", [
    dict(n=0), dict(k=1), dict(d=1), dict(eps_list=()),
    dict(eps_list=(-1.0,)), dict(guess_fractions=()),
    dict(guess_fractions=(0.0,)), dict(guess_fractions=(1.5,)),
    dict(proxy_kind="nope"), dict(proxy_kind="shifted", k=3, d=3),
    dict(tau_audit=1.5), dict(proxy_tau=-0.1), dict(gamma=0.0),
    dict(gamma=1.0), dict(delta=1.0), dict(t=-1.0), dict(repetitions=0),
    dict(workers=0), dict(score_mode="nope"),
])
def test_config_validation(override):
    with pytest.raises(ConfigError):
        ExperimentConfig(**{**SMALL, **override}).validate()


def test_run_shape_and_order():
    cfg = ExperimentConfig(base_seed=3, n=2000, k=2, eps_list=(1.0, 3.0),
                           repetitions=4, guess_fractions=(0.01, 0.05))
    report = run_experiment(cfg)
    assert len(report.rows) == 2 * 4 * 2
    for row in report.rows:
        assert row.k == 2
        assert row.guess_fraction in (0.01, 0.05)
        assert 0 <= row.c <= row.c_prime
    # repetitions appear in order within each theoretical epsilon
    reps = [r.repetition for r in report.rows if r.theoretical_eps == 1.0
            and r.guess_fraction == 0.01]
    assert reps == sorted(reps)


def test_determinism_bitwise():
    cfg = ExperimentConfig(**SMALL)
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    assert [dataclasses.astuple(r) for r in a.rows] == \
        [dataclasses.astuple(r) for r in b.rows]


def test_workers_do_not_change_results():
    serial = run_experiment(ExperimentConfig(**SMALL))
    threaded = run_experiment(ExperimentConfig(**{**SMALL, "workers": 4}))
    assert [dataclasses.astuple(r) for r in serial.rows] == \
        [dataclasses.astuple(r) for r in threaded.rows]


def test_sweep_mode_single_row_per_repetition():
    cfg = ExperimentConfig(**{**SMALL, "sweep": True,
                              "guess_fractions": (0.01, 0.05, 0.2)})
    report = run_experiment(cfg)
    assert len(report.rows) == 3  # one winning fraction per repetition
    for row in report.rows:
        assert row.guess_fraction in (0.01, 0.05, 0.2)


def test_resample_all_is_deterministic_and_varies():
    cfg = ExperimentConfig(**{**SMALL, "resample_all": True,
                              "repetitions": 2})
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    assert [dataclasses.astuple(r) for r in a.rows] == \
        [dataclasses.astuple(r) for r in b.rows]


def test_proxy_kinds_run():
    for kind, extra in (("ground_truth", {}), ("shifted", {"proxy_tau": 0.01}),
                        ("logistic", {})):
        cfg = ExperimentConfig(**{**SMALL, "proxy_kind": kind, **extra})
        report = run_experiment(cfg)
        assert all(r.proxy_kind == kind for r in report.rows)


def test_summaries_match_manual_recompute():
    report = run_experiment(ExperimentConfig(**SMALL))
    s = report.summary_for(2.0, 0.05)
    vals = np.array([r.empirical_eps for r in report.rows])
    assert s.mean_emp_eps == pytest.approx(float(vals.mean()))
    assert s.std_emp_eps == pytest.approx(float(vals.std()))  # ddof = 0
    accs = np.array([r.c / r.c_prime for r in report.rows])
    assert s.mean_accuracy == pytest.approx(float(accs.mean()))
    assert s.emp_eps_values == tuple(vals.tolist())
    with pytest.raises(KeyError):
        report.summary_for(9.0, 0.05)


def test_write_report_csv(tmp_path):
    report = ExperimentReport(config=ExperimentConfig(**SMALL))
    report.rows = [
        ReportRow(k=2, theoretical_eps=1.0, proxy_kind="ground_truth",
                  tau=0.0, guess_fraction=0.001, repetition=0, c_prime=10,
                  c=7, empirical_eps=0.5, saturated=False),
        ReportRow(k=2, theoretical_eps=1.0, proxy_kind="ground_truth",
                  tau=0.0, guess_fraction=0.001, repetition=1, c_prime=10,
                  c=9, empirical_eps=1.25, saturated=True),
    ]
    path = tmp_path / "report.csv"
    write_report(report, path, "csv")
    lines = path.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[1] == \
        "2,1.0,ground_truth,0.0,0.001,0,10,7,0.5,False"
    with open(path, newline="") as fh:
        parsed = list(csv.DictReader(fh))
    assert len(parsed) == 2 and parsed[1]["c"] == "9"


def test_write_report_json_round_trip(tmp_path):
    report = run_experiment(ExperimentConfig(**SMALL))
    path = tmp_path / "report.json"
    write_report(report, path, "json")
    payload = read_report_json(path)
    assert payload["schema_version"] == SCHEMA_VERSION
    assert payload["config"]["base_seed"] == 42
    assert payload["config"]["eps_list"] == [2.0]
    assert len(payload["rows"]) == len(report.rows)
    assert payload["rows"][0] == dataclasses.asdict(report.rows[0])


def test_write_report_unknown_format(tmp_path):
    report = ExperimentReport(config=ExperimentConfig(**SMALL))
    with pytest.raises(ConfigError):
        write_report(report, tmp_path / "x", "yaml")


def test_write_report_unwritable_path(tmp_path):
    report = ExperimentReport(config=ExperimentConfig(**SMALL))
    with pytest.raises(OSError):
        write_report(report, tmp_path / "missing" / "x.csv", "csv")


def test_any_saturated_flag():
    # a tiny mu range forces saturation whenever any signal shows up
    cfg = ExperimentConfig(**{**SMALL, "mu_max": 0.05, "eps_list": (4.0,),
                              "n": 20_000, "guess_fractions": (0.01,)})
    report = run_experiment(cfg)
    assert report.any_saturated
    assert any(s.any_saturated for s in report.summaries())
