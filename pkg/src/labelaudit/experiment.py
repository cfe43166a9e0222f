"""Experiment runner: repeated games, empirical-epsilon statistics, reports.

One dataset and one mechanism output are drawn per theoretical epsilon; each
repetition resamples only the game artifacts (coins and counterfactual
labels), so the reported spread isolates auditing variance.  A
``resample_all`` switch additionally redraws data and noise per repetition
for sensitivity studies.

RNG streams are derived as ``SeedSequence(base_seed, spawn_key=path)`` where
path = (eps_index, purpose, repetition); purposes are the STREAM_* constants
below.  Streams are pairwise independent and the whole report is a pure
function of the config.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .audit import (
    AuditOutcome,
    EpsilonEstimate,
    empirical_epsilon,
    sweep_guess_fractions,
)
from .game import (
    SCORE_MODES,
    GameArtifacts,
    ScoredGame,
    draw_artifacts,
    guess_count,
    make_guesses,
    mechanism_evidence,
    scores_from_probs,
    tally,
)
from .mechanism import RandomizedResponse, rr_apply
from .proxy import GroundTruthProxy, ShiftedProxy, train_logistic
from .synthdata import sample_mixture
from .tradeoff import GaussianFamily

SCHEMA_VERSION = 1

# purpose tags for RNG stream derivation
STREAM_DATASET = 0
STREAM_MECHANISM = 1
STREAM_PROXY = 2
STREAM_GAME = 3

PROXY_KINDS = ("ground_truth", "shifted", "logistic")

CSV_COLUMNS = ("k", "theoretical_eps", "proxy_kind", "tau", "guess_fraction",
               "repetition", "c_prime", "c", "empirical_eps", "saturated")


class ConfigError(ValueError):
    """Raised on invalid experiment configuration."""


def rng_stream(base_seed: int, *path: int) -> np.random.Generator:
    """Derive an independent generator for a (purpose, index...) path."""
    return np.random.default_rng(
        np.random.SeedSequence(base_seed, spawn_key=tuple(path)))


@dataclass(frozen=True)
class ExperimentConfig:
    base_seed: int
    n: int = 10 ** 6
    k: int = 2
    d: int = 5
    eps_list: tuple = (1.0, 2.0, 3.0, 4.0)
    proxy_kind: str = "ground_truth"
    proxy_tau: float = 0.0  # shift of the proxy posterior (shifted kind)
    tau_audit: float = 0.0  # shift budget granted to the audit
    guess_fractions: tuple = (0.001, 0.01)
    t: float = 2.0
    gamma: float = 0.05
    delta: float = 1e-5
    repetitions: int = 100
    sweep: bool = False
    score_mode: str = "onehot"
    resample_all: bool = False
    workers: int = 1
    mu_min: float = 1e-4
    mu_max: float = 20.0
    mu_tol: float = 1e-3

    def validate(self) -> None:
        if self.n < 1 or self.k < 2 or self.d < self.k:
            raise ConfigError(
                f"need n >= 1 and 2 <= k <= d, got n={self.n}, k={self.k}, "
                f"d={self.d}")
        if self.proxy_kind not in PROXY_KINDS:
            raise ConfigError(f"proxy_kind must be one of {PROXY_KINDS}, "
                              f"got {self.proxy_kind!r}")
        if self.proxy_kind == "shifted" and self.k != 2:
            raise ConfigError("shifted proxy requires k = 2")
        if not self.eps_list or any(e < 0 for e in self.eps_list):
            raise ConfigError("eps_list must be non-empty and non-negative")
        if not self.guess_fractions or any(
                not 0 < fr <= 1 for fr in self.guess_fractions):
            raise ConfigError("guess_fractions must lie in (0, 1]")
        if not 0 <= self.tau_audit <= 1 or not 0 <= self.proxy_tau <= 1:
            raise ConfigError("tau values must lie in [0, 1]")
        if not 0 < self.gamma < 1 or not 0 <= self.delta < 1:
            raise ConfigError("need gamma in (0, 1) and delta in [0, 1)")
        if self.t < 0 or self.repetitions < 1 or self.workers < 1:
            raise ConfigError("t, repetitions and workers must be positive")
        if self.score_mode not in SCORE_MODES:
            raise ConfigError(f"score_mode must be one of {SCORE_MODES}, "
                              f"got {self.score_mode!r}")

    def family(self) -> GaussianFamily:
        return GaussianFamily(self.mu_min, self.mu_max, self.mu_tol)


@dataclass(frozen=True)
class ReportRow:
    k: int
    theoretical_eps: float
    proxy_kind: str
    tau: float
    guess_fraction: float
    repetition: int
    c_prime: int
    c: int
    empirical_eps: float
    saturated: bool


@dataclass(frozen=True)
class GroupSummary:
    """Per-(eps, fraction) statistics across repetitions.

    std is the population standard deviation (ddof = 0) over repetitions
    only; dataset redraw variance is not included unless resample_all is on.
    """

    theoretical_eps: float
    guess_fraction: float
    mean_emp_eps: float
    std_emp_eps: float
    mean_accuracy: float
    emp_eps_values: tuple
    any_saturated: bool


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    rows: list = field(default_factory=list)

    @property
    def any_saturated(self) -> bool:
        return any(row.saturated for row in self.rows)

    def summaries(self) -> list:
        groups: dict = {}
        for row in self.rows:
            groups.setdefault(
                (row.theoretical_eps, row.guess_fraction), []).append(row)
        out = []
        for (eps, frac), rows in sorted(groups.items()):
            vals = np.array([r.empirical_eps for r in rows])
            accs = np.array([r.c / r.c_prime for r in rows if r.c_prime > 0])
            out.append(GroupSummary(
                theoretical_eps=eps, guess_fraction=frac,
                mean_emp_eps=float(vals.mean()),
                std_emp_eps=float(vals.std()),
                mean_accuracy=float(accs.mean()) if accs.size else float("nan"),
                emp_eps_values=tuple(vals.tolist()),
                any_saturated=any(r.saturated for r in rows)))
        return out

    def summary_for(self, eps: float, fraction: float) -> GroupSummary:
        for s in self.summaries():
            if s.theoretical_eps == eps and s.guess_fraction == fraction:
                return s
        raise KeyError((eps, fraction))


def _build_proxy(config: ExperimentConfig, rng: np.random.Generator):
    if config.proxy_kind == "ground_truth":
        return GroundTruthProxy(k=config.k)
    if config.proxy_kind == "shifted":
        return ShiftedProxy(tau=config.proxy_tau)
    # logistic: trained on a fresh dataset of the same size and distribution
    fresh = sample_mixture(config.n, config.k, config.d, rng)
    return train_logistic(fresh)


@dataclass
class _PreparedSetting:
    """Everything fixed across repetitions for one theoretical epsilon."""

    mech: RandomizedResponse
    y0: np.ndarray
    proxy_probs: np.ndarray  # predict_proba over the dataset
    evidence: np.ndarray  # Pr[real | mechanism output] per sample


def _prepare(config: ExperimentConfig, eps_index: int,
             eps: float) -> _PreparedSetting:
    mech = RandomizedResponse(eps=eps, k=config.k)
    ds = sample_mixture(config.n, config.k, config.d,
                        rng_stream(config.base_seed, eps_index,
                                   STREAM_DATASET))
    noisy = rr_apply(mech, ds.y0,
                     rng_stream(config.base_seed, eps_index,
                                STREAM_MECHANISM))
    proxy = _build_proxy(config,
                         rng_stream(config.base_seed, eps_index,
                                    STREAM_PROXY))
    probs = proxy.predict_proba(ds.x)
    evidence = mechanism_evidence(mech, noisy, probs, config.score_mode)
    return _PreparedSetting(mech=mech, y0=ds.y0, proxy_probs=probs,
                            evidence=evidence)


def _run_repetition(config: ExperimentConfig, eps_index: int, eps: float,
                    prepared: _PreparedSetting, rep: int) -> list:
    rng = rng_stream(config.base_seed, eps_index, STREAM_GAME, rep)
    if config.resample_all:
        # redraw dataset, noise and proxy with repetition-specific streams
        mech = prepared.mech
        ds = sample_mixture(config.n, config.k, config.d,
                            rng_stream(config.base_seed, eps_index,
                                       STREAM_DATASET, rep + 1))
        noisy = rr_apply(mech, ds.y0,
                         rng_stream(config.base_seed, eps_index,
                                    STREAM_MECHANISM, rep + 1))
        proxy = _build_proxy(config,
                             rng_stream(config.base_seed, eps_index,
                                        STREAM_PROXY, rep + 1))
        probs = proxy.predict_proba(ds.x)
        evidence = mechanism_evidence(mech, noisy, probs, config.score_mode)
        y0 = ds.y0
    else:
        probs, evidence, y0 = (prepared.proxy_probs, prepared.evidence,
                               prepared.y0)

    artifacts = draw_artifacts(probs, rng)
    shown = np.where(artifacts.b == 0, y0, artifacts.y1)
    scores = scores_from_probs(evidence, probs, shown, config.t)
    scored = ScoredGame(scores=scores, shown_labels=shown, bits=artifacts)
    family = config.family()

    def row(frac: float, outcome: AuditOutcome,
            est: EpsilonEstimate) -> ReportRow:
        return ReportRow(k=config.k, theoretical_eps=eps,
                         proxy_kind=config.proxy_kind, tau=config.tau_audit,
                         guess_fraction=frac, repetition=rep,
                         c_prime=outcome.c_prime, c=outcome.c,
                         empirical_eps=est.eps, saturated=est.saturated)

    if config.sweep:
        est, frac, outcome = sweep_guess_fractions(
            scored, config.guess_fractions, config.gamma, config.delta,
            config.tau_audit, family)
        return [row(frac, outcome, est)]
    rows = []
    for frac in config.guess_fractions:
        if guess_count(len(scores), frac) == 0:
            rows.append(row(frac, AuditOutcome(len(scores), 0, 0),
                            EpsilonEstimate(0.0, 0.0, False)))
            continue
        outcome = tally(make_guesses(scored, frac), artifacts)
        est = empirical_epsilon(outcome, config.gamma, config.delta,
                                config.tau_audit, family)
        rows.append(row(frac, outcome, est))
    return rows


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Run the full grid: every theoretical epsilon, every repetition."""
    config.validate()
    report = ExperimentReport(config=config)
    for eps_index, eps in enumerate(config.eps_list):
        prepared = _prepare(config, eps_index, eps)
        reps = range(config.repetitions)
        if config.workers > 1:
            with ThreadPoolExecutor(max_workers=config.workers) as pool:
                chunks = list(pool.map(
                    lambda r: _run_repetition(config, eps_index, eps,
                                              prepared, r), reps))
        else:
            chunks = [_run_repetition(config, eps_index, eps, prepared, r)
                      for r in reps]
        for chunk in chunks:  # chunks arrive in repetition order
            report.rows.extend(chunk)
    return report


def write_report(report: ExperimentReport, path, fmt: str = "csv") -> None:
    """Write rows as CSV (fixed column order) or JSON (plus config echo)."""
    try:
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                writer = csv.writer(fh)
                writer.writerow(CSV_COLUMNS)
                for row in report.rows:
                    writer.writerow([getattr(row, col) for col in CSV_COLUMNS])
        elif fmt == "json":
            payload = {
                "schema_version": SCHEMA_VERSION,
                "config": dataclasses.asdict(report.config),
                "rows": [dataclasses.asdict(row) for row in report.rows],
            }
            with open(path, "w") as fh:
                json.dump(payload, fh, indent=2)
                fh.write("\n")
        else:
            raise ConfigError(f"unknown report format {fmt!r}")
    except OSError as exc:
        raise OSError(f"failed writing report to {path}: {exc}") from exc


def read_report_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)
