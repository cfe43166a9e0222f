"""Command-line entry points.

Subcommands:
  synth        write a synthetic Gaussian-mixture dataset file
  train-proxy  fit a logistic proxy on a dataset file and save it
  audit-rr     run the full randomized-response audit experiment
  check        run the property-check battery

``audit-rr`` reads a flat key = value config file (lists comma-separated);
every config key is also settable by a flag of the same name, with flags
taking precedence.  Exit codes: 0 success, 2 config error, 3 when
--strict is set and some repetition saturated the search family.
"""

from __future__ import annotations

import sys

import click
import numpy as np

from .checks import run_checks
from .experiment import (
    ConfigError,
    ExperimentConfig,
    run_experiment,
    rng_stream,
    write_report,
)
from .proxy import LogisticConfig, save_model, train_logistic
from .synthdata import load_dataset, sample_mixture, save_dataset

CONFIG_KEYS = {
    "n": int, "k": int, "d": int, "proxy_kind": str, "proxy_tau": float,
    "tau_audit": float, "t": float, "gamma": float, "delta": float,
    "repetitions": int, "sweep": bool, "score_mode": str,
    "resample_all": bool, "workers": int, "mu_min": float, "mu_max": float,
    "mu_tol": float,
}
LIST_KEYS = {"eps_list": float, "guess_fractions": float}


def _parse_bool(raw: str) -> bool:
    if raw.lower() in ("1", "true", "yes", "on"):
        return True
    if raw.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def parse_config_file(path) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment; lists use commas."""
    values = {}
    try:
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"line {lineno}: expected key = value")
                key, raw = (part.strip() for part in line.split("=", 1))
                if key in LIST_KEYS:
                    values[key] = tuple(LIST_KEYS[key](v)
                                        for v in raw.split(","))
                elif key in CONFIG_KEYS:
                    caster = CONFIG_KEYS[key]
                    values[key] = _parse_bool(raw) if caster is bool \
                        else caster(raw)
                elif key in ("base_seed", "seed"):
                    values["base_seed"] = int(raw)
                else:
                    raise ValueError(f"line {lineno}: unknown key {key!r}")
    except (OSError, ValueError) as exc:
        raise click.UsageError(f"config file {path}: {exc}")
    return values


@click.group()
def main():
    """Observational Label-DP auditing toolkit."""


@main.command()
@click.option("--n", type=int, default=10 ** 6, show_default=True)
@click.option("--k", type=int, default=2, show_default=True)
@click.option("--d", type=int, default=5, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--out", type=click.Path(writable=True), required=True)
def synth(n, k, d, seed, out):
    """Sample a Gaussian-mixture dataset and write it to OUT (.npz)."""
    try:
        ds = sample_mixture(n, k, d, rng_stream(seed, 0))
    except ValueError as exc:
        raise click.UsageError(str(exc))
    save_dataset(ds, out)
    click.echo(f"wrote {ds.n} samples (k={ds.k}, d={ds.d}) to {out}")


@main.command("train-proxy")
@click.option("--data", type=click.Path(exists=True), required=True)
@click.option("--out", type=click.Path(writable=True), required=True)
@click.option("--learning-rate", type=float, default=0.1, show_default=True)
@click.option("--iterations", type=int, default=500, show_default=True)
@click.option("--l2", type=float, default=1e-4, show_default=True)
def train_proxy(data, out, learning_rate, iterations, l2):
    """Fit a logistic proxy on a dataset file and save it as text."""
    ds = load_dataset(data)
    model = train_logistic(ds, LogisticConfig(learning_rate=learning_rate,
                                              iterations=iterations, l2=l2))
    save_model(model, out)
    click.echo(f"trained logistic proxy (final loss "
               f"{model.loss_history[-1]:.5f}), saved to {out}")


def _config_options(fn):
    for key, caster in reversed(list(CONFIG_KEYS.items())):
        flag = "--" + key.replace("_", "-")
        if caster is bool:
            fn = click.option(flag + "/--no-" + key.replace("_", "-"),
                              default=None)(fn)
        else:
            fn = click.option(flag, type=caster, default=None)(fn)
    for key in reversed(list(LIST_KEYS)):
        fn = click.option("--" + key.replace("_", "-"), type=str,
                          default=None)(fn)
    return fn


@main.command("audit-rr")
@click.option("--config", "config_path", type=click.Path(exists=True),
              default=None, help="flat key = value config file")
@click.option("--seed", type=int, required=True,
              help="base seed (config key base_seed)")
@click.option("--out", type=click.Path(writable=True), default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]),
              default="csv", show_default=True)
@click.option("--smoke", is_flag=True,
              help="preset n=1e5, 20 repetitions for quick runs")
@click.option("--strict", is_flag=True,
              help="exit 3 if any repetition saturated the mu range")
@_config_options
def audit_rr(config_path, seed, out, fmt, smoke, strict, **flags):
    """Run the repeated-game audit and report empirical epsilon rows."""
    values = parse_config_file(config_path) if config_path else {}
    if smoke:
        values.setdefault("n", 10 ** 5)
        values.setdefault("repetitions", 20)
    for key, value in flags.items():
        if value is None:
            continue
        if key in LIST_KEYS:
            value = tuple(LIST_KEYS[key](v) for v in value.split(","))
        values[key] = value
    values["base_seed"] = seed
    try:
        config = ExperimentConfig(**values)
        config.validate()
    except (TypeError, ValueError) as exc:
        raise click.UsageError(str(exc))

    report = run_experiment(config)
    if out:
        write_report(report, out, fmt)
        click.echo(f"wrote {len(report.rows)} rows to {out}")
    for s in report.summaries():
        sat = " SATURATED" if s.any_saturated else ""
        click.echo(f"eps={s.theoretical_eps:g} fraction={s.guess_fraction:g}"
                   f" empirical_eps={s.mean_emp_eps:.4f}"
                   f" +/- {s.std_emp_eps:.4f}"
                   f" accuracy={s.mean_accuracy:.4f}{sat}")
    if strict and report.any_saturated:
        click.echo("saturation detected: widen the mu search range",
                   err=True)
        sys.exit(3)


@main.command()
def check():
    """Run the property-check battery (smoke scale, no network)."""
    ok = run_checks(echo=click.echo)
    if not ok:
        sys.exit(1)
    click.echo("all checks passed")


if __name__ == "__main__":
    main()
