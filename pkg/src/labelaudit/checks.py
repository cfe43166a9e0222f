"""Self-contained property checks runnable from the CLI.

Each check returns (name, passed, detail).  ``run_checks`` prints one
PASS/FAIL line per check.  The smoke scale keeps the whole battery under a
few minutes with no network access; the pytest suite reuses these and adds
the full-scale acceptance runs.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .audit import AuditOutcome, empirical_epsilon, evaluate_audit
from .experiment import ExperimentConfig, run_experiment, rng_stream
from .game import ScoredGame, draw_artifacts, make_guesses, scores_from_probs, tally
from .mechanism import RandomizedResponse, rr_apply, rr_posterior_batch
from .proxy import LogisticConfig, _loss_and_grad, train_logistic
from .synthdata import sample_mixture, true_posterior
from .tradeoff import (
    EpsDeltaTradeoff,
    GaussianTradeoff,
    eps_from_tradeoff,
    fbar_inverse_bisect,
    shift_tradeoff,
)

GRID = np.linspace(0.0, 1.0, 1001)


def check_tradeoff_validity_grid():
    ok = True
    for f in (EpsDeltaTradeoff(0.0, 0.0), EpsDeltaTradeoff(1.0, 1e-5),
              EpsDeltaTradeoff(3.0, 0.1), GaussianTradeoff(0.0),
              GaussianTradeoff(0.5), GaussianTradeoff(4.0)):
        v = f.eval(GRID)
        ok &= bool(np.all(v >= 0) and np.all(v <= 1))
        ok &= bool(np.all(np.diff(v) <= 1e-12))
        ok &= bool(np.all(v <= 1.0 - GRID + 1e-12))
        mid = f.eval((GRID[:-2] + GRID[2:]) / 2)
        ok &= bool(np.all(mid <= (v[:-2] + v[2:]) / 2 + 1e-9))  # convexity
    return "tradeoff validity grid", ok, "range/monotone/1-x/convexity"


def check_inversion_consistency():
    ok = True
    worst = 0.0
    for f in (EpsDeltaTradeoff(np.log(2), 0.0), EpsDeltaTradeoff(2.0, 1e-3),
              GaussianTradeoff(1.0), shift_tradeoff(GaussianTradeoff(1.0), 0.1)):
        prev = -1.0
        fbar0 = 1.0 - f.eval(0.0)
        for r in np.linspace(0, 1, 201):
            x = f.fbar_inverse(float(r))
            ok &= x >= prev - 1e-12  # non-decreasing in r
            prev = x
            if r >= fbar0:  # below fbar(0) the set is empty and x clamps to 0
                gap = (1.0 - f.eval(x)) - r
                worst = max(worst, gap)
                ok &= gap <= 1e-9
            ok &= abs(x - fbar_inverse_bisect(f, float(r))) <= 1e-6
    return "inversion consistency", ok, f"max residual {worst:.2e}"


def check_eps_round_trip():
    errs = [abs(eps_from_tradeoff(EpsDeltaTradeoff(e, 0.0), 0.0) - e)
            for e in (0.1, 0.5, 1.0, 2.0, 4.0, 8.0)]
    return "eps(delta) round trip", max(errs) < 1e-3, f"max err {max(errs):.2e}"


def check_audit_hand_examples():
    f0 = EpsDeltaTradeoff(0.0, 0.0)
    got = (evaluate_audit(GaussianTradeoff(1.0), AuditOutcome(1000, 100, 0)),
           evaluate_audit(f0, AuditOutcome(2, 2, 2)),
           evaluate_audit(f0, AuditOutcome(5, 5, 5)))
    return "audit hand instances", got == (True, True, False), f"{got}"


def check_audit_monotonicity():
    ok = True
    # more correct guesses can only push epsilon up
    prev = -1.0
    for c in (700, 800, 900, 950):
        e = empirical_epsilon(AuditOutcome(10 ** 5, 1000, c)).eps
        ok &= e >= prev
        prev = e
    # stronger privacy claims are rejected whenever weaker ones are
    outcome = AuditOutcome(10 ** 5, 1000, 900)
    rejected = [not evaluate_audit(GaussianTradeoff(mu), outcome)
                for mu in (0.5, 1.0, 2.0, 4.0)]
    ok &= all(rejected[i] >= rejected[i + 1] for i in range(3))
    # a larger shift budget can only lower the bound
    prev = float("inf")
    for tau in (0.0, 1e-4, 1e-3, 1e-2, 1e-1):
        e = empirical_epsilon(outcome, tau=tau).eps
        ok &= e <= prev + 1e-12
        prev = e
    return "audit monotonicity (c / strength / tau)", ok, ""


def check_rr_exact_dp():
    ok = True
    for k in (2, 5, 10):
        mech = RandomizedResponse(eps=1.3, k=k)
        kern = mech.kernel()
        ok &= bool(np.allclose(kern.sum(axis=0), 1.0, atol=1e-12))
        ratio = np.log(kern.max() / kern.min())
        ok &= abs(ratio - 1.3) < 1e-12
    return "randomized response exact eps-DP", ok, "max log kernel ratio"


def check_posterior_normalization():
    rng = rng_stream(0, 99)
    mech = RandomizedResponse(eps=1.0, k=5)
    priors = rng.dirichlet(np.ones(5), size=200)
    noisy = rng.integers(0, 5, size=200)
    post = rr_posterior_batch(mech, noisy, priors)
    ok = bool(np.allclose(post.sum(axis=1), 1.0, atol=1e-9))
    # eps = 0 keeps the prior untouched
    flat = rr_posterior_batch(RandomizedResponse(0.0, 5), noisy, priors)
    ok &= bool(np.allclose(flat, priors, atol=1e-12))
    return "posterior normalization", ok, ""


def check_logistic_gradient():
    rng = rng_stream(0, 98)
    ds = sample_mixture(50, 3, 4, rng)
    xs = (ds.x - ds.x.mean(0)) / ds.x.std(0)
    y1h = np.eye(3)[ds.y0]
    w = rng.standard_normal((3, 4)) * 0.3
    b = rng.standard_normal(3) * 0.3
    _, gw, gb = _loss_and_grad(xs, y1h, w, b, 1e-4)
    eps = 1e-6
    worst = 0.0
    for arr, grad in ((w, gw), (b, gb)):
        it = np.nditer(arr, flags=["multi_index"])
        for _ in it:
            idx = it.multi_index
            orig = arr[idx]
            arr[idx] = orig + eps
            lp, _, _ = _loss_and_grad(xs, y1h, w, b, 1e-4)
            arr[idx] = orig - eps
            lm, _, _ = _loss_and_grad(xs, y1h, w, b, 1e-4)
            arr[idx] = orig
            worst = max(worst, abs((lp - lm) / (2 * eps) - grad[idx]))
    return "logistic gradient vs finite differences", worst < 1e-6, \
        f"max abs diff {worst:.2e}"


def check_logistic_loss_monotone():
    ds = sample_mixture(2000, 2, 5, rng_stream(0, 97))
    model = train_logistic(ds, LogisticConfig(iterations=100))
    ok = bool(np.all(np.diff(model.loss_history) <= 1e-12))
    return "logistic training loss non-increasing", ok, ""


def check_determinism(smoke: bool = True):
    cfg = ExperimentConfig(base_seed=42, n=2000, k=2, eps_list=(2.0,),
                           repetitions=3, guess_fractions=(0.05,))
    a = run_experiment(cfg)
    b = run_experiment(cfg)
    ok = [dataclasses.astuple(r) for r in a.rows] == \
        [dataclasses.astuple(r) for r in b.rows]
    return "full-run determinism", ok, "bitwise-equal rows"


def check_baseline_blindness(smoke: bool = True):
    # eps = 0 output carries no signal: adversary accuracy must sit at 1/2
    n, reps = (20_000, 30) if smoke else (100_000, 100)
    mech = RandomizedResponse(eps=0.0, k=2)
    ds = sample_mixture(n, 2, 5, rng_stream(7, 0))
    noisy = rr_apply(mech, ds.y0, rng_stream(7, 1))
    probs = true_posterior(ds.x, 2)
    evidence = np.eye(2)[noisy]
    total_c = total_cp = 0
    for rep in range(reps):
        rng = rng_stream(7, 2, rep)
        art = draw_artifacts(probs, rng)
        shown = np.where(art.b == 0, ds.y0, art.y1)
        scored = ScoredGame(scores_from_probs(evidence, probs, shown, 2.0),
                            shown, art)
        outcome = tally(make_guesses(scored, 0.01), art)
        total_c += outcome.c
        total_cp += outcome.c_prime
    acc = total_c / total_cp
    sigma = 0.5 / np.sqrt(total_cp)
    ok = abs(acc - 0.5) <= 4 * sigma
    return "baseline accuracy 0.5 when eps=0", ok, f"acc {acc:.4f}"


ALL_CHECKS = (
    check_tradeoff_validity_grid,
    check_inversion_consistency,
    check_eps_round_trip,
    check_audit_hand_examples,
    check_audit_monotonicity,
    check_rr_exact_dp,
    check_posterior_normalization,
    check_logistic_gradient,
    check_logistic_loss_monotone,
    check_determinism,
    check_baseline_blindness,
)


def run_checks(echo=print) -> bool:
    all_ok = True
    for fn in ALL_CHECKS:
        name, ok, detail = fn()
        all_ok &= bool(ok)
        status = "PASS" if ok else "FAIL"
        echo(f"[{status}] {name}" + (f" ({detail})" if detail else ""))
    return all_ok
