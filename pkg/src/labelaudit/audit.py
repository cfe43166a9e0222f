"""Audit decision recursion and empirical epsilon extraction.

``evaluate_audit`` decides whether the evidence (m canaries, c' guesses, c of
them correct) rejects the claim that the audited mechanism satisfies a given
trade-off curve, at confidence 1 - gamma.  ``empirical_epsilon`` searches the
Gaussian family for the strongest curve the evidence does not reject and
converts it to eps(delta).
"""

from __future__ import annotations

from dataclasses import dataclass

from .tradeoff import (
    GaussianFamily,
    TradeoffFunction,
    eps_from_tradeoff,
    shift_tradeoff,
)

DEFAULT_GAMMA = 0.05
DEFAULT_DELTA = 1e-5


class AuditError(ValueError):
    """Raised on invalid audit inputs."""


class InternalConsistencyError(RuntimeError):
    """Accept/reject pattern non-monotone across the family bracket.

    Signals a broken trade-off implementation: stronger curves must be
    rejected whenever weaker ones are.
    """


@dataclass(frozen=True)
class AuditOutcome:
    """Game transcript summary: m canaries, c_prime guesses, c correct."""

    m: int
    c_prime: int
    c: int

    def __post_init__(self):
        if self.m < 1:
            raise AuditError(f"m must be positive, got {self.m}")
        if not 0 <= self.c <= self.c_prime <= self.m:
            raise AuditError(
                f"need 0 <= c <= c_prime <= m, got c={self.c}, "
                f"c_prime={self.c_prime}, m={self.m}")


def evaluate_audit(f: TradeoffFunction, outcome: AuditOutcome,
                   gamma: float = DEFAULT_GAMMA) -> bool:
    """Decide whether f-DP is consistent with the outcome.

    Runs the backward recursion
        r[c] = gamma * c / m,  h[c] = gamma * (c' - c) / m,
        h[i] = fbar^-1(r[i+1]),
        r[i] = r[i+1] + i / (c' - i) * (h[i] - h[i+1]),    i = c-1 .. 0,
    and returns False iff r[0] + h[0] >= c' / m, i.e. under f-DP the
    probability of c or more correct guesses out of c' is below gamma
    (the claim f is rejected by the evidence).  True means not rejected.
    """
    if not 0.0 < gamma < 1.0:
        raise AuditError(f"gamma must lie in (0, 1), got {gamma}")
    m, cp, c = outcome.m, outcome.c_prime, outcome.c
    if cp == 0:
        return True  # no guesses, no evidence
    threshold = cp / m
    inverse = f.fbar_inverse
    r_next = gamma * c / m
    h_next = min(1.0, gamma * (cp - c) / m)
    for i in range(c - 1, -1, -1):
        # loop index i < c <= c', so c' - i >= 1: no division by zero
        h_i = min(1.0, inverse(min(1.0, r_next)))
        r_next = r_next + (i / (cp - i)) * (h_i - h_next)
        if h_i >= h_next and r_next + h_i >= threshold:
            # once h stops decreasing, r and h are non-decreasing for the
            # rest of the recursion, so the final r[0] + h[0] can only be
            # larger: the rejection decision is already settled
            return False
        h_next = h_i
    return not (r_next + h_next >= threshold)


def audit_with_shift(f: TradeoffFunction, tau: float, outcome: AuditOutcome,
                     gamma: float = DEFAULT_GAMMA) -> bool:
    """Audit f after absorbing a simulator TV error of at most tau.

    False means: were the mechanism f-DP w.r.t. the imputation simulator
    with TV shift <= tau, the observed count would occur with probability
    <= gamma, so the claim is rejected at confidence 1 - gamma.
    """
    return evaluate_audit(shift_tradeoff(f, tau), outcome, gamma)


@dataclass(frozen=True)
class EpsilonEstimate:
    """Empirical epsilon lower bound with the boundary mu that produced it."""

    eps: float
    mu: float
    saturated: bool = False


def empirical_epsilon(outcome: AuditOutcome,
                      gamma: float = DEFAULT_GAMMA,
                      delta: float = DEFAULT_DELTA,
                      tau: float = 0.0,
                      family: GaussianFamily | None = None,
                      max_iter: int = 40) -> EpsilonEstimate:
    """Strongest Gaussian curve not rejected by the audit, as eps(delta).

    Bisects over mu for the boundary mu* = inf{mu : curve accepted} to the
    family tolerance; smaller mu is stronger privacy, so acceptance is
    monotone in mu.  If even mu_min is accepted the bound is 0; if every mu
    is rejected the estimate saturates at mu_max (flagged, not fatal).
    """
    if family is None:
        family = GaussianFamily()

    def accepted(mu: float) -> bool:
        return audit_with_shift(family.curve(mu), tau, outcome, gamma)

    accept_min = accepted(family.mu_min)
    accept_max = accepted(family.mu_max)
    if accept_min and not accept_max:
        raise InternalConsistencyError(
            "mu_min accepted but mu_max rejected: acceptance is not "
            "monotone in mu")
    if accept_min:
        return EpsilonEstimate(0.0, family.mu_min, False)
    if not accept_max:
        return EpsilonEstimate(
            eps_from_tradeoff(family.curve(family.mu_max), delta),
            family.mu_max, True)

    lo, hi = family.mu_min, family.mu_max  # lo rejected, hi accepted
    for _ in range(max_iter):
        if hi - lo <= family.tolerance:
            break
        mid = 0.5 * (lo + hi)
        if accepted(mid):
            hi = mid
        else:
            lo = mid
    return EpsilonEstimate(eps_from_tradeoff(family.curve(hi), delta), hi,
                           False)


def best_epsilon_over_guess_sweep(scored, fractions,
                                  gamma: float = DEFAULT_GAMMA,
                                  delta: float = DEFAULT_DELTA,
                                  tau: float = 0.0,
                                  family: GaussianFamily | None = None):
    """Maximize empirical epsilon over guess fractions.

    For each fraction the top-|score| samples become guesses, the outcome is
    audited, and the largest epsilon wins; ties go to the smaller fraction.
    Returns (eps, best_fraction).
    """
    est, frac, _ = sweep_guess_fractions(scored, fractions, gamma, delta,
                                         tau, family)
    return est.eps, frac


def sweep_guess_fractions(scored, fractions,
                          gamma: float = DEFAULT_GAMMA,
                          delta: float = DEFAULT_DELTA,
                          tau: float = 0.0,
                          family: GaussianFamily | None = None):
    """Detailed sweep: returns (best EpsilonEstimate, fraction, outcome)."""
    from .game import guess_count, make_guesses, tally  # avoid import cycle

    fractions = list(fractions)
    if not fractions:
        raise AuditError("fraction list must be non-empty")
    m = len(scored.scores)
    best = None
    for frac in sorted(fractions):
        if guess_count(m, frac) == 0:
            # too small to guess at all: contributes eps = 0
            est = EpsilonEstimate(0.0, 0.0, False)
            outcome = AuditOutcome(m, 0, 0)
        else:
            guesses = make_guesses(scored, frac)
            outcome = tally(guesses, scored.bits)
            est = empirical_epsilon(outcome, gamma, delta, tau, family)
        if best is None or est.eps > best[0].eps:
            best = (est, frac, outcome)
    return best
