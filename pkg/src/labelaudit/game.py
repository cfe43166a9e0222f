"""The one-run observational attribute-inference game.

Every training sample is a canary.  The mechanism randomizes the true labels
once; the challenger then flips a fair coin b_i per sample and shows the
adversary either the real label (b_i = 0) or a counterfactual drawn from the
proxy (b_i = 1).  The adversary scores each sample, abstains outside the
top-|score| fraction, and its (c, c') tally feeds the audit recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .audit import AuditOutcome
from .mechanism import RandomizedResponse, rr_apply, rr_posterior_batch
from .proxy import ProxyModel, sample_categorical
from .synthdata import LabeledDataset

ABSTAIN = -1  # encoding of the "no guess" symbol in GuessVector.guesses
DEFAULT_SCORE_EXPONENT = 2.0

# How Pr[real label = shown | mechanism output] is instantiated for RR:
#   "onehot"    reads the noisy label as a one-hot prediction vector, so the
#               term is 1[noisy == shown].  This concentrates guesses on
#               rare low-prior agreements and is what makes the audit tight.
#   "posterior" uses the Bayes posterior over the real label given the noisy
#               label with the proxy as prior.
SCORE_MODES = ("onehot", "posterior")
DEFAULT_SCORE_MODE = "onehot"


class GameError(ValueError):
    """Raised on invalid game inputs."""


@dataclass
class GameArtifacts:
    """Hidden per-sample coins b and counterfactual labels y1."""

    b: np.ndarray
    y1: np.ndarray

    def __post_init__(self):
        if len(self.b) != len(self.y1):
            raise GameError("b and y1 must have equal length")


@dataclass
class ScoredGame:
    """Adversary scores plus the labels it saw and the hidden artifacts."""

    scores: np.ndarray
    shown_labels: np.ndarray
    bits: GameArtifacts

    def __post_init__(self):
        if not np.all(np.isfinite(self.scores)):
            raise GameError("scores must be finite")


@dataclass
class GuessVector:
    """Per-sample guesses in {0, 1, ABSTAIN}."""

    guesses: np.ndarray

    @property
    def c_prime(self) -> int:
        return int(np.count_nonzero(self.guesses != ABSTAIN))


def draw_artifacts(proxy_probs: np.ndarray,
                   rng: np.random.Generator) -> GameArtifacts:
    """Sample (b, y1) for all samples: fair coins, then proxy draws."""
    m = len(proxy_probs)
    b = rng.integers(0, 2, size=m)
    y1 = sample_categorical(proxy_probs, rng)
    return GameArtifacts(b=b, y1=y1)


def play_game(dataset: LabeledDataset, mech: RandomizedResponse,
              proxy: ProxyModel, rng: np.random.Generator):
    """Run the observational game once.

    The mechanism consumes only the real labels, and it runs before any
    game artifact is drawn: the training side is untouched by the audit.
    Returns (noisy_labels, artifacts, shown_labels).
    """
    noisy = rr_apply(mech, dataset.y0, rng)
    probs = proxy.predict_proba(dataset.x)
    artifacts = draw_artifacts(probs, rng)
    shown = np.where(artifacts.b == 0, dataset.y0, artifacts.y1)
    return noisy, artifacts, shown


def mechanism_evidence(mech: RandomizedResponse, noisy_labels,
                       proxy_probs: np.ndarray,
                       score_mode: str = DEFAULT_SCORE_MODE) -> np.ndarray:
    """Per-sample (n, k) matrix standing in for Pr[real label | M output]."""
    if score_mode == "onehot":
        return np.eye(mech.k)[np.asarray(noisy_labels, dtype=np.int64)]
    if score_mode == "posterior":
        return rr_posterior_batch(mech, noisy_labels, proxy_probs)
    raise GameError(f"score_mode must be one of {SCORE_MODES}, "
                    f"got {score_mode!r}")


def scores_from_probs(evidence: np.ndarray, proxy_probs: np.ndarray,
                      shown_labels: np.ndarray,
                      t: float = DEFAULT_SCORE_EXPONENT) -> np.ndarray:
    """Combined score from precomputed probability matrices.

    s1 = Pr[real = shown | mechanism output] - Pr[shown | proxy],
    s2 = 1 - Pr[shown | proxy], score = s1 * s2^t.
    """
    if t < 0:
        raise GameError(f"score exponent t must be non-negative, got {t}")
    rows = np.arange(len(shown_labels))
    p_shown = proxy_probs[rows, shown_labels]
    s1 = evidence[rows, shown_labels] - p_shown
    s2 = 1.0 - p_shown
    return s1 * s2 ** t


def score_samples(noisy_labels, shown_labels, dataset: LabeledDataset,
                  mech: RandomizedResponse, proxy: ProxyModel,
                  t: float = DEFAULT_SCORE_EXPONENT,
                  score_mode: str = DEFAULT_SCORE_MODE,
                  proxy_probs: np.ndarray | None = None,
                  bits: GameArtifacts | None = None) -> ScoredGame:
    """Score every sample for the adversary.

    The adversary knows the proxy distribution and the mechanism
    description, nothing more.  ``proxy_probs`` may carry a precomputed
    predict_proba matrix; ``score_mode`` picks the s1 instantiation.
    """
    if proxy_probs is None:
        proxy_probs = proxy.predict_proba(dataset.x)
    evidence = mechanism_evidence(mech, noisy_labels, proxy_probs, score_mode)
    scores = scores_from_probs(evidence, proxy_probs, shown_labels, t)
    if bits is None:
        bits = GameArtifacts(b=np.full(len(scores), -1),
                             y1=np.asarray(shown_labels))
    return ScoredGame(scores=scores, shown_labels=np.asarray(shown_labels),
                      bits=bits)


def guess_count(m: int, fraction: float) -> int:
    """c' = round-half-up of fraction * m."""
    if not 0.0 < fraction <= 1.0:
        raise GameError(f"fraction must lie in (0, 1], got {fraction}")
    return int(np.floor(fraction * m + 0.5))


def make_guesses(scored: ScoredGame, fraction: float) -> GuessVector:
    """Guess on the top-|score| fraction; abstain elsewhere.

    A positive score says the shown label is better explained by the
    mechanism output, so the guess is 0 (real); otherwise 1, including
    exact zeros.  |score| ties break toward the smaller sample index.
    """
    m = len(scored.scores)
    cp = guess_count(m, fraction)
    if cp < 1:
        raise GameError(f"fraction {fraction} rounds to zero guesses")
    order = np.argsort(-np.abs(scored.scores), kind="stable")
    chosen = order[:cp]
    guesses = np.full(m, ABSTAIN, dtype=np.int8)
    guesses[chosen] = np.where(scored.scores[chosen] > 0, 0, 1)
    return GuessVector(guesses=guesses)


def tally(guesses: GuessVector, artifacts: GameArtifacts) -> AuditOutcome:
    """Count guesses and correct guesses into an AuditOutcome."""
    g = guesses.guesses
    if len(g) != len(artifacts.b):
        raise GameError("guess vector and artifacts differ in length")
    active = g != ABSTAIN
    cp = int(np.count_nonzero(active))
    c = int(np.count_nonzero(active & (g == artifacts.b)))
    return AuditOutcome(m=len(g), c_prime=cp, c=c)


def dump_transcript(path, dataset: LabeledDataset, noisy_labels,
                    artifacts: GameArtifacts, scored: ScoredGame,
                    guesses: GuessVector | None = None) -> None:
    """Per-sample debug dump as tab-separated text."""
    g = guesses.guesses if guesses is not None else np.full(dataset.n, ABSTAIN)
    with open(path, "w") as fh:
        fh.write("i\tb\ty0\ty1\tnoisy\tshown\tscore\tguess\n")
        for i in range(dataset.n):
            fh.write(f"{i}\t{artifacts.b[i]}\t{dataset.y0[i]}\t"
                     f"{artifacts.y1[i]}\t{noisy_labels[i]}\t"
                     f"{scored.shown_labels[i]}\t{scored.scores[i]!r}\t"
                     f"{g[i]}\n")
