"""k-ary randomized response and its Bayes posterior.

The audited mechanism is a label channel: it keeps each label with
probability e^eps / (e^eps + k - 1) and otherwise replaces it with a
uniformly random other class, which is exactly eps-Label-DP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


class MechanismError(ValueError):
    """Raised on invalid mechanism inputs."""


@dataclass(frozen=True)
class RandomizedResponse:
    eps: float
    k: int

    def __post_init__(self):
        if self.eps < 0:
            raise MechanismError(f"eps must be non-negative, got {self.eps}")
        if self.k < 2:
            raise MechanismError(f"k must be at least 2, got {self.k}")

    @property
    def keep_prob(self) -> float:
        return math.exp(self.eps) / (math.exp(self.eps) + self.k - 1)

    @property
    def flip_prob(self) -> float:
        """Probability of each specific other class."""
        return 1.0 / (math.exp(self.eps) + self.k - 1)

    def kernel(self) -> np.ndarray:
        """K[z, y] = Pr[output z | input y]; columns sum to 1."""
        kern = np.full((self.k, self.k), self.flip_prob)
        np.fill_diagonal(kern, self.keep_prob)
        return kern


def _check_labels(labels: np.ndarray, k: int) -> None:
    if labels.size and (labels.min() < 0 or labels.max() >= k):
        raise MechanismError(f"labels must lie in [0, {k})")


def rr_apply(mech: RandomizedResponse, labels,
             rng: np.random.Generator) -> np.ndarray:
    """Randomize each label independently through the RR channel.

    Consumes the caller's RNG stream; a fixed stream reproduces the output
    exactly (both uniform and offset draws happen for every sample).
    """
    labels = np.asarray(labels, dtype=np.int64)
    _check_labels(labels, mech.k)
    keep = rng.random(labels.shape) < mech.keep_prob
    offsets = rng.integers(1, mech.k, size=labels.shape)
    return np.where(keep, labels, (labels + offsets) % mech.k)


def rr_posterior(mech: RandomizedResponse, noisy_label: int,
                 prior) -> np.ndarray:
    """Bayes posterior over the true label given one RR output.

    posterior[y] is proportional to prior[y] * K(noisy_label | y).
    """
    prior = np.asarray(prior, dtype=float)
    if prior.shape != (mech.k,):
        raise MechanismError(f"prior must have length {mech.k}")
    if abs(prior.sum() - 1.0) > 1e-9:
        raise MechanismError("prior must sum to 1")
    if not 0 <= noisy_label < mech.k:
        raise MechanismError(f"noisy label {noisy_label} out of range")
    unnorm = prior * mech.flip_prob
    unnorm[noisy_label] = prior[noisy_label] * mech.keep_prob
    total = unnorm.sum()
    if total <= 0.0:
        raise MechanismError("posterior has zero total mass")
    return unnorm / total


def rr_posterior_batch(mech: RandomizedResponse, noisy_labels,
                       priors: np.ndarray) -> np.ndarray:
    """Row-wise ``rr_posterior``: priors is (n, k), noisy_labels is (n,)."""
    noisy_labels = np.asarray(noisy_labels, dtype=np.int64)
    _check_labels(noisy_labels, mech.k)
    unnorm = priors * mech.flip_prob
    rows = np.arange(len(noisy_labels))
    unnorm[rows, noisy_labels] = priors[rows, noisy_labels] * mech.keep_prob
    totals = unnorm.sum(axis=1, keepdims=True)
    if np.any(totals <= 0.0):
        raise MechanismError("posterior has zero total mass")
    return unnorm / totals
