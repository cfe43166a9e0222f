"""Synthetic Gaussian-mixture data with analytically known label posteriors.

Labels are uniform over k classes; features are x = e_y + z with z standard
normal in d dimensions and e_y the index vector for class y.  Because class
means are orthonormal and the covariance is the identity, the exact posterior
over the label is a softmax of the first k coordinates of x.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class DataError(ValueError):
    """Raised on invalid dataset arguments."""


@dataclass
class LabeledDataset:
    """Features x (n, d) with true labels y0 in {0..k-1}."""

    x: np.ndarray
    y0: np.ndarray
    k: int

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        self.y0 = np.asarray(self.y0, dtype=np.int64)
        if self.x.ndim != 2 or len(self.y0) != len(self.x):
            raise DataError("x must be (n, d) with matching labels")
        if self.k < 2:
            raise DataError(f"k must be at least 2, got {self.k}")
        if self.y0.size and (self.y0.min() < 0 or self.y0.max() >= self.k):
            raise DataError(f"labels must lie in [0, {self.k})")
        if not np.all(np.isfinite(self.x)):
            raise DataError("features must be finite")

    @property
    def n(self) -> int:
        return len(self.y0)

    @property
    def d(self) -> int:
        return self.x.shape[1]


def sample_mixture(n: int, k: int, d: int,
                   rng: np.random.Generator) -> LabeledDataset:
    """Draw n samples: y uniform over k classes, x | y ~ N(e_y, I_d)."""
    if d < k:
        raise DataError(f"need d >= k (index-vector means), got d={d}, k={k}")
    y = rng.integers(0, k, size=n)
    x = rng.standard_normal((n, d))
    x[np.arange(n), y] += 1.0
    return LabeledDataset(x=x, y0=y, k=k)


def true_posterior(x, k: int) -> np.ndarray:
    """Exact posterior over the label: softmax of the first k coordinates.

    Accepts a single d-vector or an (n, d) batch.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < k:
        raise DataError(f"need d >= k, got d={x.shape[-1]}, k={k}")
    logits = x[..., :k]
    logits = logits - logits.max(axis=-1, keepdims=True)
    p = np.exp(logits)
    return p / p.sum(axis=-1, keepdims=True)


def shifted_posterior(x, tau: float):
    """min(Pr[y = 1 | x] + tau, 1): the tau-shifted binary posterior.

    The TV distance between Bernoulli(shifted) and the true conditional
    is at most tau.  Binary only.
    """
    if not 0.0 <= tau <= 1.0:
        raise DataError(f"tau must lie in [0, 1], got {tau}")
    x = np.asarray(x, dtype=float)
    p1 = true_posterior(x, 2)[..., 1]
    out = np.minimum(p1 + tau, 1.0)
    return float(out) if out.ndim == 0 else out


FORMAT_NAME = "labelaudit-dataset"
FORMAT_VERSION = 1


def save_dataset(dataset: LabeledDataset, path) -> None:
    """Write a dataset as a self-describing .npz (x, y0, k plus format tag)."""
    np.savez(path, format=FORMAT_NAME, version=FORMAT_VERSION,
             n=dataset.n, k=dataset.k, d=dataset.d,
             x=dataset.x, y0=dataset.y0)


def load_dataset(path) -> LabeledDataset:
    with np.load(path, allow_pickle=False) as data:
        if str(data["format"]) != FORMAT_NAME:
            raise DataError(f"{path}: not a {FORMAT_NAME} file")
        return LabeledDataset(x=data["x"], y0=data["y0"], k=int(data["k"]))
