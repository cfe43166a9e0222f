"""Proxy label distributions used to sample counterfactual labels.

Three kinds: the analytic ground-truth posterior, its tau-shifted binary
variant, and a from-scratch multinomial logistic regression trained on fresh
data.  All expose ``predict_proba`` and can be sampled from.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .synthdata import LabeledDataset, shifted_posterior, true_posterior


class ProxyError(ValueError):
    """Raised on invalid proxy arguments or failed training."""


class TrainingDivergenceError(ProxyError):
    """Logistic training produced a non-finite loss."""


class ProxyModel:
    """Base class; subclasses implement ``predict_proba``."""

    def predict_proba(self, x) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class GroundTruthProxy(ProxyModel):
    """Uses the exact mixture posterior y | x."""

    k: int

    def predict_proba(self, x) -> np.ndarray:
        return true_posterior(x, self.k)


@dataclass(frozen=True)
class ShiftedProxy(ProxyModel):
    """Binary proxy drawing class 1 w.p. min(true posterior + tau, 1)."""

    tau: float

    @property
    def k(self) -> int:
        return 2

    def predict_proba(self, x) -> np.ndarray:
        p1 = np.asarray(shifted_posterior(x, self.tau))
        return np.stack([1.0 - p1, p1], axis=-1)


@dataclass
class LogisticProxy(ProxyModel):
    """Multinomial logistic regression on standardized features."""

    weights: np.ndarray  # (k, d)
    bias: np.ndarray  # (k,)
    feat_mean: np.ndarray  # (d,)
    feat_std: np.ndarray  # (d,)
    loss_history: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        if not (np.all(np.isfinite(self.weights))
                and np.all(np.isfinite(self.bias))):
            raise ProxyError("logistic weights must be finite")

    @property
    def k(self) -> int:
        return self.weights.shape[0]

    @property
    def d(self) -> int:
        return self.weights.shape[1]

    def predict_proba(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.d:
            raise ProxyError(
                f"expected {self.d}-dimensional features, got {x.shape[-1]}")
        xs = (x - self.feat_mean) / self.feat_std
        logits = xs @ self.weights.T + self.bias
        logits = logits - logits.max(axis=-1, keepdims=True)
        p = np.exp(logits)
        return p / p.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class LogisticConfig:
    learning_rate: float = 0.1
    iterations: int = 500
    l2: float = 1e-4


def _loss_and_grad(xs, y_onehot, weights, bias, l2):
    n = len(xs)
    logits = xs @ weights.T + bias
    logits -= logits.max(axis=1, keepdims=True)
    logz = np.log(np.exp(logits).sum(axis=1))
    loss = (logz - logits[np.arange(n), np.argmax(y_onehot, axis=1)]).mean()
    loss += 0.5 * l2 * float((weights ** 2).sum())
    probs = np.exp(logits - logz[:, None])
    g = (probs - y_onehot) / n
    grad_w = g.T @ xs + l2 * weights
    grad_b = g.sum(axis=0)
    return loss, grad_w, grad_b


def train_logistic(data: LabeledDataset,
                   config: LogisticConfig = LogisticConfig()) -> LogisticProxy:
    """Fit by full-batch gradient descent on L2-penalized cross-entropy.

    The step is halved (backtracking) whenever it would increase the loss,
    so the recorded loss history is non-increasing.
    """
    if data.n == 0:
        raise ProxyError("training data must be non-empty")
    mean = data.x.mean(axis=0)
    std = data.x.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    xs = (data.x - mean) / std
    y_onehot = np.eye(data.k)[data.y0]

    weights = np.zeros((data.k, data.d))
    bias = np.zeros(data.k)
    lr = config.learning_rate
    loss, grad_w, grad_b = _loss_and_grad(xs, y_onehot, weights, bias,
                                          config.l2)
    history = [loss]
    for _ in range(config.iterations):
        while True:
            w_new = weights - lr * grad_w
            b_new = bias - lr * grad_b
            new_loss, gw_new, gb_new = _loss_and_grad(
                xs, y_onehot, w_new, b_new, config.l2)
            if not np.isfinite(new_loss):
                raise TrainingDivergenceError("loss became non-finite")
            if new_loss <= loss or lr < 1e-12:
                break
            lr *= 0.5
        if new_loss > loss:
            break  # step size exhausted; keep current iterate
        weights, bias = w_new, b_new
        loss, grad_w, grad_b = new_loss, gw_new, gb_new
        history.append(loss)
    return LogisticProxy(weights=weights, bias=bias, feat_mean=mean,
                         feat_std=std, loss_history=np.array(history))


def predict_proba(model: ProxyModel, x) -> np.ndarray:
    """Probability vector(s) over labels for a d-vector or (n, d) batch."""
    return model.predict_proba(x)


def sample_categorical(probs: np.ndarray,
                       rng: np.random.Generator) -> np.ndarray:
    """One draw per row of a (n, k) probability matrix."""
    u = rng.random(len(probs))
    cdf = np.cumsum(probs, axis=1)
    idx = (u[:, None] > cdf).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


def sample_counterfactual(model: ProxyModel, x,
                          rng: np.random.Generator):
    """Draw counterfactual label(s) from the proxy distribution at x."""
    probs = np.atleast_2d(model.predict_proba(x))
    draws = sample_categorical(probs, rng)
    return int(draws[0]) if np.asarray(x).ndim == 1 else draws


MODEL_HEADER = "labelaudit-logistic-proxy v1"


def save_model(model: LogisticProxy, path) -> None:
    """Write a fitted logistic proxy as self-describing text."""
    if not isinstance(model, LogisticProxy):
        raise ProxyError("only logistic proxies are serialized")
    lines = [MODEL_HEADER, f"{model.k} {model.d}"]
    for row in (model.feat_mean, model.feat_std, model.bias, *model.weights):
        lines.append(" ".join(repr(float(v)) for v in row))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_model(path) -> LogisticProxy:
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != MODEL_HEADER:
        raise ProxyError(f"{path}: not a {MODEL_HEADER!r} file")
    k, d = (int(v) for v in lines[1].split())
    rows = [np.array([float(v) for v in ln.split()]) for ln in lines[2:]]
    if (len(rows) != 3 + k or len(rows[0]) != d or len(rows[1]) != d
            or len(rows[2]) != k or any(len(r) != d for r in rows[3:])):
        raise ProxyError(f"{path}: malformed proxy file")
    return LogisticProxy(weights=np.vstack(rows[3:]), bias=rows[2],
                         feat_mean=rows[0], feat_std=rows[1])
