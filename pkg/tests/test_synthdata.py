"""Gaussian-mixture sampler and its analytic posteriors."""

import math

import numpy as np
import pytest

from labelaudit.synthdata import (
    DataError,
    LabeledDataset,
    load_dataset,
    sample_mixture,
    save_dataset,
    shifted_posterior,
    true_posterior,
)

E_OVER_1PE = math.e / (1.0 + math.e)  # softmax(1, 0) first coordinate


def test_dataset_validation():
    with pytest.raises(DataError):
        LabeledDataset(x=np.zeros(5), y0=np.zeros(5, dtype=int), k=2)
    with pytest.raises(DataError):
        LabeledDataset(x=np.zeros((5, 3)), y0=np.zeros(4, dtype=int), k=2)
    with pytest.raises(DataError):
        LabeledDataset(x=np.zeros((5, 3)), y0=np.full(5, 2), k=2)
    with pytest.raises(DataError):
        LabeledDataset(x=np.full((2, 3), np.nan), y0=np.zeros(2, dtype=int),
                       k=2)


def test_sample_mixture_shapes(rng):
    ds = sample_mixture(100, 3, 5, rng)
    assert ds.x.shape == (100, 5)
    assert ds.n == 100 and ds.d == 5 and ds.k == 3
    assert ds.y0.min() >= 0 and ds.y0.max() < 3


def test_sample_mixture_requires_enough_dims(rng):
    with pytest.raises(DataError):
        sample_mixture(10, 5, 3, rng)


def test_sample_mixture_moments(rng):
    n, k, d = 200_000, 4, 6
    ds = sample_mixture(n, k, d, rng)
    # uniform labels: 4 sigma multinomial bound per class
    sigma = math.sqrt((1 / k) * (1 - 1 / k) / n)
    for y in range(k):
        assert abs(np.mean(ds.y0 == y) - 1 / k) <= 4 * sigma
        sel = ds.x[ds.y0 == y]
        mean = sel.mean(axis=0)
        expected = np.zeros(d)
        expected[y] = 1.0
        assert np.allclose(mean, expected, atol=0.02)
        cov = np.cov(sel.T)
        assert np.linalg.norm(cov - np.eye(d)) < 0.05


def test_sample_mixture_deterministic():
    a = sample_mixture(500, 2, 5, np.random.default_rng(1))
    b = sample_mixture(500, 2, 5, np.random.default_rng(1))
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y0, b.y0)


def test_true_posterior_hand_values():
    # equal logits give the uniform posterior
    assert np.allclose(true_posterior(np.zeros(5), 3), np.full(3, 1 / 3))
    # x = e_0: softmax(1, 0) = (e, 1) / (e + 1)
    x = np.array([1.0, 0.0, 0.3, -0.7])
    assert np.allclose(true_posterior(x, 2),
                       [E_OVER_1PE, 1.0 - E_OVER_1PE], atol=1e-12)


def test_true_posterior_batch_matches_single(rng):
    xs = rng.standard_normal((50, 6))
    batch = true_posterior(xs, 4)
    assert np.allclose(batch.sum(axis=1), 1.0, atol=1e-12)
    for i in range(50):
        assert np.allclose(batch[i], true_posterior(xs[i], 4), atol=1e-15)


def test_true_posterior_permutation_equivariance(rng):
    xs = rng.standard_normal((30, 4))
    perm = np.array([2, 0, 3, 1])
    permuted = xs.copy()
    permuted[:, :4] = xs[:, perm]
    assert np.allclose(true_posterior(permuted, 4),
                       true_posterior(xs, 4)[:, perm], atol=1e-12)


def test_true_posterior_requires_enough_dims():
    with pytest.raises(DataError):
        true_posterior(np.zeros(3), 5)


def test_posterior_is_calibrated(rng):
    # bin by predicted Pr[y = 1 | x]; empirical rate must match the bin mean
    ds = sample_mixture(200_000, 2, 5, rng)
    p1 = true_posterior(ds.x, 2)[:, 1]
    for lo in np.arange(0.0, 1.0, 0.1):
        sel = (p1 >= lo) & (p1 < lo + 0.1)
        if sel.sum() < 500:
            continue
        predicted = p1[sel].mean()
        observed = np.mean(ds.y0[sel] == 1)
        sigma = math.sqrt(predicted * (1 - predicted) / sel.sum())
        assert abs(observed - predicted) <= 4 * sigma + 1e-3


def test_shifted_posterior(rng):
    xs = rng.standard_normal((100, 5))
    p1 = true_posterior(xs, 2)[:, 1]
    assert np.allclose(shifted_posterior(xs, 0.0), p1, atol=1e-15)
    for tau in (1e-3, 0.05, 0.5):
        shifted = shifted_posterior(xs, tau)
        assert np.all(shifted <= 1.0)
        # TV between the two Bernoulli conditionals is exactly the gap
        assert np.all(np.abs(shifted - p1) <= tau + 1e-15)
    assert np.allclose(shifted_posterior(xs, 1.0), 1.0)
    with pytest.raises(DataError):
        shifted_posterior(xs, 1.5)


def test_save_load_round_trip(tmp_path, rng):
    ds = sample_mixture(200, 3, 4, rng)
    path = tmp_path / "ds.npz"
    save_dataset(ds, path)
    loaded = load_dataset(path)
    assert np.array_equal(loaded.x, ds.x)
    assert np.array_equal(loaded.y0, ds.y0)
    assert loaded.k == ds.k


def test_load_rejects_foreign_file(tmp_path):
    path = tmp_path / "other.npz"
    np.savez(path, format="something-else", x=np.zeros((2, 2)))
    with pytest.raises(DataError):
        load_dataset(path)
