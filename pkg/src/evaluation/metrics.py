"""
Distances between inferred and reference posteriors.
"""

import math
from typing import Callable, Sequence

import numpy as np


def ks_statistic(samples: Sequence[float], oracle_cdf: Callable) -> float:
    """
    Kolmogorov-Smirnov distance between the empirical distribution of
    ``samples`` and a reference cdf.

    Args:
        samples: At least one sample value
        oracle_cdf: Vectorized reference cdf

    Returns:
        sup over sorted samples x_i of max(|F(x_i) - (i-1)/n|, |F(x_i) - i/n|)
    """
    values = np.sort(np.asarray(samples, dtype=float))
    n = len(values)
    if n == 0:
        raise ValueError("ks_statistic needs at least one sample")
    f = np.asarray(oracle_cdf(values), dtype=float)
    steps = np.arange(1, n + 1) / n
    return float(max(np.abs(f - (steps - 1.0 / n)).max(), np.abs(f - steps).max()))


def empirical_pmf(values: Sequence[int], support_size: int) -> np.ndarray:
    """Relative frequencies of the integers 0..support_size-1 (no smoothing)."""
    values = np.asarray(values, dtype=int)
    if len(values) == 0:
        raise ValueError("empirical_pmf needs at least one value")
    if values.min() < 0 or values.max() >= support_size:
        raise ValueError(f"values must lie in [0, {support_size})")
    return np.bincount(values, minlength=support_size) / len(values)


def kl_divergence(empirical: Sequence[float], oracle: Sequence[float]) -> float:
    """
    KL(empirical || oracle) over a shared finite support, with 0 ln 0 = 0.

    Empirical mass where the oracle has none gives +inf.
    """
    p = np.asarray(empirical, dtype=float)
    q = np.asarray(oracle, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"pmfs must share a support, got shapes {p.shape} and {q.shape}")
    mass = p > 0.0
    if np.any(q[mass] <= 0.0):
        return math.inf
    return max(0.0, float(np.sum(p[mass] * np.log(p[mass] / q[mass]))))


def mse(predictions: Sequence[float], labels: Sequence[float]) -> float:
    predictions = np.asarray(predictions, dtype=float)
    labels = np.asarray(labels, dtype=float)
    if predictions.shape != labels.shape:
        raise ValueError(f"mse needs equal lengths, got {predictions.shape} and {labels.shape}")
    return float(np.mean((predictions - labels) ** 2))
