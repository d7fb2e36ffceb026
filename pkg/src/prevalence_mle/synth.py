"""Synthetic one-dimensional data from a pair of normal distributions.

Negatives and positives are drawn from two Gaussians whose means sit two
standard deviations apart under the defaults. Class counts are deterministic
(round(n * p) positives), so a generated evaluation set has exactly its
nominal proportion. Sampling uses PCG64 uniforms mapped through the inverse
normal CDF, so a seed pins the output across platforms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .scorer import SampleSet


@dataclass(frozen=True)
class GaussianPairConfig:
    negative_mean: float = 0.0
    positive_mean: float = 2.0
    std_dev: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if not self.std_dev > 0:
            raise ValueError(f"std_dev must be positive, got {self.std_dev}")


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def generate(config: GaussianPairConfig, n: int, p: float) -> SampleSet:
    """Draw ``n`` samples with exactly round(n*p) positives.

    Output order is fixed (negatives first, then positives); consumers must
    not rely on it. One uniform is drawn per sample, negatives first.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p {p!r} outside [0, 1]")
    n_pos = round_half_up(n * p)
    n_neg = n - n_pos
    rng = np.random.Generator(np.random.PCG64(config.seed))
    u = rng.random(n)
    u = np.maximum(u, 2.0 ** -53)  # keep the inverse CDF finite at u == 0
    normals = ndtri(u)
    values = np.empty(n)
    values[:n_neg] = config.negative_mean + config.std_dev * normals[:n_neg]
    values[n_neg:] = config.positive_mean + config.std_dev * normals[n_neg:]
    labels = np.zeros(n, dtype=bool)
    labels[n_neg:] = True
    return SampleSet(values.reshape(-1, 1), labels)
