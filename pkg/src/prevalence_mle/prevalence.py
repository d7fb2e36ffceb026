"""Mixture likelihood of the positive proportion and its grid-argmax estimate.

Given class-conditional score densities, a bag of scores is modeled per bin
as the mixture pi * P(bin|+) + (1 - pi) * P(bin|-). The log-likelihood of pi
sums the log mixture mass over the bag; the estimator evaluates it on a
uniform grid over [0, 1] and returns the argmax. The naive baseline simply
counts scores above a threshold.

Everything here works in log space and depends on the score bag only through
its per-bin counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import ScoreProfile, bin_counts, bin_index
from .errors import EmptyDataError, ZeroMassError

DEFAULT_GRID_STEPS = 1001


@dataclass(frozen=True)
class LikelihoodCurve:
    """Log-likelihood values over a uniform grid of candidate proportions."""

    grid: np.ndarray
    log_likelihood: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float).ravel()
        values = np.asarray(self.log_likelihood, dtype=float).ravel()
        if grid.shape != values.shape:
            raise ValueError("grid and log_likelihood lengths differ")
        if grid.size < 2 or grid[0] != 0.0 or grid[-1] != 1.0 or (np.diff(grid) <= 0).any():
            raise ValueError("grid must increase strictly from 0 to 1")
        if not np.isfinite(values).all():
            raise ValueError("log-likelihood values must be finite")
        grid.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "log_likelihood", values)


@dataclass(frozen=True)
class PrevalenceEstimate:
    """Grid-argmax estimate of the positive proportion."""

    pi_hat: float
    grid_step: float
    tie_broken: bool


def score_mass(profile: ScoreProfile, b: float, pi: float) -> float:
    """Mixture mass of score ``b`` under positive proportion ``pi``."""
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"pi {pi!r} outside [0, 1]")
    idx = bin_index(b, profile.bin_count)
    positive = float(profile.positive.masses[idx])
    negative = float(profile.negative.masses[idx])
    # Endpoints collapse to one class density exactly; in between the delta
    # form keeps identical densities exactly flat in pi.
    if pi == 0.0:
        return negative
    if pi == 1.0:
        return positive
    return negative + pi * (positive - negative)


def log_likelihood(profile: ScoreProfile, scores, pi: float) -> float:
    """Sum of log mixture masses of the score bag at proportion ``pi``."""
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"pi {pi!r} outside [0, 1]")
    counts = _occupancy(profile, scores)
    positive = profile.positive.masses
    negative = profile.negative.masses
    if pi == 0.0:
        mixture = negative
    elif pi == 1.0:
        mixture = positive
    else:
        mixture = negative + pi * (positive - negative)
    occupied = counts > 0
    if (mixture[occupied] <= 0.0).any():
        bin_id = int(np.flatnonzero(occupied & (mixture <= 0.0))[0])
        raise ZeroMassError(
            f"bin {bin_id} holds scores but has zero mixture mass at pi={pi}; "
            "fit the profile with a positive pseudo_count"
        )
    return float(np.log(mixture[occupied]) @ counts[occupied])


def mle_grid(
    profile: ScoreProfile,
    scores,
    grid_steps: int = DEFAULT_GRID_STEPS,
) -> tuple[PrevalenceEstimate, LikelihoodCurve]:
    """Maximize the log-likelihood over a uniform grid of proportions.

    Returns the smallest grid value attaining the maximum; ``tie_broken``
    reports whether more than one grid point did. The full curve comes back
    alongside the estimate.
    """
    if grid_steps < 2:
        raise ValueError(f"grid_steps must be >= 2, got {grid_steps}")
    counts = _occupancy(profile, scores)
    occupied = counts > 0
    positive = profile.positive.masses[occupied]
    negative = profile.negative.masses[occupied]
    # The grid includes both endpoints, where the mixture collapses to one
    # class density; occupied bins must have mass under both.
    for name, masses in (("negative", negative), ("positive", positive)):
        if (masses <= 0.0).any():
            raise ZeroMassError(
                f"an occupied bin has zero {name} mass; "
                "fit the profile with a positive pseudo_count"
            )
    grid = np.linspace(0.0, 1.0, grid_steps)
    mixture = np.outer(grid, positive - negative) + negative
    values = np.log(mixture) @ counts[occupied]
    best = values.max()
    hits = np.flatnonzero(values == best)
    estimate = PrevalenceEstimate(
        pi_hat=float(grid[hits[0]]),
        grid_step=1.0 / (grid_steps - 1),
        tie_broken=hits.size > 1,
    )
    return estimate, LikelihoodCurve(grid=grid, log_likelihood=values)


def naive_estimate(scores, threshold: float = 0.5) -> float:
    """Fraction of scores strictly above the decision threshold."""
    scores = np.asarray(scores, dtype=float).ravel()
    if scores.size == 0:
        raise EmptyDataError("cannot estimate a proportion from no scores")
    return float(np.count_nonzero(scores > threshold)) / scores.size


def mean_score_estimate(scores) -> float:
    """Average predicted probability; the soft variant of the naive estimate."""
    scores = np.asarray(scores, dtype=float).ravel()
    if scores.size == 0:
        raise EmptyDataError("cannot estimate a proportion from no scores")
    return float(scores.mean())


def _occupancy(profile: ScoreProfile, scores) -> np.ndarray:
    scores = np.asarray(scores, dtype=float).ravel()
    if scores.size == 0:
        raise EmptyDataError("score bag is empty")
    return bin_counts(scores, profile.bin_count)
