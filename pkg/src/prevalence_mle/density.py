"""Histogram approximation of the class-conditional score distributions.

Scores live in [0, 1] and are binned into N equal-width intervals, with the
last bin closed at 1.0. A fitted histogram is normalized to a probability
mass per bin; optional additive smoothing keeps every mass strictly positive
so downstream log-likelihoods stay finite.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import EmptyDataError, ScoreRangeError, SingleClassError

DEFAULT_BIN_COUNT = 3
DEFAULT_PSEUDO_COUNT = 0.5

_MASS_SUM_TOL = 1e-12


def bin_index(b: float, n: int) -> int:
    """Index of the bin containing score ``b``: floor(b*n), with 1.0 in the last bin."""
    if n < 1:
        raise ValueError(f"bin count must be >= 1, got {n}")
    if not 0.0 <= b <= 1.0:
        raise ScoreRangeError(f"score {b!r} outside [0, 1]")
    idx = int(b * n)
    return n - 1 if idx >= n else idx


def bin_counts(scores, n: int) -> np.ndarray:
    """Per-bin occupancy counts for a collection of scores."""
    if n < 1:
        raise ValueError(f"bin count must be >= 1, got {n}")
    scores = np.asarray(scores, dtype=float).ravel()
    if scores.size:
        bad = ~((scores >= 0.0) & (scores <= 1.0))
        if bad.any():
            raise ScoreRangeError(
                f"score {scores[bad][0]!r} outside [0, 1]"
            )
    idx = (scores * n).astype(np.int64)
    idx[idx >= n] = n - 1
    return np.bincount(idx, minlength=n)


@dataclass(frozen=True)
class BinnedDensity:
    """Normalized N-bin histogram over [0, 1].

    ``masses[i]`` is the probability mass of bin i; the masses sum to one.
    Instances are immutable and safe to share across threads.
    """

    bin_count: int
    masses: np.ndarray
    pseudo_count: float = 0.0

    def __post_init__(self):
        masses = np.asarray(self.masses, dtype=float).ravel()
        if self.bin_count < 1:
            raise ValueError(f"bin count must be >= 1, got {self.bin_count}")
        if masses.shape[0] != self.bin_count:
            raise ValueError(
                f"expected {self.bin_count} masses, got {masses.shape[0]}"
            )
        if (masses < 0).any():
            raise ValueError("bin masses must be non-negative")
        if self.pseudo_count < 0:
            raise ValueError("pseudo_count must be >= 0")
        if self.pseudo_count > 0 and (masses <= 0).any():
            raise ValueError("smoothed masses must all be positive")
        if abs(float(masses.sum()) - 1.0) > _MASS_SUM_TOL:
            raise ValueError(f"masses sum to {masses.sum()!r}, not 1")
        masses.flags.writeable = False
        object.__setattr__(self, "masses", masses)

    def mass_of(self, b: float) -> float:
        """Probability mass of the bin containing score ``b``."""
        return float(self.masses[bin_index(b, self.bin_count)])


@dataclass(frozen=True)
class ScoreProfile:
    """The pair of fitted class-conditional score densities."""

    positive: BinnedDensity
    negative: BinnedDensity

    def __post_init__(self):
        if self.positive.bin_count != self.negative.bin_count:
            raise ValueError(
                "positive and negative densities must share one bin count "
                f"({self.positive.bin_count} != {self.negative.bin_count})"
            )

    @property
    def bin_count(self) -> int:
        return self.positive.bin_count


def fit_histogram(scores, n: int, pseudo_count: float = 0.0) -> BinnedDensity:
    """Fit a normalized histogram, optionally with additive smoothing.

    masses[i] = (count_i + pseudo_count) / (total + n * pseudo_count).
    """
    if pseudo_count < 0:
        raise ValueError("pseudo_count must be >= 0")
    counts = bin_counts(scores, n)
    total = int(counts.sum())
    if total == 0 and pseudo_count == 0:
        raise EmptyDataError("cannot fit a histogram to no scores without smoothing")
    masses = (counts + pseudo_count) / (total + n * pseudo_count)
    return BinnedDensity(bin_count=n, masses=masses, pseudo_count=pseudo_count)


def fit_profile(
    positive_scores,
    negative_scores,
    bin_count: int = DEFAULT_BIN_COUNT,
    pseudo_count: float = DEFAULT_PSEUDO_COUNT,
) -> ScoreProfile:
    """Fit the positive/negative score densities with a shared bin count."""
    return ScoreProfile(
        positive=fit_histogram(positive_scores, bin_count, pseudo_count),
        negative=fit_histogram(negative_scores, bin_count, pseudo_count),
    )


@dataclass(frozen=True)
class BinSearchProtocol:
    """Seeded validation protocol for choosing a bin count.

    Labeled scores are split per class into a density-fitting half and a
    held-out half. Validation bags are drawn from the held-out half (with
    replacement) at each proportion in ``eval_priors``; every candidate bin
    count is scored by the mean absolute error of its grid-MLE estimates over
    the same bags.
    """

    eval_priors: tuple = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    repeats: int = 10
    bag_size: int = 200
    holdout_fraction: float = 0.5
    pseudo_count: float = DEFAULT_PSEUDO_COUNT
    grid_steps: int = 1001
    seed: int = 0

    def __post_init__(self):
        if not self.eval_priors:
            raise ValueError("eval_priors must be nonempty")
        if self.repeats < 1 or self.bag_size < 1:
            raise ValueError("repeats and bag_size must be >= 1")
        if not 0.0 < self.holdout_fraction < 1.0:
            raise ValueError("holdout_fraction must be in (0, 1)")


def evaluate_bin_candidates(
    scores,
    labels,
    candidates: Sequence[int],
    protocol: BinSearchProtocol | None = None,
) -> dict[int, float]:
    """Mean absolute prevalence-estimation error per candidate bin count.

    Every candidate is evaluated on identical validation bags, so the
    comparison is paired and deterministic given the protocol seed.
    """
    from .prevalence import mle_grid  # deferred: prevalence imports this module

    if protocol is None:
        protocol = BinSearchProtocol()
    candidates = list(candidates)
    if not candidates:
        raise ValueError("candidates must be nonempty")
    if any(c < 1 for c in candidates):
        raise ValueError("bin counts must be >= 1")
    scores = np.asarray(scores, dtype=float).ravel()
    labels = np.asarray(labels, dtype=bool).ravel()
    if scores.shape != labels.shape:
        raise ValueError("scores and labels must have matching lengths")
    pos = scores[labels]
    neg = scores[~labels]
    if pos.size == 0 or neg.size == 0:
        raise SingleClassError("bin search needs scores from both classes")

    rng = np.random.Generator(np.random.PCG64(protocol.seed))
    pos_fit, pos_held = _split_scores(pos, protocol.holdout_fraction, rng)
    neg_fit, neg_held = _split_scores(neg, protocol.holdout_fraction, rng)

    # Draw the validation bags once; all candidates see the same bags.
    bags = []
    for prior in protocol.eval_priors:
        n_pos = int(np.floor(protocol.bag_size * prior + 0.5))
        n_neg = protocol.bag_size - n_pos
        for _ in range(protocol.repeats):
            chosen_pos = pos_held[rng.integers(0, pos_held.size, n_pos)]
            chosen_neg = neg_held[rng.integers(0, neg_held.size, n_neg)]
            bags.append((float(prior), np.concatenate([chosen_neg, chosen_pos])))

    errors: dict[int, float] = {}
    for candidate in candidates:
        profile = fit_profile(pos_fit, neg_fit, candidate, protocol.pseudo_count)
        total = 0.0
        for prior, bag in bags:
            estimate, _ = mle_grid(profile, bag, protocol.grid_steps)
            total += abs(estimate.pi_hat - prior)
        errors[candidate] = total / len(bags)
    return errors


def grid_search_bins(
    scores,
    labels,
    candidates: Sequence[int],
    protocol: BinSearchProtocol | None = None,
) -> int:
    """Candidate bin count with the smallest validation error (ties: smallest N)."""
    errors = evaluate_bin_candidates(scores, labels, candidates, protocol)
    best = min(errors.values())
    return min(c for c, e in errors.items() if e == best)


def _split_scores(values: np.ndarray, holdout_fraction: float, rng) -> tuple:
    order = rng.permutation(values.size)
    n_held = max(1, int(np.floor(values.size * holdout_fraction + 0.5)))
    n_held = min(n_held, values.size - 1) if values.size > 1 else 1
    held = values[order[:n_held]]
    fit = values[order[n_held:]]
    if fit.size == 0:
        fit = held
    return fit, held


def profile_to_dict(profile: ScoreProfile) -> dict:
    return {
        "bin_count": profile.bin_count,
        "positive_masses": [float(m) for m in profile.positive.masses],
        "negative_masses": [float(m) for m in profile.negative.masses],
        "pseudo_count": float(profile.positive.pseudo_count),
    }


def profile_from_dict(payload: dict) -> ScoreProfile:
    bin_count = int(payload["bin_count"])
    pseudo = float(payload.get("pseudo_count", 0.0))
    return ScoreProfile(
        positive=BinnedDensity(bin_count, np.asarray(payload["positive_masses"], float), pseudo),
        negative=BinnedDensity(bin_count, np.asarray(payload["negative_masses"], float), pseudo),
    )
