"""Mixture likelihood and grid MLE against independent brute-force oracles."""

import math

import numpy as np
import pytest

from prevalence_mle.density import BinnedDensity, ScoreProfile, fit_profile
from prevalence_mle.errors import EmptyDataError, ZeroMassError
from prevalence_mle.prevalence import (
    LikelihoodCurve,
    log_likelihood,
    mean_score_estimate,
    mle_grid,
    naive_estimate,
    score_mass,
)


def _profile(positive_masses, negative_masses, pseudo_count=0.5):
    positive_masses = np.asarray(positive_masses, dtype=float)
    negative_masses = np.asarray(negative_masses, dtype=float)
    return ScoreProfile(
        BinnedDensity(positive_masses.size, positive_masses, pseudo_count),
        BinnedDensity(negative_masses.size, negative_masses, pseudo_count),
    )


def _scores_with_counts(counts):
    """One representative score per bin, repeated to match the counts."""
    n = len(counts)
    reps = (np.arange(n) + 0.5) / n
    return np.repeat(reps, counts)


def _random_smoothed_profile(rng, n_bins):
    """Profile fitted from random scores with smoothing, as production does."""
    return fit_profile(
        rng.random(int(rng.integers(5, 200))),
        rng.random(int(rng.integers(5, 200))),
        n_bins,
        pseudo_count=0.5,
    )


class TestScoreMass:
    def test_midpoint_mixture(self):
        profile = _profile([0.8, 0.2], [0.2, 0.8], pseudo_count=0.0)
        assert score_mass(profile, 0.25, 0.5) == pytest.approx(0.5, abs=1e-15)

    def test_pi_one_gives_positive_mass(self):
        profile = _profile([0.7, 0.3], [0.1, 0.9], pseudo_count=0.0)
        assert score_mass(profile, 0.9, 1.0) == 0.3

    def test_identical_densities_make_pi_irrelevant(self):
        profile = _profile([0.4, 0.6], [0.4, 0.6], pseudo_count=0.0)
        values = {score_mass(profile, 0.1, pi) for pi in (0.0, 0.3, 0.7, 1.0)}
        assert values == {0.4}

    def test_rejects_out_of_range_pi(self):
        profile = _profile([0.5, 0.5], [0.5, 0.5], pseudo_count=0.0)
        with pytest.raises(ValueError):
            score_mass(profile, 0.5, 1.5)

    def test_mixture_normalizes_over_bins(self):
        rng = np.random.default_rng(44)
        profile = _random_smoothed_profile(rng, 5)
        reps = (np.arange(5) + 0.5) / 5
        for pi in (0.0, 0.5, 1.0):
            total = sum(score_mass(profile, b, pi) for b in reps)
            assert total == pytest.approx(1.0, abs=1e-12)


class TestLogLikelihood:
    def test_flat_in_pi_for_identical_densities(self):
        profile = _profile([0.3, 0.3, 0.4], [0.3, 0.3, 0.4], pseudo_count=0.0)
        scores = [0.1, 0.5, 0.9, 0.2]
        values = [log_likelihood(profile, scores, pi) for pi in np.linspace(0, 1, 11)]
        assert max(values) - min(values) == 0.0

    def test_single_positive_dominant_score_is_increasing(self):
        profile = _profile([0.98, 0.01, 0.01], [0.01, 0.01, 0.98], pseudo_count=0.0)
        grid = np.linspace(0, 1, 21)
        values = [log_likelihood(profile, [0.1], pi) for pi in grid]
        assert np.all(np.diff(values) > 0)

    def test_matches_per_score_product_oracle(self):
        # oracle: per-score log of the mixture mass, summed term by term
        rng = np.random.default_rng(99)
        profile = _profile([0.1, 0.3, 0.6], [0.6, 0.3, 0.1], pseudo_count=0.0)
        scores = rng.random(200)
        for pi in (0.0, 0.2, 0.5, 0.77, 1.0):
            expected = 0.0
            for b in scores:
                idx = min(int(b * 3), 2)
                mass = pi * profile.positive.masses[idx] + (1 - pi) * profile.negative.masses[idx]
                expected += math.log(mass)
            got = log_likelihood(profile, scores, pi)
            assert got == pytest.approx(expected, abs=1e-9)

    def test_empty_scores_rejected(self):
        profile = _profile([0.5, 0.5], [0.5, 0.5], pseudo_count=0.0)
        with pytest.raises(EmptyDataError):
            log_likelihood(profile, [], 0.5)

    def test_zero_mass_reported_when_smoothing_disabled(self):
        profile = _profile([1.0, 0.0], [1.0, 0.0], pseudo_count=0.0)
        with pytest.raises(ZeroMassError):
            log_likelihood(profile, [0.9], 0.5)


class TestMleGrid:
    def test_flat_curve_ties_to_zero(self):
        profile = _profile([0.5, 0.5], [0.5, 0.5], pseudo_count=0.0)
        estimate, curve = mle_grid(profile, [0.2, 0.8], grid_steps=101)
        assert estimate.pi_hat == 0.0
        assert estimate.tie_broken
        assert np.all(curve.log_likelihood == curve.log_likelihood[0])

    def test_all_positive_evidence_pushes_to_one(self):
        profile = _profile([0.9, 0.05, 0.05], [0.1, 0.45, 0.45], pseudo_count=0.0)
        scores = [0.1] * 50
        estimate, _ = mle_grid(profile, scores, grid_steps=1001)
        assert estimate.pi_hat >= 1.0 - 0.001

    def test_matches_fine_grid_oracle_on_crafted_counts(self):
        # oracle: exhaustive evaluation at one million grid points
        counts = np.array([20, 30, 50])
        positive = np.array([0.1, 0.3, 0.6])
        negative = np.array([0.6, 0.3, 0.1])
        profile = _profile(positive, negative, pseudo_count=0.0)
        scores = _scores_with_counts(counts)
        estimate, _ = mle_grid(profile, scores, grid_steps=1001)

        fine = np.linspace(0.0, 1.0, 1_000_001)
        values = np.log(np.outer(fine, positive - negative) + negative) @ counts
        oracle_pi = fine[int(np.argmax(values))]
        assert abs(estimate.pi_hat - oracle_pi) <= 0.001 + 1e-12

    def test_zero_mass_at_grid_edges_reported(self):
        profile = _profile([1.0, 0.0], [0.0, 1.0], pseudo_count=0.0)
        with pytest.raises(ZeroMassError):
            mle_grid(profile, [0.2], grid_steps=11)

    def test_pi_hat_lies_on_the_grid(self):
        rng = np.random.default_rng(17)
        profile = _random_smoothed_profile(rng, 3)
        estimate, curve = mle_grid(profile, rng.random(40), grid_steps=101)
        assert estimate.pi_hat in curve.grid
        assert estimate.grid_step == pytest.approx(0.01)

    def test_curve_validates_its_grid(self):
        with pytest.raises(ValueError):
            LikelihoodCurve(np.array([0.0, 0.5]), np.array([1.0, 2.0]))


class TestMleGridStructure:
    def test_depends_only_on_bin_counts(self):
        rng = np.random.default_rng(30)
        profile = _random_smoothed_profile(rng, 4)
        scores = rng.random(100)
        from prevalence_mle.density import bin_counts

        counts = bin_counts(scores, 4)
        replacement = _scores_with_counts(counts)
        e1, c1 = mle_grid(profile, scores)
        e2, c2 = mle_grid(profile, replacement)
        assert e1 == e2
        assert np.array_equal(c1.log_likelihood, c2.log_likelihood)

    def test_permutation_invariance(self):
        rng = np.random.default_rng(31)
        profile = _random_smoothed_profile(rng, 3)
        scores = rng.random(60)
        shuffled = scores.copy()
        rng.shuffle(shuffled)
        e1, c1 = mle_grid(profile, scores)
        e2, c2 = mle_grid(profile, shuffled)
        assert e1 == e2
        assert np.array_equal(c1.log_likelihood, c2.log_likelihood)

    def test_deterministic(self):
        rng = np.random.default_rng(32)
        profile = _random_smoothed_profile(rng, 3)
        scores = rng.random(80)
        e1, c1 = mle_grid(profile, scores)
        e2, c2 = mle_grid(profile, scores)
        assert e1 == e2
        assert np.array_equal(c1.log_likelihood, c2.log_likelihood)
        assert np.array_equal(c1.grid, c2.grid)

    def test_unimodal_on_random_instances(self):
        # concavity of the log-likelihood: values rise then fall, up to
        # floating-point jitter
        rng = np.random.default_rng(33)
        for _ in range(200):
            profile = _random_smoothed_profile(rng, int(rng.integers(2, 8)))
            scores = rng.random(int(rng.integers(1, 150)))
            _, curve = mle_grid(profile, scores, grid_steps=201)
            assert _single_peak(curve.log_likelihood)

    def test_derivative_sign_brackets_the_argmax(self):
        # analytic derivative d/dpi of the log-likelihood changes sign
        # across the grid argmax (or is one-sided at a boundary)
        rng = np.random.default_rng(34)
        for _ in range(50):
            profile = _random_smoothed_profile(rng, 3)
            scores = rng.random(int(rng.integers(5, 100)))
            estimate, curve = mle_grid(profile, scores, grid_steps=501)
            from prevalence_mle.density import bin_counts

            counts = bin_counts(scores, 3)
            a = profile.positive.masses
            b = profile.negative.masses

            def derivative(pi):
                mix = pi * a + (1 - pi) * b
                return float(((a - b) / mix) @ counts)

            pi = estimate.pi_hat
            step = estimate.grid_step
            if pi == 0.0:
                assert derivative(pi + step) <= 0 or derivative(0.0) <= 0
            elif pi == 1.0:
                assert derivative(pi - step) >= 0 or derivative(1.0) >= 0
            else:
                assert derivative(pi - step) >= 0
                assert derivative(pi + step) <= 0


def _single_peak(values, rel_tol=1e-9):
    tol = rel_tol * max(1.0, float(np.abs(values).max()))
    rising = True
    for delta in np.diff(values):
        if rising:
            if delta < -tol:
                rising = False
        elif delta > tol:
            return False
    return True


class TestNaiveEstimate:
    def test_all_above_threshold(self):
        assert naive_estimate([0.9, 0.9, 0.9]) == 1.0

    def test_direct_count(self):
        assert naive_estimate([0.4, 0.6]) == 0.5

    def test_matches_independent_recount(self):
        rng = np.random.default_rng(55)
        scores = rng.random(500)
        expected = sum(1 for s in scores if s > 0.5) / 500
        assert naive_estimate(scores) == expected

    def test_threshold_is_strict(self):
        assert naive_estimate([0.5, 0.5]) == 0.0

    def test_custom_threshold(self):
        assert naive_estimate([0.2, 0.4, 0.9], threshold=0.3) == pytest.approx(2 / 3)

    def test_empty_rejected(self):
        with pytest.raises(EmptyDataError):
            naive_estimate([])

    def test_mean_score_variant(self):
        assert mean_score_estimate([0.2, 0.4]) == pytest.approx(0.3)
