"""Binary logistic regression trained from scratch.

The classifier maps a feature vector to a positive-class probability in
(0, 1). Features are standardized to zero mean and unit variance using
training statistics, and the L2-regularized negative log-likelihood is
minimized by full-batch gradient descent with a backtracking line search.
Everything is deterministic: the same data and settings always yield the
same model, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Union

import numpy as np

from .errors import (
    DimensionMismatchError,
    EmptyDataError,
    NonFiniteFeatureError,
    SingleClassError,
)

# Scores are clamped into [SCORE_FLOOR, 1 - SCORE_FLOOR] so that saturated
# sigmoids still honor the open-interval contract.
SCORE_FLOOR = 1e-12

_ARMIJO_C = 1e-4
_MIN_STEP = 1e-18


class LabeledSample(NamedTuple):
    """One training example: a feature vector and a binary label."""

    features: np.ndarray
    label: bool


@dataclass(frozen=True)
class SampleSet:
    """A collection of labeled samples stored as arrays.

    ``features`` has shape (n, d); ``labels`` is boolean with True marking
    the positive class. All feature values must be finite and every sample
    must share the same dimension, which the array layout enforces.
    """

    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)
        if features.ndim != 2:
            raise DimensionMismatchError(
                f"features must be 2-D (n, d), got shape {features.shape}"
            )
        labels = np.asarray(self.labels, dtype=bool)
        if labels.shape != (features.shape[0],):
            raise DimensionMismatchError(
                f"labels shape {labels.shape} does not match {features.shape[0]} samples"
            )
        if features.size and not np.isfinite(features).all():
            raise NonFiniteFeatureError("features contain NaN or infinite values")
        features.flags.writeable = False
        labels.flags.writeable = False
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_samples(cls, samples: Iterable[LabeledSample]) -> "SampleSet":
        samples = list(samples)
        if not samples:
            return cls(np.empty((0, 1)), np.empty((0,), dtype=bool))
        features = np.asarray([np.asarray(s.features, dtype=float).ravel() for s in samples])
        labels = np.asarray([bool(s.label) for s in samples])
        return cls(features, labels)

    @classmethod
    def coerce(cls, data: Union["SampleSet", Iterable[LabeledSample]]) -> "SampleSet":
        if isinstance(data, cls):
            return data
        return cls.from_samples(data)

    def __len__(self) -> int:
        return self.features.shape[0]

    def __getitem__(self, index: int) -> LabeledSample:
        return LabeledSample(self.features[index], bool(self.labels[index]))

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def positive_count(self) -> int:
        return int(self.labels.sum())


@dataclass(frozen=True)
class LogisticModel:
    """Fitted logistic classifier plus the standardization it was trained with.

    Immutable after construction; safe to share across threads.
    """

    weights: np.ndarray
    intercept: float
    feature_means: np.ndarray
    feature_scales: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).ravel()
        means = np.asarray(self.feature_means, dtype=float).ravel()
        scales = np.asarray(self.feature_scales, dtype=float).ravel()
        if not (weights.shape == means.shape == scales.shape):
            raise DimensionMismatchError(
                "weights, feature_means and feature_scales must share one dimension"
            )
        if not (scales > 0).all():
            raise ValueError("feature_scales must be strictly positive")
        for arr in (weights, means, scales):
            arr.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "feature_means", means)
        object.__setattr__(self, "feature_scales", scales)
        object.__setattr__(self, "intercept", float(self.intercept))

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def predict_scores(self, features: np.ndarray) -> np.ndarray:
        """Vectorized scores for a (n, d) feature matrix."""
        features = np.asarray(features, dtype=float)
        if features.ndim == 1:
            features = features.reshape(1, -1)
        if features.shape[1] != self.n_features:
            raise DimensionMismatchError(
                f"expected {self.n_features} features, got {features.shape[1]}"
            )
        if features.size and not np.isfinite(features).all():
            raise NonFiniteFeatureError("features contain NaN or infinite values")
        z = (features - self.feature_means) / self.feature_scales
        scores = sigmoid(z @ self.weights + self.intercept)
        return np.clip(scores, SCORE_FLOOR, 1.0 - SCORE_FLOOR)


@dataclass(frozen=True)
class TrainConfig:
    max_iterations: int = 10_000
    tolerance: float = 1e-8
    l2_penalty: float = 1e-6

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.l2_penalty < 0:
            raise ValueError("l2_penalty must be >= 0")


@dataclass(frozen=True)
class TrainReport:
    iterations: int
    final_gradient_norm: float
    converged: bool
    separation_warning: bool


def sigmoid(z: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def loss_and_gradient(
    weights: np.ndarray,
    intercept: float,
    features: np.ndarray,
    labels: np.ndarray,
    l2_penalty: float,
) -> tuple[float, np.ndarray]:
    """Regularized negative log-likelihood and its exact gradient.

    The loss is sum_i [softplus(eta_i) - y_i * eta_i] + (lambda/2) * ||w||^2
    with eta = X w + b; the penalty applies to the weights only. The gradient
    is returned as one vector with the intercept component last.
    """
    weights = np.asarray(weights, dtype=float)
    eta = features @ weights + intercept
    # Per-sample form softplus(+-eta): equal to softplus(eta) - y*eta but
    # free of the catastrophic cancellation the two-sum form suffers when
    # scores saturate.
    loss = float(np.logaddexp(0.0, np.where(labels, -eta, eta)).sum())
    loss += 0.5 * l2_penalty * float(weights @ weights)
    residual = sigmoid(eta) - labels.astype(float)
    grad = np.empty(weights.shape[0] + 1)
    grad[:-1] = features.T @ residual + l2_penalty * weights
    grad[-1] = residual.sum()
    return loss, grad


def train_logistic(
    data: Union[SampleSet, Iterable[LabeledSample]],
    config: TrainConfig | None = None,
) -> tuple[LogisticModel, TrainReport]:
    """Fit a logistic model by deterministic damped Newton iteration.

    Each step solves the regularized Newton system and backtracks until the
    loss shows sufficient decrease; once decreases fall below the loss's
    floating-point resolution, steps are accepted on a strict gradient-norm
    drop instead. Stops when the gradient infinity-norm reaches
    ``config.tolerance`` or after ``config.max_iterations`` steps; the latter
    sets ``separation_warning`` and returns the best parameters reached
    rather than failing.
    """
    if config is None:
        config = TrainConfig()
    samples = SampleSet.coerce(data)
    n = len(samples)
    if n == 0:
        raise EmptyDataError("training data is empty")
    n_pos = samples.positive_count
    if n_pos == 0 or n_pos == n:
        raise SingleClassError(
            f"training data has {n_pos} positives out of {n}; both classes are required"
        )

    means = samples.features.mean(axis=0)
    stds = samples.features.std(axis=0)
    scales = np.where(stds > 0.0, stds, 1.0)
    z = (samples.features - means) / scales
    y = samples.labels

    d = z.shape[1]
    theta = np.zeros(d + 1)
    loss, grad = _theta_loss_grad(theta, z, y, config.l2_penalty)
    iterations = 0
    stalled = False
    while float(np.abs(grad).max()) > config.tolerance and iterations < config.max_iterations:
        iterations += 1
        newton = _newton_direction(theta, z, y, config.l2_penalty, grad)
        slope = float(grad @ newton)
        if not np.isfinite(slope) or slope >= 0.0:
            newton = None
        accepted = False
        # The Newton direction can be noise-dominated when the Hessian is
        # nearly singular (quasi-separation); fall back to the raw gradient
        # before giving up on the iteration.
        for direction in ([newton, -grad] if newton is not None else [-grad]):
            slope = float(grad @ direction)
            gsq = float(grad @ grad)
            step = 1.0
            while True:
                candidate = theta + step * direction
                cand_loss, cand_grad = _theta_loss_grad(candidate, z, y, config.l2_penalty)
                # Sufficient decrease while the required decrease is
                # resolvable at the loss's floating-point precision; below
                # that resolution the loss comparison carries no information,
                # so accept only steps that strictly shrink the gradient
                # without raising the loss beyond summation jitter.
                required = -_ARMIJO_C * step * slope
                jitter = 8.0 * np.finfo(float).eps * max(1.0, abs(loss))
                armijo = required > jitter and cand_loss <= loss - required
                plateau = cand_loss <= loss + jitter and float(cand_grad @ cand_grad) < gsq
                if armijo or plateau:
                    theta, loss, grad = candidate, cand_loss, cand_grad
                    accepted = True
                    break
                step *= 0.5
                if step < _MIN_STEP:
                    break
            if accepted:
                break
        if not accepted:
            # No representable step makes progress along either direction.
            stalled = True
            break

    final_norm = float(np.abs(grad).max())
    converged = final_norm <= config.tolerance
    model = LogisticModel(
        weights=theta[:-1].copy(),
        intercept=float(theta[-1]),
        feature_means=means,
        feature_scales=scales,
    )
    # With a tiny ridge the optimizer can converge even on separated data,
    # so the warning also checks the fitted scores directly: a perfect
    # ranking of positives above negatives marks quasi-separation.
    train_scores = model.predict_scores(samples.features)
    separated = bool(train_scores[y].min() > train_scores[~y].max())
    report = TrainReport(
        iterations=iterations,
        final_gradient_norm=final_norm,
        converged=converged,
        separation_warning=(not converged) or separated,
    )
    return model, report


def _theta_loss_grad(theta, z, y, l2_penalty):
    return loss_and_gradient(theta[:-1], float(theta[-1]), z, y, l2_penalty)


def _newton_direction(theta, z, y, l2_penalty, grad):
    """Solve the regularized Newton system for a descent direction.

    The Hessian is X~ᵀ W X~ with W = p(1-p) on the design matrix extended by
    the intercept column, plus the ridge term on the weight block. A tiny
    diagonal floor keeps the solve well-posed when scores saturate.
    """
    eta = z @ theta[:-1] + theta[-1]
    p = sigmoid(eta)
    w = p * (1.0 - p)
    extended = np.hstack([z, np.ones((z.shape[0], 1))])
    hessian = (extended * w[:, None]).T @ extended
    diag = np.arange(z.shape[1] + 1)
    hessian[diag[:-1], diag[:-1]] += l2_penalty
    hessian[diag, diag] += 1e-12
    try:
        return np.linalg.solve(hessian, -grad)
    except np.linalg.LinAlgError:
        return -grad


def predict_score(model: LogisticModel, features) -> float:
    """Score one feature vector; strictly inside (0, 1)."""
    features = np.asarray(features, dtype=float).ravel()
    if features.shape[0] != model.n_features:
        raise DimensionMismatchError(
            f"expected {model.n_features} features, got {features.shape[0]}"
        )
    return float(model.predict_scores(features.reshape(1, -1))[0])


def model_to_dict(model: LogisticModel) -> dict:
    return {
        "weights": [float(w) for w in model.weights],
        "intercept": model.intercept,
        "feature_means": [float(m) for m in model.feature_means],
        "feature_scales": [float(s) for s in model.feature_scales],
    }


def model_from_dict(payload: dict) -> LogisticModel:
    return LogisticModel(
        weights=np.asarray(payload["weights"], dtype=float),
        intercept=float(payload["intercept"]),
        feature_means=np.asarray(payload["feature_means"], dtype=float),
        feature_scales=np.asarray(payload["feature_scales"], dtype=float),
    )
