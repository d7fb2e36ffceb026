"""Maximum-likelihood estimation of the positive-class proportion.

A trained binary classifier reports the fraction of positives in unlabeled
data with a bias toward its training prior. This package provides the
unbiased alternative: model the score bag as a mixture of the per-class
score distributions (fitted as normalized histograms) and maximize the
mixture likelihood of the proportion on a grid, together with the harnesses
that demonstrate both behaviors on synthetic and banknote data.
"""

__version__ = "0.1.0"

from .density import (
    BinnedDensity,
    BinSearchProtocol,
    ScoreProfile,
    bin_index,
    fit_histogram,
    fit_profile,
    grid_search_bins,
)
from .prevalence import (
    LikelihoodCurve,
    PrevalenceEstimate,
    log_likelihood,
    mean_score_estimate,
    mle_grid,
    naive_estimate,
    score_mass,
)
from .scorer import (
    LabeledSample,
    LogisticModel,
    SampleSet,
    TrainConfig,
    TrainReport,
    predict_score,
    train_logistic,
)
from .synth import GaussianPairConfig, generate

__all__ = [
    "__version__",
    "BinnedDensity",
    "BinSearchProtocol",
    "ScoreProfile",
    "bin_index",
    "fit_histogram",
    "fit_profile",
    "grid_search_bins",
    "LikelihoodCurve",
    "PrevalenceEstimate",
    "log_likelihood",
    "mean_score_estimate",
    "mle_grid",
    "naive_estimate",
    "score_mass",
    "LabeledSample",
    "LogisticModel",
    "SampleSet",
    "TrainConfig",
    "TrainReport",
    "predict_score",
    "train_logistic",
    "GaussianPairConfig",
    "generate",
]
