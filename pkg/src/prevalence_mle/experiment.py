"""Replication harness: train at fixed priors, estimate across shifted priors.

Both replications share one shape: train a classifier at a known training
prior, fit the score densities, then estimate the positive proportion of
evaluation sets spanning 0.1 to 0.9, recording the naive threshold count and
the grid MLE side by side, repeated many times. Every record carries a seed
derived from the master seed so any single cell can be recomputed in
isolation, and output rows are sorted so parallel execution never changes
the bytes written.
"""

from __future__ import annotations

import csv
import hashlib
import io
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from . import serialize
from .dataset import (
    BanknoteRecord,
    DEFAULT_FEATURES,
    SplitConfig,
    make_eval_set,
    make_train_split,
    select_features,
)
from .density import DEFAULT_BIN_COUNT, DEFAULT_PSEUDO_COUNT, fit_profile
from .errors import EmptyDataError
from .prevalence import DEFAULT_GRID_STEPS, mle_grid, naive_estimate
from .scorer import SampleSet, TrainConfig, model_to_dict, train_logistic
from .synth import GaussianPairConfig, generate

SIMULATION_ID = "simulation"
BANKNOTE_ID = "banknote"

DEFAULT_EVAL_PRIORS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

NAIVE_METHOD = "count_above_threshold"
NAIVE_THRESHOLD = 0.5

# Stream tags for seed derivation; see derive_seed.
_STREAM_TRAIN = 0
_STREAM_EVAL = 1
_STREAM_SPLIT = 2
_STREAM_PROFILE = 3

RECORDS_HEADER = (
    "experiment_id,training_prior,eval_prior,repeat_index,seed,naive,mle,"
    "bin_count,grid_steps"
)
SUMMARY_HEADER = (
    "experiment_id,training_prior,eval_prior,estimator,mean,lo95,hi95,n_repeats"
)


@dataclass(frozen=True)
class EstimateRecord:
    experiment_id: str
    training_prior: float
    eval_prior: float
    repeat_index: int
    seed: int
    naive: float
    mle: float
    bin_count: int
    grid_steps: int


@dataclass(frozen=True)
class CellSummary:
    experiment_id: str
    training_prior: float
    eval_prior: float
    estimator: str
    mean: float
    lo95: float
    hi95: float
    n_repeats: int


@dataclass(frozen=True)
class SimulationConfig:
    training_priors: tuple = (0.25, 0.5, 0.75)
    eval_priors: tuple = DEFAULT_EVAL_PRIORS
    repeats: int = 100
    train_size: int = 500
    eval_size: int = 500
    bin_count: int = DEFAULT_BIN_COUNT
    grid_steps: int = DEFAULT_GRID_STEPS
    pseudo_count: float = DEFAULT_PSEUDO_COUNT
    negative_mean: float = 0.0
    positive_mean: float = 2.0
    std_dev: float = 1.0
    profile_fit: str = "train"
    master_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        _validate_common(self)


@dataclass(frozen=True)
class BanknoteConfig:
    eval_priors: tuple = DEFAULT_EVAL_PRIORS
    repeats: int = 100
    eval_size: int = 500
    bin_count: int = DEFAULT_BIN_COUNT
    grid_steps: int = DEFAULT_GRID_STEPS
    pseudo_count: float = DEFAULT_PSEUDO_COUNT
    features: tuple = DEFAULT_FEATURES
    split: SplitConfig = SplitConfig()
    resplit_each_repeat: bool = True
    profile_fit: str = "train"
    master_seed: int = 0
    jobs: int = 1

    def __post_init__(self):
        _validate_common(self)
        if not self.features:
            raise ValueError("features must be nonempty")

    @property
    def training_prior(self) -> float:
        return self.split.train_positives / self.split.train_total


def _validate_common(config) -> None:
    if config.repeats < 1:
        raise ValueError("repeats must be >= 1")
    if not config.eval_priors:
        raise ValueError("eval_priors must be nonempty")
    if any(not 0.0 <= p <= 1.0 for p in config.eval_priors):
        raise ValueError("eval_priors must lie in [0, 1]")
    if config.bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    if config.grid_steps < 2:
        raise ValueError("grid_steps must be >= 2")
    if config.eval_size < 1:
        raise ValueError("eval_size must be >= 1")
    if config.pseudo_count < 0:
        raise ValueError("pseudo_count must be >= 0")
    if config.profile_fit not in ("train", "holdout"):
        raise ValueError("profile_fit must be 'train' or 'holdout'")
    if config.jobs < 1:
        raise ValueError("jobs must be >= 1")


def derive_seed(master_seed: int, *path: int) -> int:
    """Deterministic 64-bit seed for one task, mixed from a master seed.

    The path is (stream_tag, indices...); mixing goes through SeedSequence so
    nearby paths yield statistically independent streams.
    """
    ss = np.random.SeedSequence([int(master_seed)] + [int(p) for p in path])
    return int(ss.generate_state(1, np.uint64)[0])


# ---------------------------------------------------------------------------
# Simulation replication
# ---------------------------------------------------------------------------


def run_simulation_replication(config: SimulationConfig) -> tuple[list[EstimateRecord], dict]:
    """Full two-Gaussian replication; returns records plus run diagnostics."""
    tasks = [
        (repeat, prior_index)
        for repeat in range(config.repeats)
        for prior_index in range(len(config.training_priors))
    ]
    results = _map_tasks(_simulation_task, config, tasks)
    return _collect(results)


def _simulation_task(config: SimulationConfig, repeat: int, prior_index: int):
    training_prior = config.training_priors[prior_index]
    model, profile, task_info = _simulation_training(config, repeat, prior_index)
    records = []
    for eval_index in range(len(config.eval_priors)):
        records.append(
            _simulation_cell(config, repeat, prior_index, eval_index, model, profile)
        )
    task_info.update({"repeat": repeat, "training_prior": training_prior})
    return records, task_info


def _simulation_training(config: SimulationConfig, repeat: int, prior_index: int):
    training_prior = config.training_priors[prior_index]
    train_seed = derive_seed(config.master_seed, _STREAM_TRAIN, repeat, prior_index)
    gaussians = GaussianPairConfig(
        negative_mean=config.negative_mean,
        positive_mean=config.positive_mean,
        std_dev=config.std_dev,
        seed=train_seed,
    )
    train = generate(gaussians, config.train_size, training_prior)
    model, report = train_logistic(train, TrainConfig())
    if config.profile_fit == "holdout":
        profile_seed = derive_seed(config.master_seed, _STREAM_PROFILE, repeat, prior_index)
        source = generate(
            GaussianPairConfig(
                negative_mean=config.negative_mean,
                positive_mean=config.positive_mean,
                std_dev=config.std_dev,
                seed=profile_seed,
            ),
            config.train_size,
            training_prior,
        )
    else:
        source = train
    scores = model.predict_scores(source.features)
    profile = fit_profile(
        scores[source.labels],
        scores[~source.labels],
        config.bin_count,
        config.pseudo_count,
    )
    info = _training_info(model, report)
    return model, profile, info


def _simulation_cell(config, repeat, prior_index, eval_index, model, profile) -> EstimateRecord:
    eval_prior = config.eval_priors[eval_index]
    eval_seed = derive_seed(config.master_seed, _STREAM_EVAL, repeat, prior_index, eval_index)
    gaussians = GaussianPairConfig(
        negative_mean=config.negative_mean,
        positive_mean=config.positive_mean,
        std_dev=config.std_dev,
        seed=eval_seed,
    )
    eval_set = generate(gaussians, config.eval_size, eval_prior)
    scores = model.predict_scores(eval_set.features)
    estimate, _ = mle_grid(profile, scores, config.grid_steps)
    return EstimateRecord(
        experiment_id=SIMULATION_ID,
        training_prior=config.training_priors[prior_index],
        eval_prior=eval_prior,
        repeat_index=repeat,
        seed=eval_seed,
        naive=naive_estimate(scores, NAIVE_THRESHOLD),
        mle=estimate.pi_hat,
        bin_count=config.bin_count,
        grid_steps=config.grid_steps,
    )


def replay_simulation_record(config: SimulationConfig, record: EstimateRecord) -> EstimateRecord:
    """Recompute one cell from the config and the record's coordinates."""
    prior_index = config.training_priors.index(record.training_prior)
    eval_index = config.eval_priors.index(record.eval_prior)
    model, profile, _ = _simulation_training(config, record.repeat_index, prior_index)
    return _simulation_cell(config, record.repeat_index, prior_index, eval_index, model, profile)


# ---------------------------------------------------------------------------
# Banknote replication
# ---------------------------------------------------------------------------


def run_banknote_replication(
    records: Sequence[BanknoteRecord],
    config: BanknoteConfig,
) -> tuple[list[EstimateRecord], dict]:
    """Banknote replication over a loaded record collection."""
    tasks = [(repeat,) for repeat in range(config.repeats)]
    results = _map_tasks(_banknote_task, config, tasks, records)
    return _collect(results)


def _banknote_task(payload, repeat: int):
    config, records = payload
    model, profile, holdout_samples, task_info = _banknote_training(config, records, repeat)
    out = []
    for eval_index in range(len(config.eval_priors)):
        out.append(
            _banknote_cell(config, repeat, eval_index, model, profile, holdout_samples)
        )
    task_info.update({"repeat": repeat, "training_prior": config.training_prior})
    return out, task_info


def _banknote_training(config: BanknoteConfig, records, repeat: int):
    split_repeat = repeat if config.resplit_each_repeat else 0
    split_seed = derive_seed(config.master_seed, _STREAM_SPLIT, split_repeat)
    split_config = SplitConfig(
        train_total=config.split.train_total,
        train_positives=config.split.train_positives,
        train_negatives=config.split.train_negatives,
        seed=split_seed,
    )
    train_records, holdout_records = make_train_split(records, split_config)
    train_samples = select_features(train_records, config.features)
    holdout_samples = select_features(holdout_records, config.features)
    model, report = train_logistic(train_samples, TrainConfig())
    source = holdout_samples if config.profile_fit == "holdout" else train_samples
    scores = model.predict_scores(source.features)
    profile = fit_profile(
        scores[source.labels],
        scores[~source.labels],
        config.bin_count,
        config.pseudo_count,
    )
    info = _training_info(model, report)
    info["split_seed"] = split_seed
    return model, profile, holdout_samples, info


def _banknote_cell(config, repeat, eval_index, model, profile, holdout_samples) -> EstimateRecord:
    eval_prior = config.eval_priors[eval_index]
    eval_seed = derive_seed(config.master_seed, _STREAM_EVAL, repeat, 0, eval_index)
    eval_set = make_eval_set(holdout_samples, eval_prior, config.eval_size, eval_seed)
    scores = model.predict_scores(eval_set.features)
    estimate, _ = mle_grid(profile, scores, config.grid_steps)
    return EstimateRecord(
        experiment_id=BANKNOTE_ID,
        training_prior=config.training_prior,
        eval_prior=eval_prior,
        repeat_index=repeat,
        seed=eval_seed,
        naive=naive_estimate(scores, NAIVE_THRESHOLD),
        mle=estimate.pi_hat,
        bin_count=config.bin_count,
        grid_steps=config.grid_steps,
    )


def replay_banknote_record(
    records: Sequence[BanknoteRecord],
    config: BanknoteConfig,
    record: EstimateRecord,
) -> EstimateRecord:
    eval_index = config.eval_priors.index(record.eval_prior)
    model, profile, holdout_samples, _ = _banknote_training(config, records, record.repeat_index)
    return _banknote_cell(config, record.repeat_index, eval_index, model, profile, holdout_samples)


# ---------------------------------------------------------------------------
# Shared machinery
# ---------------------------------------------------------------------------


def _training_info(model, report) -> dict:
    fingerprint = hashlib.sha256(
        serialize.dumps(model_to_dict(model)).encode("utf-8")
    ).hexdigest()
    return {
        "iterations": report.iterations,
        "converged": report.converged,
        "separation_warning": report.separation_warning,
        "final_gradient_norm": report.final_gradient_norm,
        "model_sha256": fingerprint,
    }


def _map_tasks(worker, config, tasks, records=None):
    if records is None:
        args = [(config, *task) for task in tasks]
        call = worker
    else:
        payload = (config, list(records))
        args = [(payload, *task) for task in tasks]
        call = worker
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            return list(pool.map(_call_worker, [(call, a) for a in args]))
    return [call(*a) for a in args]


def _call_worker(bundle):
    worker, args = bundle
    return worker(*args)


def _collect(results) -> tuple[list[EstimateRecord], dict]:
    records: list[EstimateRecord] = []
    task_infos = []
    for task_records, task_info in results:
        records.extend(task_records)
        task_infos.append(task_info)
    records.sort(
        key=lambda r: (r.experiment_id, r.training_prior, r.eval_prior, r.repeat_index)
    )
    info = {
        "tasks": task_infos,
        "separation_warning": any(t["separation_warning"] for t in task_infos),
        "non_converged": sum(1 for t in task_infos if not t["converged"]),
    }
    return records, info


def summarize(records: Sequence[EstimateRecord], level: float = 0.95) -> list[CellSummary]:
    """Per-cell mean and empirical central interval of the repeat estimates.

    Interval endpoints are the (1-level)/2 and 1-(1-level)/2 empirical
    quantiles with linear interpolation (numpy's default rule).
    """
    if not 0.0 < level < 1.0:
        raise ValueError("level must be in (0, 1)")
    records = list(records)
    if not records:
        raise EmptyDataError("no records to summarize")
    cells: dict[tuple, dict[str, list[float]]] = {}
    for record in records:
        key = (record.experiment_id, record.training_prior, record.eval_prior)
        cell = cells.setdefault(key, {"naive": [], "mle": []})
        cell["naive"].append(record.naive)
        cell["mle"].append(record.mle)
    lo_q = (1.0 - level) / 2.0
    hi_q = 1.0 - lo_q
    summaries = []
    for key in sorted(cells):
        experiment_id, training_prior, eval_prior = key
        for estimator in ("naive", "mle"):
            # Sorting first makes the statistics depend only on the multiset
            # of estimates, bit for bit.
            values = np.sort(np.asarray(cells[key][estimator], dtype=float))
            if values.size < 2:
                raise ValueError(
                    f"cell {key} has {values.size} record(s); need at least 2"
                )
            summaries.append(
                CellSummary(
                    experiment_id=experiment_id,
                    training_prior=training_prior,
                    eval_prior=eval_prior,
                    estimator=estimator,
                    mean=float(values.mean()),
                    lo95=float(np.quantile(values, lo_q)),
                    hi95=float(np.quantile(values, hi_q)),
                    n_repeats=int(values.size),
                )
            )
    return summaries


def records_to_csv(records: Sequence[EstimateRecord]) -> str:
    """Records as CSV text; reals carry 17 significant digits."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(RECORDS_HEADER.split(","))
    for r in records:
        writer.writerow(
            [
                r.experiment_id,
                serialize.format_float(r.training_prior),
                serialize.format_float(r.eval_prior),
                r.repeat_index,
                r.seed,
                serialize.format_float(r.naive),
                serialize.format_float(r.mle),
                r.bin_count,
                r.grid_steps,
            ]
        )
    return out.getvalue()


def summaries_to_csv(summaries: Sequence[CellSummary]) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(SUMMARY_HEADER.split(","))
    for s in summaries:
        writer.writerow(
            [
                s.experiment_id,
                serialize.format_float(s.training_prior),
                serialize.format_float(s.eval_prior),
                s.estimator,
                serialize.format_float(s.mean),
                serialize.format_float(s.lo95),
                serialize.format_float(s.hi95),
                s.n_repeats,
            ]
        )
    return out.getvalue()


def config_metadata(config) -> dict:
    payload = asdict(config)
    for key, value in payload.items():
        if isinstance(value, tuple):
            payload[key] = list(value)
    return payload
