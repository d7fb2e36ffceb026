"""Banknote authentication data: ingestion, splitting, evaluation sets.

The source file is the standard distribution form: five comma-separated
columns (variance, skewness, curtosis, entropy, class) with no header, class
value 1 marking a positive (authentic) note. The file is not vendored; use
``fetch_banknote`` once on a networked machine and keep the recorded checksum
alongside the data for reproducible ingestion.
"""

from __future__ import annotations

import csv
import hashlib
import io
import urllib.request
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyDataError, MalformedRowError, MissingClassError
from .scorer import SampleSet
from .synth import round_half_up

CANONICAL_URL = (
    "https://archive.ics.uci.edu/ml/machine-learning-databases/00267/"
    "data_banknote_authentication.txt"
)

FEATURE_NAMES = ("variance", "skewness", "curtosis", "entropy")

DEFAULT_FEATURES = ("skewness", "curtosis")


@dataclass(frozen=True)
class BanknoteRecord:
    variance: float
    skewness: float
    curtosis: float
    entropy: float
    label: bool


@dataclass(frozen=True)
class SplitConfig:
    train_total: int = 411
    train_positives: int = 195
    train_negatives: int = 216
    seed: int = 0

    def __post_init__(self):
        if self.train_positives + self.train_negatives != self.train_total:
            raise ValueError(
                f"per-class counts {self.train_positives}+{self.train_negatives} "
                f"do not add up to train_total {self.train_total}"
            )
        if self.train_positives < 1 or self.train_negatives < 1:
            raise ValueError("both classes need at least one training record")


def load_banknote(source, allow_header: bool = False) -> list[BanknoteRecord]:
    """Parse records from a path, byte stream, or text stream.

    Malformed rows raise ``MalformedRowError`` carrying the 1-based row
    number. With ``allow_header`` the first row may be column names.
    """
    if isinstance(source, (str, Path)):
        with open(source, "r", newline="") as handle:
            return _parse_rows(handle, allow_header)
    if isinstance(source, bytes):
        return _parse_rows(io.StringIO(source.decode("utf-8")), allow_header)
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return _parse_rows(io.StringIO(data), allow_header)
    raise TypeError(f"unsupported source type {type(source).__name__}")


def _parse_rows(handle, allow_header: bool) -> list[BanknoteRecord]:
    records: list[BanknoteRecord] = []
    for row_number, row in enumerate(csv.reader(handle), start=1):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue  # blank line
        try:
            records.append(_parse_row(row))
        except (ValueError, IndexError) as exc:
            if row_number == 1 and allow_header:
                continue
            raise MalformedRowError(row_number, str(exc)) from None
    if not records:
        raise EmptyDataError("no records in input")
    return records


def _parse_row(row: list[str]) -> BanknoteRecord:
    if len(row) != 5:
        raise ValueError(f"expected 5 columns, got {len(row)}")
    values = [float(cell) for cell in row[:4]]
    if not all(np.isfinite(values)):
        raise ValueError("non-finite feature value")
    label_cell = row[4].strip()
    if label_cell not in ("0", "1"):
        raise ValueError(f"class column must be 0 or 1, got {label_cell!r}")
    return BanknoteRecord(*values, label=label_cell == "1")


def class_counts(records: Iterable[BanknoteRecord]) -> tuple[int, int]:
    """(positives, negatives) in a record collection."""
    records = list(records)
    positives = sum(1 for r in records if r.label)
    return positives, len(records) - positives


def select_features(
    records: Sequence[BanknoteRecord],
    feature_names: Sequence[str] = DEFAULT_FEATURES,
) -> SampleSet:
    """Project records onto the named features, in the order listed."""
    names = list(feature_names)
    if not names:
        raise ValueError("feature_names must be nonempty")
    for name in names:
        if name not in FEATURE_NAMES:
            raise ValueError(f"unknown feature {name!r}; choose from {FEATURE_NAMES}")
    features = np.asarray(
        [[getattr(r, name) for name in names] for r in records], dtype=float
    )
    labels = np.asarray([r.label for r in records], dtype=bool)
    return SampleSet(features, labels)


def make_train_split(
    records: Sequence[BanknoteRecord],
    config: SplitConfig,
) -> tuple[list[BanknoteRecord], list[BanknoteRecord]]:
    """Seeded per-class sample without replacement; holdout is the complement."""
    train_idx, holdout_idx = _split_indices(records, config)
    train = [records[i] for i in train_idx]
    holdout = [records[i] for i in holdout_idx]
    return train, holdout


def train_split_manifest(records: Sequence[BanknoteRecord], config: SplitConfig) -> dict:
    """Record indices per split plus seed and class counts, for exact replay."""
    train_idx, holdout_idx = _split_indices(records, config)
    train_labels = [records[i].label for i in train_idx]
    return {
        "seed": config.seed,
        "train_total": config.train_total,
        "train_positives": config.train_positives,
        "train_negatives": config.train_negatives,
        "train_indices": [int(i) for i in train_idx],
        "holdout_indices": [int(i) for i in holdout_idx],
        "train_class_counts": [sum(train_labels), len(train_labels) - sum(train_labels)],
    }


def _split_indices(records, config):
    positives = [i for i, r in enumerate(records) if r.label]
    negatives = [i for i, r in enumerate(records) if not r.label]
    if len(positives) < config.train_positives:
        raise ValueError(
            f"need {config.train_positives} positives, dataset has {len(positives)}"
        )
    if len(negatives) < config.train_negatives:
        raise ValueError(
            f"need {config.train_negatives} negatives, dataset has {len(negatives)}"
        )
    rng = np.random.Generator(np.random.PCG64(config.seed))
    chosen_pos = rng.permutation(len(positives))[: config.train_positives]
    chosen_neg = rng.permutation(len(negatives))[: config.train_negatives]
    train_idx = sorted(
        [positives[i] for i in chosen_pos] + [negatives[i] for i in chosen_neg]
    )
    train_set = set(train_idx)
    holdout_idx = [i for i in range(len(records)) if i not in train_set]
    return train_idx, holdout_idx


def make_eval_set(holdout: SampleSet, pi: float, size: int, seed: int) -> SampleSet:
    """Draw an evaluation set with exactly round(size*pi) positives.

    Sampling is uniform with replacement from the holdout's classes, so high
    proportions remain reachable when a class pool is small.
    """
    if not 0.0 <= pi <= 1.0:
        raise ValueError(f"pi {pi!r} outside [0, 1]")
    if size < 1:
        raise ValueError(f"size must be >= 1, got {size}")
    pos_idx = np.flatnonzero(holdout.labels)
    neg_idx = np.flatnonzero(~holdout.labels)
    if pos_idx.size == 0 or neg_idx.size == 0:
        raise MissingClassError("holdout must contain records of both classes")
    n_pos = round_half_up(size * pi)
    n_neg = size - n_pos
    rng = np.random.Generator(np.random.PCG64(seed))
    chosen_neg = neg_idx[rng.integers(0, neg_idx.size, n_neg)]
    chosen_pos = pos_idx[rng.integers(0, pos_idx.size, n_pos)]
    chosen = np.concatenate([chosen_neg, chosen_pos])
    return SampleSet(holdout.features[chosen], holdout.labels[chosen])


def fetch_banknote(dest: str | Path, url: str = CANONICAL_URL) -> str:
    """Download the dataset to ``dest`` and return its SHA-256 hex digest."""
    dest = Path(dest)
    with urllib.request.urlopen(url) as response:
        payload = response.read()
    dest.parent.mkdir(parents=True, exist_ok=True)
    dest.write_bytes(payload)
    return hashlib.sha256(payload).hexdigest()


def file_sha256(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
