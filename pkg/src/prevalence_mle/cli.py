"""Command-line front door.

Subcommands cover the two replications (``simulate``, ``banknote``), ad-hoc
estimation from a scores file (``estimate``), and fitting artifacts to disk
(``train``, ``profile``). Every run writes a metadata JSON that reproduces it
exactly. Exit codes: 0 success, 1 runtime or data failure, 2 argument error.
"""

from __future__ import annotations

import argparse
import csv
import secrets
import sys
from pathlib import Path

import numpy as np

from . import __version__, serialize
from .dataset import (
    FEATURE_NAMES,
    SplitConfig,
    class_counts,
    fetch_banknote,
    file_sha256,
    load_banknote,
    train_split_manifest,
)
from .density import fit_profile, profile_from_dict, profile_to_dict
from .experiment import (
    BANKNOTE_ID,
    BanknoteConfig,
    DEFAULT_EVAL_PRIORS,
    NAIVE_METHOD,
    NAIVE_THRESHOLD,
    SIMULATION_ID,
    SimulationConfig,
    config_metadata,
    records_to_csv,
    run_banknote_replication,
    run_simulation_replication,
    summaries_to_csv,
    summarize,
)
from .prevalence import mle_grid
from .scorer import SampleSet, TrainConfig, model_to_dict, train_logistic


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args, parser)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # runtime/data failures exit 1 with a diagnostic
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prevalence-mle",
        description="Estimate the positive proportion of unlabeled data from classifier scores.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    simulate = sub.add_parser("simulate", help="run the two-Gaussian replication")
    _add_shared_run_flags(simulate)
    simulate.add_argument("--repeats", type=_positive_int, default=100)
    simulate.add_argument(
        "--train-priors", type=_prior_list, default=(0.25, 0.5, 0.75),
        help="comma-separated training priors (default 0.25,0.5,0.75)",
    )
    simulate.add_argument(
        "--eval-priors", type=_prior_list, default=None,
        help="comma-separated evaluation priors (default 0.1..0.9)",
    )
    simulate.add_argument("--train-size", type=_positive_int, default=500)
    simulate.add_argument("--eval-size", type=_positive_int, default=500)
    simulate.add_argument("--negative-mean", type=float, default=0.0)
    simulate.add_argument("--positive-mean", type=float, default=2.0)
    simulate.add_argument("--std-dev", type=float, default=1.0)
    simulate.set_defaults(handler=_cmd_simulate)

    banknote = sub.add_parser("banknote", help="run the banknote replication")
    _add_shared_run_flags(banknote)
    banknote.add_argument("--data", required=True, help="path to the banknote CSV")
    banknote.add_argument(
        "--fetch", action="store_true",
        help="download the dataset to --data if the file is missing",
    )
    banknote.add_argument(
        "--checksum", default=None,
        help="expected SHA-256 of the dataset file",
    )
    banknote.add_argument("--repeats", type=_positive_int, default=100)
    banknote.add_argument("--eval-priors", type=_prior_list, default=None)
    banknote.add_argument("--eval-size", type=_positive_int, default=500)
    banknote.add_argument(
        "--features", type=_feature_list, default=("skewness", "curtosis"),
        help="comma-separated feature names (default skewness,curtosis)",
    )
    banknote.add_argument(
        "--train-total", type=_positive_int, default=None,
        help="must equal --train-pos + --train-neg when given",
    )
    banknote.add_argument("--train-pos", type=_positive_int, default=195)
    banknote.add_argument("--train-neg", type=_positive_int, default=216)
    banknote.add_argument(
        "--fixed-split", action="store_true",
        help="reuse one training split for every repeat instead of re-splitting",
    )
    banknote.set_defaults(handler=_cmd_banknote)

    estimate = sub.add_parser("estimate", help="estimate one score bag against a profile")
    estimate.add_argument("--scores", required=True, help="file with one score per line")
    estimate.add_argument("--profile", required=True, help="score-profile JSON")
    estimate.add_argument("--grid-steps", type=_grid_steps, default=1001)
    estimate.add_argument("--curve", default=None, help="write the likelihood curve CSV here")
    estimate.set_defaults(handler=_cmd_estimate)

    train = sub.add_parser("train", help="fit a logistic model and write it as JSON")
    train.add_argument(
        "--data", required=True,
        help="CSV with feature columns then a 0/1 label column, no header",
    )
    train.add_argument("--header", action="store_true", help="skip the first row")
    train.add_argument("--l2-penalty", type=_nonneg_float, default=1e-6)
    train.add_argument("--max-iterations", type=_positive_int, default=10_000)
    train.add_argument("--tolerance", type=_positive_float, default=1e-8)
    train.add_argument("--out", required=True, help="output model JSON path")
    train.set_defaults(handler=_cmd_train)

    profile = sub.add_parser("profile", help="fit a score profile and write it as JSON")
    profile.add_argument(
        "--scores", required=True,
        help="CSV with rows score,label (label 0/1), no header",
    )
    profile.add_argument("--bins", type=_positive_int, default=3)
    profile.add_argument("--pseudo-count", type=_nonneg_float, default=0.5)
    profile.add_argument("--out", required=True, help="output profile JSON path")
    profile.set_defaults(handler=_cmd_profile)

    return parser


def _add_shared_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--seed", type=int, default=None,
                     help="master seed; drawn from system entropy when omitted")
    sub.add_argument("--bins", type=_positive_int, default=3)
    sub.add_argument("--grid-steps", type=_grid_steps, default=1001)
    sub.add_argument("--pseudo-count", type=_nonneg_float, default=0.5)
    sub.add_argument("--profile-fit", choices=("train", "holdout"), default="train")
    sub.add_argument("--jobs", type=_positive_int, default=1)
    sub.add_argument("-o", "--output-dir", required=True)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def _grid_steps(text: str) -> int:
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError(f"must be >= 2, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def _nonneg_float(text: str) -> float:
    value = float(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def _prior_list(text: str) -> tuple:
    try:
        priors = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not priors:
        raise argparse.ArgumentTypeError("needs at least one value")
    if any(not 0.0 <= p <= 1.0 for p in priors):
        raise argparse.ArgumentTypeError("proportions must lie in [0, 1]")
    return priors


def _feature_list(text: str) -> tuple:
    names = tuple(part.strip() for part in text.split(",") if part.strip())
    for name in names:
        if name not in FEATURE_NAMES:
            raise argparse.ArgumentTypeError(
                f"unknown feature {name!r}; choose from {', '.join(FEATURE_NAMES)}"
            )
    if not names:
        raise argparse.ArgumentTypeError("needs at least one feature name")
    return names


def _resolve_seed(args) -> tuple[int, bool]:
    if args.seed is not None:
        return args.seed, True
    return secrets.randbits(63), False


def _write_outputs(outdir: Path, records, info, metadata) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    (outdir / "records.csv").write_text(records_to_csv(records))
    (outdir / "summary.csv").write_text(summaries_to_csv(summarize(records)))
    metadata["run_info"] = info
    (outdir / "metadata.json").write_text(serialize.dumps(metadata))


def _cmd_simulate(args, parser) -> int:
    seed, seed_provided = _resolve_seed(args)
    config = SimulationConfig(
        training_priors=args.train_priors,
        eval_priors=args.eval_priors or DEFAULT_EVAL_PRIORS,
        repeats=args.repeats,
        train_size=args.train_size,
        eval_size=args.eval_size,
        bin_count=args.bins,
        grid_steps=args.grid_steps,
        pseudo_count=args.pseudo_count,
        negative_mean=args.negative_mean,
        positive_mean=args.positive_mean,
        std_dev=args.std_dev,
        profile_fit=args.profile_fit,
        master_seed=seed,
        jobs=args.jobs,
    )
    records, info = run_simulation_replication(config)
    metadata = {
        "command": "simulate",
        "experiment_id": SIMULATION_ID,
        "artifact_version": __version__,
        "seed_provided": seed_provided,
        "naive_method": NAIVE_METHOD,
        "naive_threshold": NAIVE_THRESHOLD,
        "config": config_metadata(config),
    }
    _write_outputs(Path(args.output_dir), records, info, metadata)
    print(f"wrote {len(records)} records to {args.output_dir}")
    return 0


def _cmd_banknote(args, parser) -> int:
    if args.train_total is not None and args.train_total != args.train_pos + args.train_neg:
        parser.error("--train-total must equal --train-pos + --train-neg")
    data_path = Path(args.data)
    if not data_path.exists():
        if args.fetch:
            print(f"fetching banknote dataset to {data_path}", file=sys.stderr)
            fetch_banknote(data_path)
        else:
            print(f"error: dataset file not found: {data_path}", file=sys.stderr)
            return 1
    checksum = file_sha256(data_path)
    if args.checksum and checksum != args.checksum.lower():
        print(
            f"error: dataset checksum mismatch for {data_path}: "
            f"expected {args.checksum.lower()}, got {checksum}",
            file=sys.stderr,
        )
        return 1
    records_in = load_banknote(data_path)
    positives, negatives = class_counts(records_in)

    seed, seed_provided = _resolve_seed(args)
    config = BanknoteConfig(
        eval_priors=args.eval_priors or DEFAULT_EVAL_PRIORS,
        repeats=args.repeats,
        eval_size=args.eval_size,
        bin_count=args.bins,
        grid_steps=args.grid_steps,
        pseudo_count=args.pseudo_count,
        features=args.features,
        split=SplitConfig(
            train_total=args.train_pos + args.train_neg,
            train_positives=args.train_pos,
            train_negatives=args.train_neg,
        ),
        resplit_each_repeat=not args.fixed_split,
        profile_fit=args.profile_fit,
        master_seed=seed,
        jobs=args.jobs,
    )
    records, info = run_banknote_replication(records_in, config)
    metadata = {
        "command": "banknote",
        "experiment_id": BANKNOTE_ID,
        "artifact_version": __version__,
        "seed_provided": seed_provided,
        "naive_method": NAIVE_METHOD,
        "naive_threshold": NAIVE_THRESHOLD,
        "positive_label_convention": "class column value 1 is positive",
        "dataset_path": str(data_path),
        "dataset_sha256": checksum,
        "dataset_records": len(records_in),
        "dataset_class_counts": [positives, negatives],
        "config": config_metadata(config),
    }
    outdir = Path(args.output_dir)
    _write_outputs(outdir, records, info, metadata)
    if args.fixed_split:
        split_seed = info["tasks"][0]["split_seed"]
        manifest = train_split_manifest(
            records_in,
            SplitConfig(
                train_total=config.split.train_total,
                train_positives=config.split.train_positives,
                train_negatives=config.split.train_negatives,
                seed=split_seed,
            ),
        )
        (outdir / "split_manifest.json").write_text(serialize.dumps(manifest))
    print(f"wrote {len(records)} records to {args.output_dir}")
    return 0


def _cmd_estimate(args, parser) -> int:
    profile = profile_from_dict(serialize.loads(Path(args.profile).read_text()))
    scores = _read_score_lines(Path(args.scores))
    estimate, curve = mle_grid(profile, scores, args.grid_steps)
    if args.curve:
        lines = ["pi,log_likelihood"]
        lines += [
            f"{serialize.format_float(pi)},{serialize.format_float(ll)}"
            for pi, ll in zip(curve.grid, curve.log_likelihood)
        ]
        Path(args.curve).write_text("\n".join(lines) + "\n")
    if estimate.tie_broken:
        print(
            "warning: several grid proportions tie for the maximum; "
            "reporting the smallest",
            file=sys.stderr,
        )
    print(serialize.format_float(estimate.pi_hat))
    return 0


def _read_score_lines(path: Path) -> list[float]:
    scores = []
    for line_number, line in enumerate(path.read_text().splitlines(), start=1):
        text = line.strip()
        if not text:
            continue
        try:
            value = float(text)
        except ValueError:
            raise ValueError(f"{path}:{line_number}: not a number: {text!r}") from None
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{path}:{line_number}: score {value} outside [0, 1]")
        scores.append(value)
    if not scores:
        raise ValueError(f"{path}: no scores found")
    return scores


def _cmd_train(args, parser) -> int:
    features, labels = _read_labeled_csv(Path(args.data), args.header)
    config = TrainConfig(
        max_iterations=args.max_iterations,
        tolerance=args.tolerance,
        l2_penalty=args.l2_penalty,
    )
    model, report = train_logistic(SampleSet(features, labels), config)
    Path(args.out).write_text(serialize.dumps(model_to_dict(model)))
    status = "converged" if report.converged else "did not converge"
    print(
        f"{status} after {report.iterations} iterations "
        f"(gradient norm {report.final_gradient_norm:.3e})"
    )
    if report.separation_warning:
        print("warning: training data looks (quasi-)separated", file=sys.stderr)
    return 0


def _read_labeled_csv(path: Path, skip_header: bool):
    rows = []
    labels = []
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        for line_number, row in enumerate(reader, start=1):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if line_number == 1 and skip_header:
                continue
            try:
                if len(row) < 2:
                    raise ValueError("need at least one feature and a label")
                rows.append([float(cell) for cell in row[:-1]])
                label = row[-1].strip()
                if label not in ("0", "1"):
                    raise ValueError(f"label must be 0 or 1, got {label!r}")
                labels.append(label == "1")
            except ValueError as exc:
                raise ValueError(f"{path}:{line_number}: {exc}") from None
    if not rows:
        raise ValueError(f"{path}: no data rows found")
    return np.asarray(rows, dtype=float), np.asarray(labels, dtype=bool)


def _cmd_profile(args, parser) -> int:
    scores_labels = _read_labeled_csv(Path(args.scores), skip_header=False)
    scores, labels = scores_labels[0].ravel(), scores_labels[1]
    profile = fit_profile(
        scores[labels], scores[~labels], args.bins, args.pseudo_count
    )
    Path(args.out).write_text(serialize.dumps(profile_to_dict(profile)))
    print(f"wrote profile with {args.bins} bins to {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
