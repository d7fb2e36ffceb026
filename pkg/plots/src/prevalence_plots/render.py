"""Two-panel estimate figures from an experiment summary CSV.

Panel (a) plots the naive estimator, panel (b) the maximum-likelihood one:
mean estimate against the true evaluation proportion, one series per
training prior with 95% error bars, plus the gray identity line an unbiased
estimator would follow. The script only reads the summary CSV; it never
recomputes statistics.
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

EXPECTED_HEADER = [
    "experiment_id",
    "training_prior",
    "eval_prior",
    "estimator",
    "mean",
    "lo95",
    "hi95",
    "n_repeats",
]

PANELS = (("naive", "(a) classifier proportion"), ("mle", "(b) maximum likelihood"))

# Blue, orange, green for ascending training priors.
SERIES_COLORS = ("tab:blue", "tab:orange", "tab:green")


@dataclass(frozen=True)
class FigureSpec:
    summary_csv: Path
    experiment_id: str
    output_path: Path


def read_summary(path) -> list[dict]:
    """Parse the summary CSV, validating the exact expected header."""
    with open(path, newline="") as handle:
        reader = csv.reader(handle)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty summary file") from None
        if header != EXPECTED_HEADER:
            raise ValueError(
                f"{path}: unexpected header {header!r}; expected {EXPECTED_HEADER!r}"
            )
        rows = []
        for line_number, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(EXPECTED_HEADER):
                raise ValueError(f"{path}:{line_number}: wrong column count")
            try:
                rows.append(
                    {
                        "experiment_id": row[0],
                        "training_prior": float(row[1]),
                        "eval_prior": float(row[2]),
                        "estimator": row[3],
                        "mean": float(row[4]),
                        "lo95": float(row[5]),
                        "hi95": float(row[6]),
                        "n_repeats": int(row[7]),
                    }
                )
            except ValueError as exc:
                raise ValueError(f"{path}:{line_number}: {exc}") from None
    return rows


def build_figure(rows: list[dict], experiment_id: str):
    """Assemble the two-panel figure for one experiment."""
    selected = [r for r in rows if r["experiment_id"] == experiment_id]
    if not selected:
        raise ValueError(f"no rows for experiment {experiment_id!r}")
    for estimator, _ in PANELS:
        if not any(r["estimator"] == estimator for r in selected):
            raise ValueError(
                f"summary lacks estimator {estimator!r} for experiment {experiment_id!r}"
            )

    training_priors = sorted({r["training_prior"] for r in selected})
    fig, axes = plt.subplots(1, 2, figsize=(10, 4.5), sharey=True)
    for ax, (estimator, title) in zip(axes, PANELS):
        ax.plot([0.0, 1.0], [0.0, 1.0], color="gray", linewidth=1.0, zorder=1,
                label="_identity")
        for series_index, training_prior in enumerate(training_priors):
            cells = sorted(
                (
                    r
                    for r in selected
                    if r["estimator"] == estimator
                    and r["training_prior"] == training_prior
                ),
                key=lambda r: r["eval_prior"],
            )
            if not cells:
                raise ValueError(
                    f"summary lacks estimator {estimator!r} for training prior "
                    f"{training_prior} in experiment {experiment_id!r}"
                )
            x = [r["eval_prior"] for r in cells]
            y = [r["mean"] for r in cells]
            below = [r["mean"] - r["lo95"] for r in cells]
            above = [r["hi95"] - r["mean"] for r in cells]
            color = SERIES_COLORS[series_index % len(SERIES_COLORS)]
            ax.errorbar(
                x,
                y,
                yerr=[below, above],
                fmt="o-",
                markersize=3.5,
                capsize=3,
                color=color,
                label=f"trained at {training_prior:g}",
            )
        ax.set_title(title)
        ax.set_xlabel("true proportion positive")
        ax.set_xlim(0.0, 1.0)
        ax.set_ylim(0.0, 1.0)
    axes[0].set_ylabel("estimated proportion positive")
    axes[0].legend(loc="upper left", fontsize=8)
    fig.suptitle(experiment_id)
    fig.tight_layout()
    return fig


def render_figure(spec: FigureSpec) -> Path:
    """Render the figure described by ``spec`` and write the image file."""
    rows = read_summary(spec.summary_csv)
    fig = build_figure(rows, spec.experiment_id)
    output = Path(spec.output_path)
    output.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(output, dpi=150)
    plt.close(fig)
    return output


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render a two-panel estimate figure from a summary CSV.",
    )
    parser.add_argument("--summary", required=True, help="summary CSV path")
    parser.add_argument("--experiment", required=True, help="experiment id to plot")
    parser.add_argument("--out", required=True, help="output image path")
    args = parser.parse_args(argv)
    try:
        output = render_figure(
            FigureSpec(Path(args.summary), args.experiment, Path(args.out))
        )
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
