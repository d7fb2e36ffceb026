"""Figure fidelity on handcrafted summary CSVs."""

from pathlib import Path

import numpy as np
import pytest
from matplotlib.container import ErrorbarContainer

from prevalence_plots.render import FigureSpec, build_figure, read_summary, render_figure

HEADER = "experiment_id,training_prior,eval_prior,estimator,mean,lo95,hi95,n_repeats"


def _simulation_rows():
    lines = [HEADER]
    for training_prior in (0.25, 0.5, 0.75):
        for i in range(9):
            eval_prior = round(0.1 * (i + 1), 1)
            for estimator, offset in (("naive", 0.05), ("mle", 0.0)):
                mean = min(0.95, max(0.05, eval_prior + offset))
                lo = mean - 0.03
                hi = mean + 0.04
                lines.append(
                    f"simulation,{training_prior},{eval_prior},{estimator},"
                    f"{mean},{lo},{hi},100"
                )
    return "\n".join(lines) + "\n"


def _banknote_rows():
    lines = [HEADER]
    for i in range(9):
        eval_prior = round(0.1 * (i + 1), 1)
        for estimator in ("naive", "mle"):
            lines.append(
                f"banknote,0.4744525547445255,{eval_prior},{estimator},"
                f"{eval_prior},{eval_prior - 0.02},{eval_prior + 0.02},100"
            )
    return "\n".join(lines) + "\n"


def _errorbar_containers(ax):
    return [c for c in ax.containers if isinstance(c, ErrorbarContainer)]


def _identity_lines(ax):
    return [
        line
        for line in ax.get_lines()
        if list(line.get_xdata()) == [0.0, 1.0] and list(line.get_ydata()) == [0.0, 1.0]
    ]


class TestSimulationFigure:
    def test_two_panels_with_three_series_each(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text(_simulation_rows())
        fig = build_figure(read_summary(csv_path), "simulation")
        assert len(fig.axes) == 2
        for ax in fig.axes:
            assert len(_errorbar_containers(ax)) == 3
            assert len(_identity_lines(ax)) == 1

    def test_error_bar_endpoints_equal_csv_bounds(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text(_simulation_rows())
        rows = read_summary(csv_path)
        fig = build_figure(rows, "simulation")

        # panel (a) is the naive estimator; series are ascending training priors
        ax = fig.axes[0]
        for container, training_prior in zip(_errorbar_containers(ax), (0.25, 0.5, 0.75)):
            segments = container[2][0].get_segments()
            expected = sorted(
                (
                    (r["eval_prior"], r["lo95"], r["hi95"])
                    for r in rows
                    if r["estimator"] == "naive" and r["training_prior"] == training_prior
                ),
            )
            assert len(segments) == 9
            for segment, (x, lo, hi) in zip(segments, expected):
                (x0, y0), (x1, y1) = segment
                assert x0 == pytest.approx(x) and x1 == pytest.approx(x)
                assert min(y0, y1) == pytest.approx(lo)
                assert max(y0, y1) == pytest.approx(hi)

    def test_render_writes_image_and_leaves_csv_alone(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        payload = _simulation_rows()
        csv_path.write_text(payload)
        out = tmp_path / "fig.png"
        result = render_figure(FigureSpec(csv_path, "simulation", out))
        assert result == out
        assert out.stat().st_size > 0
        assert csv_path.read_text() == payload


class TestBanknoteFigure:
    def test_single_series_per_panel(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text(_banknote_rows())
        fig = build_figure(read_summary(csv_path), "banknote")
        for ax in fig.axes:
            assert len(_errorbar_containers(ax)) == 1


class TestEdgeCases:
    def test_single_cell_still_renders_with_identity_line(self, tmp_path):
        lines = [
            HEADER,
            "simulation,0.5,0.4,naive,0.45,0.40,0.50,100",
            "simulation,0.5,0.4,mle,0.41,0.38,0.44,100",
        ]
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        fig = build_figure(read_summary(csv_path), "simulation")
        for ax in fig.axes:
            containers = _errorbar_containers(ax)
            assert len(containers) == 1
            assert len(containers[0][2][0].get_segments()) == 1
            assert len(_identity_lines(ax)) == 1

    def test_missing_estimator_is_named(self, tmp_path):
        lines = [HEADER, "simulation,0.5,0.4,naive,0.45,0.40,0.50,100"]
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text("\n".join(lines) + "\n")
        with pytest.raises(ValueError, match="mle"):
            build_figure(read_summary(csv_path), "simulation")

    def test_unknown_experiment_rejected(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text(_simulation_rows())
        with pytest.raises(ValueError, match="nonesuch"):
            build_figure(read_summary(csv_path), "nonesuch")

    def test_header_is_validated(self, tmp_path):
        csv_path = tmp_path / "summary.csv"
        csv_path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="unexpected header"):
            read_summary(csv_path)

    def test_cli_reports_missing_file(self, tmp_path, capsys):
        from prevalence_plots.render import main

        code = main(
            ["--summary", str(tmp_path / "nope.csv"), "--experiment", "simulation",
             "--out", str(tmp_path / "fig.png")]
        )
        assert code == 1
        assert "nope.csv" in capsys.readouterr().err
