"""Figure rendering for prevalence-mle experiment summaries."""

__version__ = "0.1.0"

from .render import FigureSpec, build_figure, read_summary, render_figure

__all__ = ["FigureSpec", "build_figure", "read_summary", "render_figure", "__version__"]
