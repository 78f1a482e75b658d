"""Line charts of averaged sum-rate sweeps.

This package renders figures from the aggregate CSV files written by
``cranrates sweep``. It reads only the CSV — it has no knowledge of how
the numbers were produced.
"""

from .figures import (
    FigureSpec,
    SchemaError,
    build_sweep_figure,
    load_aggregates,
    render_sweep_figure,
)

__version__ = "0.1.0"

__all__ = [
    "FigureSpec",
    "SchemaError",
    "build_sweep_figure",
    "load_aggregates",
    "render_sweep_figure",
]
