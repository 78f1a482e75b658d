"""Render sum-rate sweep figures from aggregate CSV files.

Input is the aggregate CSV written by ``cranrates sweep`` (columns
``scheme,search,L,K,snr_db,C,mean_sum_rate,stderr,trials``). The figure
shows one line per (scheme, search) pair against a chosen x column, with
a fixed scheme -> color/marker map so identical input always renders an
identical image (pure file -> file transformation).
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

__all__ = [
    "X_COLUMNS",
    "FigureSpec",
    "SchemaError",
    "build_sweep_figure",
    "load_aggregates",
    "main",
    "render_sweep_figure",
]

X_COLUMNS = ("C", "snr_db")

_REQUIRED_COLUMNS = ("scheme", "search", "mean_sum_rate")

# Fixed styling, keyed by scheme: (color, marker, linestyle). The cut-set
# bound is a dashed reference line with no marker.
_SCHEME_STYLE = {
    "qcof": ("tab:blue", "o", "-"),
    "jqcof": ("tab:red", "s", "-"),
    "cof": ("tab:green", "^", "-"),
    "swz": ("tab:purple", "v", "-"),
    "cutset": ("black", "", "--"),
}
# Schemes outside the fixed map get styles from here, assigned in sorted
# scheme-name order so the choice is still deterministic.
_FALLBACK_COLORS = ("tab:orange", "tab:brown", "tab:pink", "tab:gray", "tab:olive", "tab:cyan")
_FALLBACK_MARKERS = ("D", "P", "X", "*", "<", ">")

_X_LABELS = {
    "C": "Backhaul capacity C (bits/channel use)",
    "snr_db": "SNR (dB)",
}
_Y_LABEL = "Average sum-rate (bits/channel use)"


class SchemaError(ValueError):
    """The input file does not have the aggregate sweep CSV layout."""


@dataclass(frozen=True)
class FigureSpec:
    """What to plot: input CSV, x column, output image, optional labels."""

    input_csv: str
    x_column: str
    output_path: str
    title: str = ""
    x_label: str | None = None
    y_label: str | None = None

    def __post_init__(self):
        if self.x_column not in X_COLUMNS:
            raise ValueError(f"x_column must be one of {X_COLUMNS}, got {self.x_column!r}")


def load_aggregates(path) -> list[dict]:
    """Rows of an aggregate sweep CSV, with mean_sum_rate parsed to float.

    Raises SchemaError when a required column is missing, a row is
    truncated or non-numeric, or the file has no data rows.
    """
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        rows = list(reader)
    missing = [c for c in _REQUIRED_COLUMNS if c not in header]
    if missing:
        raise SchemaError(f"missing column(s) {', '.join(missing)} in {path}")
    if not rows:
        raise SchemaError(f"no data rows in {path}")
    out = []
    for lineno, row in enumerate(rows, start=2):
        # csv.DictReader pads short rows with None and collects extras
        # under the None key; either way the row does not match the header
        if None in row or any(v is None for v in row.values()):
            raise SchemaError(f"truncated row at line {lineno} of {path}")
        if any(row.get(c) == "" for c in _REQUIRED_COLUMNS):
            raise SchemaError(f"truncated row at line {lineno} of {path}")
        parsed = dict(row)
        try:
            parsed["mean_sum_rate"] = float(row["mean_sum_rate"])
        except ValueError:
            raise SchemaError(
                f"non-numeric mean_sum_rate at line {lineno} of {path}: {row['mean_sum_rate']!r}"
            ) from None
        out.append(parsed)
    return out


def _style(scheme: str, fallback_rank: dict) -> tuple[str, str, str]:
    if scheme in _SCHEME_STYLE:
        return _SCHEME_STYLE[scheme]
    i = fallback_rank[scheme]
    return (
        _FALLBACK_COLORS[i % len(_FALLBACK_COLORS)],
        _FALLBACK_MARKERS[i % len(_FALLBACK_MARKERS)],
        "-",
    )


def build_sweep_figure(spec: FigureSpec):
    """The matplotlib Figure for spec, one line per (scheme, search) pair.

    Series are drawn in a fixed scheme order (known schemes first, then
    unknown ones sorted by name), x-ticks sit exactly on the swept values,
    and both axes are labeled in bits per channel use where applicable.
    """
    rows = load_aggregates(spec.input_csv)
    series: dict[tuple[str, str], list[tuple[float, float]]] = {}
    for lineno, row in enumerate(rows, start=2):
        x_raw = row.get(spec.x_column)
        if x_raw in (None, ""):
            raise SchemaError(f"missing column(s) {spec.x_column} in {spec.input_csv}")
        try:
            x = float(x_raw)
        except ValueError:
            raise SchemaError(
                f"non-numeric {spec.x_column} at line {lineno} of {spec.input_csv}: {x_raw!r}"
            ) from None
        series.setdefault((row["scheme"], row["search"]), []).append((x, row["mean_sum_rate"]))

    schemes = {scheme for scheme, _ in series}
    unknown = sorted(schemes - set(_SCHEME_STYLE))
    fallback_rank = {scheme: i for i, scheme in enumerate(unknown)}
    scheme_order = [s for s in _SCHEME_STYLE if s in schemes] + unknown
    multi_search = len({search for _, search in series}) > 1

    fig, ax = plt.subplots(figsize=(7.5, 4.8))
    for scheme in scheme_order:
        for search in sorted(se for sc, se in series if sc == scheme):
            points = sorted(series[(scheme, search)])
            color, marker, linestyle = _style(scheme, fallback_rank)
            ax.plot(
                [x for x, _ in points],
                [y for _, y in points],
                color=color,
                marker=marker or None,
                linestyle=linestyle,
                label=f"{scheme} ({search})" if multi_search else scheme,
            )
    ax.set_xticks(sorted({x for pts in series.values() for x, _ in pts}))
    ax.set_xlabel(spec.x_label if spec.x_label is not None else _X_LABELS[spec.x_column])
    ax.set_ylabel(spec.y_label if spec.y_label is not None else _Y_LABEL)
    if spec.title:
        ax.set_title(spec.title)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    return fig


def render_sweep_figure(spec: FigureSpec) -> str:
    """Write the figure for spec to spec.output_path and return that path."""
    fig = build_sweep_figure(spec)
    try:
        fig.savefig(spec.output_path)
    finally:
        plt.close(fig)
    return spec.output_path


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="render_figs",
        description="Render a sum-rate sweep figure from an aggregate CSV.",
    )
    parser.add_argument("--in", dest="input_csv", required=True, help="aggregate sweep CSV")
    parser.add_argument("--x", choices=X_COLUMNS, default="C", help="x-axis column (default: C)")
    parser.add_argument("--out", dest="output_path", required=True, help="output image path")
    parser.add_argument("--title", default="", help="figure title")
    args = parser.parse_args(argv)
    spec = FigureSpec(
        input_csv=args.input_csv,
        x_column=args.x,
        output_path=args.output_path,
        title=args.title,
    )
    try:
        path = render_sweep_figure(spec)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
