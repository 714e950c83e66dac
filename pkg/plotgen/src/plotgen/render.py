"""Turn sweep CSV tables into labelled matplotlib figures.

The input contract is the stable curve-table format::

    experiment,series,x,mean,std,runs

One figure kind exists per experiment name; it fixes the axis labels.  Each
distinct ``series`` value becomes one line, drawn in row order, with a one-
standard-deviation band whenever the table carries a nonzero ``std``.  The
reader is strict: a wrong header, a row from a different experiment, or a
non-numeric cell is reported with its column name (and row number) rather
than plotted wrong.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

from matplotlib.figure import Figure

EXPECTED_HEADER = ("experiment", "series", "x", "mean", "std", "runs")

#: figure kind -> x-axis label; the y axis is always the misalignment score.
FIGURE_KINDS = {
    "problem-areas": "agents",
    "goals": "agents",
    "weight-sensitivity": "weight",
    "goal-distribution": "proportion",
    "conflict-levels": "goals",
    "carla": "vehicle fraction",
}

Y_LABEL = "misalignment"


class TableError(ValueError):
    """The CSV does not match the curve-table contract."""


@dataclass(frozen=True)
class Curve:
    """One line of a figure: its legend label and its sampled points."""

    label: str
    xs: tuple[float, ...]
    means: tuple[float, ...]
    stds: tuple[float, ...]


def _number(cell: str, column: str, row: int) -> float:
    try:
        return float(cell)
    except ValueError:
        raise TableError(f"row {row}: column '{column}' is not a number: {cell!r}")


def read_table(text: str, kind: str) -> list[Curve]:
    """Parse and check a curve table for the given figure kind."""
    if kind not in FIGURE_KINDS:
        raise TableError(f"unknown figure kind {kind!r}, expected one of {sorted(FIGURE_KINDS)}")
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise TableError("empty file: expected the header " + ",".join(EXPECTED_HEADER))
    header = tuple(rows[0])
    if header != EXPECTED_HEADER:
        for i, expected in enumerate(EXPECTED_HEADER):
            got = header[i] if i < len(header) else "<missing>"
            if got != expected:
                raise TableError(f"header column {i + 1} must be '{expected}', got '{got}'")
        raise TableError(f"header has {len(header)} columns, expected {len(EXPECTED_HEADER)}")

    curves: dict[str, list[tuple[float, float, float]]] = {}
    for row_no, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(EXPECTED_HEADER):
            raise TableError(f"row {row_no}: expected {len(EXPECTED_HEADER)} columns, got {len(row)}")
        experiment, series, x, mean, std, runs = row
        if experiment != kind:
            raise TableError(
                f"row {row_no}: column 'experiment' is '{experiment}', expected '{kind}'"
            )
        point = (
            _number(x, "x", row_no),
            _number(mean, "mean", row_no),
            _number(std, "std", row_no),
        )
        if not runs.isdigit():
            raise TableError(f"row {row_no}: column 'runs' is not a positive integer: {runs!r}")
        curves.setdefault(series, []).append(point)

    if not curves:
        raise TableError("the table has a header but no data rows")

    result = []
    for label, points in curves.items():
        points.sort(key=lambda p: p[0])
        xs, means, stds = zip(*points)
        result.append(Curve(label=label, xs=xs, means=means, stds=stds))
    return result


def render(curves: list[Curve], kind: str, title: str | None = None) -> Figure:
    """Draw one figure: a line per curve, a std band where the data has spread."""
    if kind not in FIGURE_KINDS:
        raise TableError(f"unknown figure kind {kind!r}, expected one of {sorted(FIGURE_KINDS)}")
    if not curves:
        raise TableError("nothing to draw: no curves")
    fig = Figure(figsize=(7, 4.5), layout="tight")
    ax = fig.add_subplot()
    for curve in curves:
        (line,) = ax.plot(curve.xs, curve.means, marker=".", label=curve.label or None)
        if any(std > 0 for std in curve.stds):
            ax.fill_between(
                curve.xs,
                [m - s for m, s in zip(curve.means, curve.stds)],
                [m + s for m, s in zip(curve.means, curve.stds)],
                alpha=0.2,
                color=line.get_color(),
                linewidth=0,
            )
    ax.set_xlabel(FIGURE_KINDS[kind])
    ax.set_ylabel(Y_LABEL)
    ax.set_title(title if title is not None else kind)
    if any(curve.label for curve in curves):
        ax.legend(fontsize="small")
    return fig


def render_table(text: str, kind: str, title: str | None = None) -> Figure:
    """Parse a curve table and draw it in one step."""
    return render(read_table(text, kind), kind, title=title)
