"""Command-line entry point: one figure kind, one CSV in, one image out.

Exit codes: 0 on success, 1 when the CSV does not match the curve-table
contract, 2 for usage errors.  No output file is created unless the whole
table parses.
"""

from __future__ import annotations

from pathlib import Path

import click
import matplotlib

from .render import FIGURE_KINDS, TableError, render_table

matplotlib.use("Agg")


class DataError(click.ClickException):
    """Input failed validation; exits with code 1."""

    exit_code = 1


@click.command()
@click.argument("kind", type=click.Choice(sorted(FIGURE_KINDS)))
@click.option(
    "--csv",
    "csv_path",
    required=True,
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="Curve table (experiment,series,x,mean,std,runs).",
)
@click.option(
    "--out",
    "out_path",
    required=True,
    type=click.Path(dir_okay=False, path_type=Path),
    help="Image file to write; the format follows the extension.",
)
@click.option("--title", default=None, help="Figure title (default: the figure kind).")
@click.option("--dpi", type=click.IntRange(min=10), default=150, show_default=True, help="Raster resolution.")
def main(kind: str, csv_path: Path, out_path: Path, title: str | None, dpi: int) -> None:
    """Render the KIND figure from a sweep result table."""
    try:
        figure = render_table(csv_path.read_text(encoding="utf-8"), kind, title=title)
    except TableError as e:
        raise DataError(f"{csv_path}: {e}")
    out_path.parent.mkdir(parents=True, exist_ok=True)
    figure.savefig(out_path, dpi=dpi)
    click.echo(f"wrote {out_path}")


if __name__ == "__main__":
    main()
