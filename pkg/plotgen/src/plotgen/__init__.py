"""Figure rendering for misalignment sweep CSV tables."""

from .render import (
    EXPECTED_HEADER,
    FIGURE_KINDS,
    Y_LABEL,
    Curve,
    TableError,
    read_table,
    render,
    render_table,
)

__all__ = [
    "EXPECTED_HEADER",
    "FIGURE_KINDS",
    "Y_LABEL",
    "Curve",
    "TableError",
    "read_table",
    "render",
    "render_table",
]

__version__ = "0.1.0"
