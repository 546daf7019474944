"""Figure generation from experiment CSV logs (schema=1)."""

from .aggregate import PlotkitError, aggregate_files, read_csv
from .render import render, render_spec_file

__version__ = "0.1.0"
__all__ = ["PlotkitError", "aggregate_files", "read_csv", "render", "render_spec_file", "__version__"]
