"""Reading and aggregating schema=1 run CSVs.

This package couples to the experiment harness strictly through its CSV files;
it never imports the solver. Aggregation is the same mean +- std (sample std,
ddof=1) across seeds that the harness's report command emits.
"""

from __future__ import annotations

import csv
import glob
from pathlib import Path

import numpy as np

SCHEMA_LINE = "# schema=1"


class PlotkitError(ValueError):
    pass


def read_csv(path) -> tuple[list[str], list[dict]]:
    lines = Path(path).read_text().splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise PlotkitError(f"{path}: missing schema header")
    if lines[0] != SCHEMA_LINE:
        raise PlotkitError(f"{path}: unsupported schema {lines[0]!r}")
    reader = csv.reader(lines[1:])
    header = next(reader)
    rows = []
    for parts in reader:
        rows.append({col: (None if cell == "" else float(cell)) for col, cell in zip(header, parts)})
    return header, rows


def expand_inputs(pattern) -> list[str]:
    files = sorted(glob.glob(str(pattern)))
    if not files:
        raise PlotkitError(f"no files match {pattern!r}")
    return files


def aggregate_files(files, x: str, columns: list[str]):
    """Per-x mean/std across files for each column.

    Returns {column: (xs, means, stds)} with xs sorted ascending.
    """
    parsed = []
    for f in files:
        header, rows = read_csv(f)
        for col in [x, *columns]:
            if col not in header:
                raise PlotkitError(f"{f}: column {col!r} not in schema ({header})")
        parsed.append(rows)
    out = {}
    xs = sorted({row[x] for rows in parsed for row in rows if row.get(x) is not None})
    for col in columns:
        means = []
        stds = []
        kept_x = []
        for xv in xs:
            vals = [row[col] for rows in parsed for row in rows if row.get(x) == xv and row.get(col) is not None]
            if not vals:
                continue
            arr = np.array(vals)
            kept_x.append(xv)
            means.append(float(arr.mean()))
            stds.append(float(arr.std(ddof=1)) if arr.size > 1 else 0.0)
        if not kept_x:
            raise PlotkitError(f"column {col!r} has no values to aggregate")
        out[col] = (np.array(kept_x), np.array(means), np.array(stds))
    return out
