"""Rendering plot specs to PNG/SVG images."""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .aggregate import PlotkitError, aggregate_files, expand_inputs


def load_spec(path) -> dict:
    spec = json.loads(Path(path).read_text())
    for key in ("input", "x", "y", "out"):
        if key not in spec:
            raise PlotkitError(f"plot spec {path}: missing key {key!r}")
    if spec.get("aggregate", "mean_std") != "mean_std":
        raise PlotkitError(f"plot spec {path}: unknown aggregate {spec['aggregate']!r}")
    return spec


def render(spec: dict) -> Path:
    """One image per spec: mean curve with a +- std band per series."""
    inputs = spec["input"] if isinstance(spec["input"], list) else [spec["input"]]
    labels = spec.get("labels")
    if labels is not None and len(labels) != len(inputs):
        raise PlotkitError("labels must match the number of input groups")
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for g, pattern in enumerate(inputs):
        files = expand_inputs(pattern)
        curves = aggregate_files(files, spec["x"], list(spec["y"]))
        for col in spec["y"]:
            xs, means, stds = curves[col]
            label = col if labels is None else (labels[g] if len(spec["y"]) == 1 else f"{labels[g]}:{col}")
            (line,) = ax.plot(xs, means, label=label)
            ax.fill_between(xs, means - stds, means + stds, alpha=0.2, color=line.get_color())
    ax.set_xlabel(spec["x"])
    ax.set_ylabel(", ".join(spec["y"]))
    if spec.get("title"):
        ax.set_title(spec["title"])
    ax.legend()
    ax.grid(alpha=0.3)
    out = Path(spec["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out)
    plt.close(fig)
    return out


def render_spec_file(path) -> Path:
    return render(load_spec(path))
