"""plotkit: CSV aggregation, rendering, and the shipped-spec acceptance path."""

import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from plotkit import PlotkitError, aggregate_files, read_csv, render
from plotkit.render import load_spec

REPO = Path(__file__).resolve().parent.parent.parent


def write_csv(path, rows, cols):
    lines = ["# schema=1", ",".join(cols)]
    for row in rows:
        lines.append(",".join("" if row.get(c) is None else repr(float(row[c])) for c in cols))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n")


def make_seed_csvs(tmp_path, values_by_seed):
    cols = ["iter", "seed", "exploitability", "wall_clock_s"]
    paths = []
    for seed, values in values_by_seed.items():
        rows = [{"iter": t + 1, "seed": seed, "exploitability": v, "wall_clock_s": 0.1 * t} for t, v in enumerate(values)]
        p = tmp_path / f"seed{seed}.csv"
        write_csv(p, rows, cols)
        paths.append(p)
    return paths


def test_read_csv_requires_schema(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("iter,seed\n1,0\n")
    with pytest.raises(PlotkitError, match="schema"):
        read_csv(p)


def test_aggregate_mean_std(tmp_path):
    paths = make_seed_csvs(tmp_path, {0: [1.0, 0.5], 1: [2.0, 1.5]})
    curves = aggregate_files(paths, "iter", ["exploitability"])
    xs, means, stds = curves["exploitability"]
    assert np.array_equal(xs, [1.0, 2.0])
    assert np.allclose(means, [1.5, 1.0])
    assert np.allclose(stds, np.array([np.std([1, 2], ddof=1), np.std([0.5, 1.5], ddof=1)]))


def test_missing_column_is_named(tmp_path):
    paths = make_seed_csvs(tmp_path, {0: [1.0]})
    with pytest.raises(PlotkitError, match="welfare"):
        aggregate_files(paths, "iter", ["welfare"])


def test_constant_series_renders_flat_band(tmp_path):
    paths = make_seed_csvs(tmp_path, {0: [0.7] * 5, 1: [0.7] * 5})
    spec = {
        "input": str(tmp_path / "seed*.csv"),
        "x": "iter",
        "y": ["exploitability"],
        "out": str(tmp_path / "flat.png"),
    }
    out = render(spec)
    assert out.exists() and out.stat().st_size > 0
    xs, means, stds = aggregate_files(paths, "iter", ["exploitability"])["exploitability"]
    assert np.all(stds == 0.0)


def test_svg_output(tmp_path):
    make_seed_csvs(tmp_path, {0: [0.5, 0.4, 0.3]})
    spec = {
        "input": str(tmp_path / "seed*.csv"),
        "x": "iter",
        "y": ["exploitability"],
        "out": str(tmp_path / "curve.svg"),
    }
    out = render(spec)
    assert out.suffix == ".svg"
    assert b"<svg" in out.read_bytes()[:500]


def test_spec_validation(tmp_path):
    bad = tmp_path / "spec.json"
    bad.write_text(json.dumps({"input": "x", "x": "iter", "y": ["a"]}))
    with pytest.raises(PlotkitError, match="out"):
        load_spec(bad)


def test_cli_exit_codes(tmp_path):
    make_seed_csvs(tmp_path, {0: [0.5, 0.4]})
    spec_path = tmp_path / "spec.json"
    spec_path.write_text(
        json.dumps(
            {
                "input": str(tmp_path / "seed*.csv"),
                "x": "iter",
                "y": ["exploitability"],
                "out": str(tmp_path / "out.png"),
            }
        )
    )
    proc = subprocess.run([sys.executable, "-m", "plotkit.cli", "--spec", str(spec_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"input": str(tmp_path / "nope*.csv"), "x": "iter", "y": ["a"], "out": "x.png"}))
    proc = subprocess.run([sys.executable, "-m", "plotkit.cli", "--spec", str(missing)], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "nope" in proc.stderr


# -- criterion 11: shipped specs against real runs ---------------------------


@pytest.mark.slow
def test_criterion_11_shipped_specs(tmp_path):
    """Render all three shipped plot specs from real solver outputs; aggregation
    must match the harness report within 1e-9."""
    runs = tmp_path / "runs"
    # criterion-5-shaped outputs (Kuhn solver + Double Oracle) and criterion-7 (PGG)
    jobs = [
        ("kuhn.json", runs / "kuhn_gems", ["--seeds", "0..1", "--iters", "12"]),
        ("kuhn_do.json", runs / "kuhn_do", ["--seeds", "0..1", "--iters", "12"]),
        ("pgg.json", runs / "pgg_gems", ["--seeds", "0..1"]),
    ]
    for config, out, extra in jobs:
        proc = subprocess.run(
            [sys.executable, "-m", "gems.cli", "train", "--config", str(REPO / "configs" / config), "--out", str(out), *extra],
            capture_output=True,
            text=True,
            cwd=REPO,
        )
        assert proc.returncode == 0, proc.stderr

    exit_codes = []
    for spec_name in ("kuhn_exploitability.json", "kuhn_resources.json", "pgg_welfare.json"):
        spec = json.loads((REPO / "configs" / "plots" / spec_name).read_text())
        inputs = spec["input"] if isinstance(spec["input"], list) else [spec["input"]]
        spec["input"] = [str(tmp_path / p) for p in inputs] if len(inputs) > 1 else str(tmp_path / inputs[0])
        spec["out"] = str(tmp_path / Path(spec["out"]))
        spec_path = tmp_path / spec_name
        spec_path.write_text(json.dumps(spec))
        proc = subprocess.run([sys.executable, "-m", "plotkit.cli", "--spec", str(spec_path)], capture_output=True, text=True)
        exit_codes.append(proc.returncode)
        assert proc.returncode == 0, proc.stderr
        assert Path(spec["out"]).exists()

    # aggregation parity with the harness report
    report = json.loads((runs / "kuhn_gems" / "report.json").read_text())
    files = sorted((runs / "kuhn_gems").glob("seed*.csv"))
    curves = aggregate_files(files, "iter", ["exploitability"])
    xs, means, stds = curves["exploitability"]
    by_iter = {entry["iter"]: entry for entry in report["curves"]["exploitability"]}
    for x, mean, std in zip(xs, means, stds):
        entry = by_iter[int(x)]
        assert abs(mean - entry["mean"]) < 1e-9
        assert abs(std - entry["std"]) < 1e-9
    print(f"\ncriterion 11 plotkit: PASS (3 specs rendered, exit codes {exit_codes}, aggregation matches report within 1e-9)")
