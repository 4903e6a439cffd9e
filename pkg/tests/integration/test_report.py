"""End-to-end tests of the batch report on the toy config."""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent.parent))

import json

import pandas as pd
import pytest

from netdisrupt.errors import ReportStageError
from netdisrupt.report import load_config, run_report
from tests.helpers import FIXTURES


def _toy_config(output_dir):
    config = load_config(FIXTURES / "toy_report.yaml")
    return config.model_copy(update={"output_dir": output_dir})


def test_toy_report_contents(tmp_path):
    """The full-sample summary carries the sharp sets, baselines and both bound variants."""
    bundle = run_report(_toy_config(tmp_path), threads=2)
    summary = bundle.summaries["full"]
    destroyed = summary["link_change"]["destroyed"]

    assert summary["mean_difference"] == 0.0
    assert destroyed["sharp_pair_counts"]["values"] == [3.0, 4.0]
    assert summary["link_change"]["created"]["sharp_pair_counts"]["values"] == [3.0, 4.0]
    assert destroyed["frechet_hoeffding_pair_counts"] == pytest.approx([0.0, 5.0], abs=1e-12)

    lower, upper = destroyed["pair_counts"]
    adj_lower, adj_upper = destroyed["adjusted_pair_counts"]
    assert lower <= adj_lower <= 3 + 1e-9
    assert 4 - 1e-9 <= adj_upper <= upper
    assert set(bundle.summaries) == {"full", "high", "high_low"}


def test_toy_report_files(tmp_path):
    """Each group gets its tables, plot data and summary; the manifest lists them all."""
    bundle = run_report(_toy_config(tmp_path))

    expected = {
        "catt.csv",
        "cells.csv",
        "dte_curve.csv",
        "ste_density.csv",
        "ste_histogram.json",
        "summary.json",
    }
    for group in ("full", "high", "high_low"):
        assert {p.name for p in (tmp_path / group).iterdir()} == expected

    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert len(manifest["files"]) == 18
    assert set(manifest["versions"]) == {"netdisrupt", "numpy", "scipy", "pandas"}
    assert all(len(digest) == 64 for digest in manifest["inputs"].values())
    assert len(bundle.files) == 19

    cells = pd.read_csv(tmp_path / "full" / "cells.csv")
    assert list(cells.columns) == [
        "y1",
        "lower[y0=0]",
        "upper[y0=0]",
        "lower[y0=1]",
        "upper[y0=1]",
        "marginal1",
    ]
    curve = pd.read_csv(tmp_path / "full" / "dte_curve.csv")
    assert curve["y"].tolist() == [-1.0, 0.0, 1.0]
    assert {"stt_cdf", "stu_cdf"} <= set(curve.columns)


def test_report_denoising_changes_cell_bounds(tmp_path):
    """The configured denoiser reaches the bounds through the shared spectrum cache."""
    plain = run_report(_toy_config(tmp_path / "plain"))
    config = _toy_config(tmp_path / "svt").model_copy(update={"denoise": "svt:1000000"})
    denoised = run_report(config)

    assert plain.summaries["full"]["indicator_spectra_cached"] > 0
    assert denoised.summaries["full"]["indicator_spectra_cached"] > 0
    plain_cells = pd.read_csv(tmp_path / "plain" / "full" / "cells.csv")
    denoised_cells = pd.read_csv(tmp_path / "svt" / "full" / "cells.csv")
    assert not plain_cells.equals(denoised_cells)


def test_report_is_deterministic(tmp_path):
    """Two runs into the same directory write byte-identical files."""
    config = _toy_config(tmp_path)

    run_report(config)
    first = {p: p.read_bytes() for p in sorted(tmp_path.rglob("*")) if p.is_file()}
    run_report(config, threads=1)
    second = {p: p.read_bytes() for p in sorted(tmp_path.rglob("*")) if p.is_file()}

    assert first == second


def test_report_stage_errors(tmp_path):
    """A failure inside the pipeline names the stage and keeps the exit code."""
    attrs = tmp_path / "attributes.csv"
    attrs.write_text("label,side\na,H\n")
    config = _toy_config(tmp_path).model_copy(update={"attributes": attrs})

    with pytest.raises(ReportStageError) as excinfo:
        run_report(config)

    assert excinfo.value.stage == "groups"
    assert excinfo.value.exit_code == 2


if __name__ == "__main__":
    print("Run with pytest: pytest tests/integration/test_report.py")
