"""End-to-end report: ingest both arms, analyze each group and write the output bundle."""

from __future__ import annotations

import functools
import hashlib
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd
import scipy

import netdisrupt
from netdisrupt.core.adjust import adjusted_matrix_bounds, adjusted_overlap_bounds, svt_denoise
from netdisrupt.core.bounds import (
    MAX_PMF_SUPPORT,
    destroyed_created_bounds,
    dpo_bounds,
    dte_curve,
    frechet_destroyed_created,
    mean_difference,
    overlap_bounds,
    pmf_cell_bounds,
)
from netdisrupt.core.models import Network, SteBasis
from netdisrupt.core.netmat import IndicatorSpectra
from netdisrupt.core.oracle import MAX_ORACLE_SIZE, sharp_destroyed_created
from netdisrupt.core.ste import (
    disruption_lower_bound,
    empirical_cdf,
    quantile_distance,
    ste_field,
)
from netdisrupt.errors import NetdisruptError, ReportStageError
from netdisrupt.formats.network_io import load_network
from netdisrupt.formats.results import cell_table_frame, curve_frame, write_frame, write_json
from netdisrupt.report.config import Adjustment, AnalysisConfig, ArmInput, Outcome
from netdisrupt.report.figures import common_range, histogram, smoothed_density
from netdisrupt.report.outcomes import (
    build_did_outcome,
    catt_table,
    catt_values,
    load_attributes,
    subset_by_group,
)
from netdisrupt.utils.env import thread_count

logger = logging.getLogger(__name__)

FULL_GROUP = "full"
DEFAULT_GRID_POINTS = 201


@dataclass
class GroupResult:
    """Everything written for one group, keyed by output file name."""

    name: str
    frames: dict[str, pd.DataFrame] = field(default_factory=dict)
    documents: dict[str, dict] = field(default_factory=dict)


@dataclass
class ReportBundle:
    """What run_report produced."""

    output_dir: Path
    files: list[Path]
    summaries: dict[str, dict]


def _stage(name: str):
    """Tag netdisrupt errors raised inside the decorated function with a stage name."""

    def decorate(func):
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            try:
                return func(*args, **kwargs)
            except ReportStageError:
                raise
            except NetdisruptError as exc:
                raise ReportStageError(name, exc) from exc

        return wrapper

    return decorate


def _load_arm(arm: ArmInput, group: int, name: str, outcome: Outcome) -> Network:
    post = load_network(arm.path, arm.fmt, arm.ingest_options(group, name))
    if outcome is Outcome.LEVELS:
        return post
    pre = load_network(arm.pre.path, arm.pre.fmt, arm.pre.ingest_options(group, f"{name}_pre"))
    return build_did_outcome(post, pre)


@_stage("ingest")
def load_arms(config: AnalysisConfig) -> tuple[Network, Network]:
    """Treated and control outcome networks (DiD when configured)."""
    net1 = _load_arm(config.treated, 1, "treated", config.outcome)
    net0 = _load_arm(config.control, 0, "control", config.outcome)
    return net1, net0


@_stage("groups")
def build_groups(
    config: AnalysisConfig, net1: Network, net0: Network, attrs: pd.DataFrame | None
) -> list[tuple[str, Network, Network]]:
    groups = [(FULL_GROUP, net1, net0)]
    for spec in config.groups:
        sub1 = subset_by_group(net1, attrs, spec)
        sub0 = subset_by_group(net0, attrs, spec)
        groups.append((spec.name, sub1, sub0))
    return groups


def default_dte_grid(net1: Network, net0: Network) -> np.ndarray:
    """Every attainable difference of a treated and a control value, or an even grid over them."""
    diffs = np.unique(np.subtract.outer(net1.support(), net0.support()))
    if diffs.size > DEFAULT_GRID_POINTS:
        return np.linspace(diffs[0], diffs[-1], DEFAULT_GRID_POINTS)
    return diffs


def _indicator_spectra(config: AnalysisConfig) -> IndicatorSpectra:
    tau = config.svt_tau
    if tau is None:
        return IndicatorSpectra()
    return IndicatorSpectra(
        denoise=functools.partial(svt_denoise, threshold=tau, constant=config.svt_constant)
    )


def _link_change_summary(
    config: AnalysisConfig, net1: Network, net0: Network, workers
) -> dict | None:
    if not (net1.is_binary() and net0.is_binary()):
        return None
    n = net0.n
    summary = {}
    spectral = destroyed_created_bounds(net1, net0, overlap=overlap_bounds)
    baseline = frechet_destroyed_created(net1, net0)
    adjusted = None
    if config.adjust is Adjustment.REDUCTION:
        adjusted = destroyed_created_bounds(net1, net0, overlap=adjusted_matrix_bounds)
    for kind in ("destroyed", "created"):
        summary[kind] = {
            "bounds": spectral[kind].to_dict(),
            "pair_counts": list(spectral[kind].as_pair_counts(n)),
            "frechet_hoeffding": baseline[kind].to_dict(),
            "frechet_hoeffding_pair_counts": list(baseline[kind].as_pair_counts(n)),
        }
        if adjusted is not None:
            summary[kind]["adjusted_bounds"] = adjusted[kind].to_dict()
            summary[kind]["adjusted_pair_counts"] = list(adjusted[kind].as_pair_counts(n))
    if config.oracle and net1.n == net0.n <= MAX_ORACLE_SIZE:
        destroyed, created = sharp_destroyed_created(net1, net0, workers=workers)
        summary["destroyed"]["sharp_pair_counts"] = destroyed.to_dict(full=True)
        summary["created"]["sharp_pair_counts"] = created.to_dict(full=True)
    return summary


def analyze_group(
    config: AnalysisConfig,
    name: str,
    net1: Network,
    net0: Network,
    attrs: pd.DataFrame | None,
    workers: int | None = None,
) -> GroupResult:
    """Bounds, baselines, spectral effects and plot data for one treated/control pair."""
    logger.info("analyzing group %s (N1=%d, N0=%d)", name, net1.n, net0.n)
    result = GroupResult(name=name)
    spectra = _indicator_spectra(config)
    corner = adjusted_overlap_bounds if config.adjust is Adjustment.REDUCTION else dpo_bounds
    summary: dict = {
        "group": name,
        "n_treated": net1.n,
        "n_control": net0.n,
        "mean_difference": mean_difference(net1, net0),
        "disruption_lower_bound": disruption_lower_bound(net1, net0),
    }

    if max(net1.support().size, net0.support().size) <= MAX_PMF_SUPPORT:
        table = pmf_cell_bounds(net1, net0, corner=corner, spectra=spectra)
        result.frames["cells.csv"] = cell_table_frame(table)
        lower, upper = table.altered_fraction()
        summary["altered_fraction"] = [lower, upper]
        summary["cells"] = table.to_dict()
        p1, p0 = table.marginals1[:, None], table.marginals0[None, :]
        summary["frechet_hoeffding_cells"] = {
            "lower": np.maximum(0.0, p1 + p0 - 1.0),
            "upper": np.minimum(p1, p0),
        }
    else:
        logger.warning(
            "group %s has more than %d outcome values; skipping the cell table",
            name,
            MAX_PMF_SUPPORT,
        )

    if config.dte_grid is not None:
        grid = np.asarray(config.dte_grid)
    else:
        grid = default_dte_grid(net1, net0)
    curve = dte_curve(net1, net0, grid, spectra=spectra)
    stt = ste_field(net1, net0, SteBasis.TREATED)
    stu = ste_field(net1, net0, SteBasis.UNTREATED)
    frame = curve_frame(curve)
    # point-identified curves, valid under matrix rank invariance
    frame["stt_cdf"] = empirical_cdf(stt.values, grid)
    frame["stu_cdf"] = empirical_cdf(stu.values, grid)
    result.frames["dte_curve.csv"] = frame

    summary["ste"] = {
        "l2_squared": stt.l2_squared(),
        "stt_stu_distance": quantile_distance(stt.values, stu.values),
        "degenerate": stt.degenerate,
        "dropped_terms": {"stt": stt.dropped_terms, "stu": stu.dropped_terms},
    }
    samples = {"stt": stt.entries(), "stu": stu.entries()}

    if config.covariates is not None:
        catt = catt_table(net1, net0, attrs, config.covariates)
        result.frames["catt.csv"] = catt
        values = catt_values(net1, attrs, config.covariates, catt)
        if values.size:
            samples["catt"] = values

    value_range = common_range(*samples.values())
    result.documents["ste_histogram.json"] = {
        key: histogram(values, config.histogram_bins, value_range)
        for key, values in samples.items()
    }
    density = {}
    for key, values in samples.items():
        x, y = smoothed_density(values, config.kde_points, value_range)
        density.setdefault("x", x)
        density[key] = y
    result.frames["ste_density.csv"] = pd.DataFrame(density)

    link_change = _link_change_summary(config, net1, net0, workers)
    if link_change is not None:
        summary["link_change"] = link_change
    summary["indicator_spectra_cached"] = len(spectra)
    result.documents["summary.json"] = summary
    return result


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


def _write_group(output_dir: Path, result: GroupResult) -> list[Path]:
    group_dir = output_dir / result.name
    written = []
    for filename in sorted(result.frames):
        written.append(write_frame(group_dir / filename, result.frames[filename]))
    for filename in sorted(result.documents):
        written.append(write_json(group_dir / filename, result.documents[filename]))
    return written


def run_report(config: AnalysisConfig, threads: int | None = None) -> ReportBundle:
    """Run every configured analysis and write the report bundle under ``config.output_dir``."""
    workers = thread_count(threads if threads is not None else config.threads)
    net1, net0 = load_arms(config)
    attrs = None
    if config.attributes is not None:
        attrs = _stage("attributes")(load_attributes)(config.attributes)
    groups = build_groups(config, net1, net0, attrs)

    analyze = _stage("analysis")(analyze_group)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(analyze, config, name, g1, g0, attrs, workers) for name, g1, g0 in groups
        ]
        results = [future.result() for future in futures]

    output_dir = config.output_dir
    files: list[Path] = []
    for result in results:
        files.extend(_write_group(output_dir, result))

    manifest = {
        "config": config.model_dump(mode="json", by_alias=True),
        "inputs": {str(path): _sha256(path) for path in config.input_files()},
        "versions": {
            "netdisrupt": netdisrupt.__version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "pandas": pd.__version__,
        },
        "files": sorted(str(path.relative_to(output_dir)) for path in files),
    }
    files.append(write_json(output_dir / "manifest.json", manifest))
    logger.info("report %s: wrote %d files to %s", config.name, len(files), output_dir)
    return ReportBundle(
        output_dir=output_dir,
        files=files,
        summaries={result.name: result.documents["summary.json"] for result in results},
    )
