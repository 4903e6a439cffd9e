"""Outcome construction: difference-in-differences networks, subgroups, and the CATT benchmark."""

from __future__ import annotations

import logging
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from netdisrupt.core.models import Network
from netdisrupt.core.netmat import symmetrize_bipartite
from netdisrupt.errors import ValidationError
from netdisrupt.report.config import CovariateSpec, GroupSpec

logger = logging.getLogger(__name__)

LABEL_COLUMN = "label"


def _align(net: Network, labels: tuple[str, ...]) -> Network:
    """Reorder net so its labels follow ``labels``."""
    position = {label: k for k, label in enumerate(net.labels)}
    return net.relabel([position[label] for label in labels])


def build_did_outcome(post: Network, pre: Network) -> Network:
    """Cellwise post - pre after aligning agents by label.

    A dyad masked in either period stays masked.
    """
    if set(post.labels) != set(pre.labels):
        only_post = sorted(set(post.labels) - set(pre.labels))
        only_pre = sorted(set(pre.labels) - set(post.labels))
        raise ValidationError(
            f"pre/post label sets differ: only in {post.name!r}: {only_post}; "
            f"only in {pre.name!r}: {only_pre}"
        )
    pre = _align(pre, post.labels)
    return Network(
        labels=post.labels,
        values=post.values - pre.values,
        mask=post.mask | pre.mask,
        group=post.group,
        diagonal_policy=post.diagonal_policy,
        name=f"{post.name}-{pre.name}",
    )


def load_attributes(path: Path) -> pd.DataFrame:
    """Agent attribute table indexed by the ``label`` column (as strings)."""
    frame = pd.read_csv(path, dtype={LABEL_COLUMN: str})
    if LABEL_COLUMN not in frame.columns:
        raise ValidationError(f"{Path(path).name}: attribute table needs a {LABEL_COLUMN!r} column")
    if frame[LABEL_COLUMN].duplicated().any():
        dupes = sorted(frame.loc[frame[LABEL_COLUMN].duplicated(), LABEL_COLUMN].unique())
        raise ValidationError(f"{Path(path).name}: duplicate labels {dupes}")
    return frame.set_index(LABEL_COLUMN)


def _column_for(net: Network, attrs: pd.DataFrame, column: str) -> pd.Series:
    if column not in attrs.columns:
        raise ValidationError(
            f"attribute column {column!r} not found; have {sorted(attrs.columns)}"
        )
    missing = [label for label in net.labels if label not in attrs.index]
    if missing:
        raise ValidationError(f"agents of {net.name!r} missing from the attribute table: {missing}")
    return attrs.loc[list(net.labels), column].astype(str)


def subset_by_group(net: Network, attrs: pd.DataFrame, spec: GroupSpec) -> Network:
    """Induced subnetwork on the agents selected by ``spec``.

    With ``spec.cols`` the result holds only the dyads between the row-side and column-side
    agents, symmetrized as a bipartite network with the within-side blocks masked.
    """
    values = _column_for(net, attrs, spec.column).to_numpy()
    rows = np.flatnonzero(np.isin(values, spec.rows))
    if rows.size == 0:
        raise ValidationError(f"group {spec.name!r} selects no agents of {net.name!r}")
    name = f"{net.name}[{spec.name}]"

    if spec.cols is None:
        return replace(net.relabel(rows), name=name)

    cols = np.flatnonzero(np.isin(values, spec.cols))
    if cols.size == 0:
        raise ValidationError(f"group {spec.name!r} selects no column-side agents of {net.name!r}")
    # masked cells of the source (if any) would become real zeros here
    block = net.values[np.ix_(rows, cols)]
    return symmetrize_bipartite(
        [net.labels[k] for k in rows],
        [net.labels[k] for k in cols],
        block,
        group=net.group,
        name=name,
    )


def covariate_bins(labels: tuple[str, ...], attrs: pd.DataFrame, spec: CovariateSpec) -> pd.Series:
    """Bin key per agent: numeric columns cut into quantile bins, others used as categories."""
    missing = [label for label in labels if label not in attrs.index]
    if missing:
        raise ValidationError(f"agents missing from the attribute table: {missing}")
    parts = []
    for column in spec.columns:
        if column not in attrs.columns:
            raise ValidationError(f"covariate column {column!r} not found")
        series = attrs.loc[list(labels), column]
        if pd.api.types.is_numeric_dtype(series) and series.nunique() > spec.bins:
            series = pd.qcut(series, q=spec.bins, labels=False, duplicates="drop")
        parts.append(column + "=" + series.astype(str))
    key = parts[0]
    for part in parts[1:]:
        key = key + "|" + part
    return key


def _cell_means(net: Network, bins: pd.Series) -> pd.DataFrame:
    keys = bins.to_numpy()
    i, j = np.nonzero(~net.mask & ~np.eye(net.n, dtype=bool))
    frame = pd.DataFrame({"bin_i": keys[i], "bin_j": keys[j], "value": net.values[i, j]})
    return frame.groupby(["bin_i", "bin_j"], sort=True)["value"].agg(["mean", "size"])


def catt_table(
    net1: Network, net0: Network, attrs: pd.DataFrame, spec: CovariateSpec
) -> pd.DataFrame:
    """Difference of arm means of off-diagonal dyads within each (bin_i, bin_j) cell."""
    means1 = _cell_means(net1, covariate_bins(net1.labels, attrs, spec))
    means0 = _cell_means(net0, covariate_bins(net0.labels, attrs, spec))
    table = means1.join(means0, how="inner", lsuffix="1", rsuffix="0")
    if table.empty:
        logger.warning("no covariate cell is populated in both arms")
    table = table.rename(columns={"size1": "dyads1", "size0": "dyads0"})
    table["catt"] = table["mean1"] - table["mean0"]
    return table.reset_index()


def catt_values(
    net1: Network, attrs: pd.DataFrame, spec: CovariateSpec, table: pd.DataFrame
) -> np.ndarray:
    """CATT of each off-diagonal treated-arm dyad, for plotting next to the STT."""
    keys = covariate_bins(net1.labels, attrs, spec).to_numpy()
    i, j = np.nonzero(~net1.mask & ~np.eye(net1.n, dtype=bool))
    lookup = table.set_index(["bin_i", "bin_j"])["catt"]
    index = pd.MultiIndex.from_arrays([keys[i], keys[j]])
    return lookup.reindex(index).dropna().to_numpy()
