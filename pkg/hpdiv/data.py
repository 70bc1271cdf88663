# =============================================================================
# DATA.PY - LABELED CSV INGESTION FOR THE REAL-DATA WORKFLOW
# =============================================================================
# Real datasets arrive as delimited tables: one label column and a set of
# numeric feature columns. This module picks two classes out of such a
# table and turns them into a LabeledPointSet, and runs the descriptive
# sweeps used on real data (divergence vs number of features, divergence vs
# sample size).
#
# Processing order in load_labeled_csv:
#   read -> select the two classes -> parse numbers -> dedupe -> subsample
#   -> normalize -> jitter

"""
Labeled CSV loading, writing and real-data sweeps

EXAMPLE USAGE:
from hpdiv.data import load_labeled_csv
from hpdiv.models import DatasetSpec

spec = DatasetSpec(path="skin.csv", label_column="class", class_pair=("1", "2"),
                   max_rows_per_class=600, normalize="unit-cube", seed=4)
sample = load_labeled_csv(spec)
"""

# IMPORT STATEMENTS
# =============================================================================

import csv
import itertools
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import DataError, ParseError, SchemaError
from .estimator import estimate_divergence
from .models import DatasetSpec, DivergenceEstimate, LabeledPointSet, Normalization
from .seeding import rng_for

logger = logging.getLogger(__name__)

# Delimiters recognised by auto-detection
DELIMITERS = (",", ";", "\t")

# Lines read for delimiter sniffing
SNIFF_LINES = 50

# Stream keys of the ingestion draws
_SUBSAMPLE_STREAM = 0
_JITTER_STREAM = 1


# READING
# =============================================================================

def detect_delimiter(path: Union[str, Path]) -> str:
    """
    Comma, semicolon or tab, sniffed from the first lines of the file

    Delimiters inside quoted fields are not counted. Falls back to a comma
    when no candidate splits the lines consistently (e.g. one column).
    """
    with open(path, newline="") as handle:
        head = "".join(itertools.islice(handle, SNIFF_LINES))
    try:
        return csv.Sniffer().sniff(head, delimiters="".join(DELIMITERS)).delimiter
    except csv.Error:
        return ","


def _resolve_column(frame: pd.DataFrame, column: Union[str, int], role: str):
    """Column label for a header name or a 0-based position"""
    if isinstance(column, int) or (isinstance(column, str) and column not in frame.columns and column.isdigit()):
        position = int(column)
        if not 0 <= position < frame.shape[1]:
            raise SchemaError(f"{role} column index {position} is outside 0..{frame.shape[1] - 1}")
        return frame.columns[position]
    if column not in frame.columns:
        raise SchemaError(f"{role} column '{column}' not found (columns: {', '.join(map(str, frame.columns))})")
    return column


def _parse_features(frame: pd.DataFrame, columns: list, header_lines: int) -> np.ndarray:
    """Parse feature cells as floats, reporting the first bad cell by file row and column"""
    values = np.empty((frame.shape[0], len(columns)))
    for j, column in enumerate(columns):
        cells = frame[column].str.strip()
        parsed = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=np.float64)
        bad = np.flatnonzero(~np.isfinite(parsed))
        if bad.size:
            row = int(frame.index[bad[0]]) + header_lines + 1
            cell = frame[column].iloc[bad[0]]
            raise ParseError(f"row {row}, column '{column}': '{cell}' is not a finite number", row=row, column=str(column))
        # exact decimal conversion, so 17-digit output reloads bit for bit
        values[:, j] = cells.to_numpy(dtype=str).astype(np.float64)
    return values


def _normalize(points: np.ndarray, how: Normalization) -> np.ndarray:
    if how == Normalization.UNIT_CUBE:
        low = points.min(axis=0)
        span = points.max(axis=0) - low
        return (points - low) / np.where(span > 0, span, 1.0)
    if how == Normalization.Z_SCORE:
        spread = points.std(axis=0)
        return (points - points.mean(axis=0)) / np.where(spread > 0, spread, 1.0)
    return points


def load_labeled_csv(spec: DatasetSpec) -> LabeledPointSet:
    """
    Load the two classes named by spec.class_pair as a LabeledPointSet

    X holds the rows labeled class_pair[0], Y those labeled class_pair[1],
    both in file order. Labels are compared as stripped strings.

    RAISES:
    SchemaError: label or feature column missing
    ParseError: a feature cell is empty or not a finite number
    DataError: fewer than two of the requested classes present, or a
               requested feature count the file cannot supply
    """
    path = Path(spec.path)
    if not path.is_file():
        raise DataError(f"data file {path} does not exist")
    delimiter = spec.delimiter or detect_delimiter(path)

    try:
        frame = pd.read_csv(
            path,
            sep=delimiter,
            header=0 if spec.has_header else None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
        )
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise ParseError(f"{path}: {exc}") from exc

    label_column = _resolve_column(frame, spec.label_column, "label")
    if spec.feature_columns is None:
        feature_columns = [column for column in frame.columns if column != label_column]
    else:
        feature_columns = [_resolve_column(frame, column, "feature") for column in spec.feature_columns]
    if not feature_columns:
        raise DataError("no feature columns selected")

    labels = frame[label_column].str.strip()
    selected = frame[labels.isin(spec.class_pair)]
    selected_labels = labels[labels.isin(spec.class_pair)]
    if selected_labels.nunique() < 2:
        found = sorted(selected_labels.unique())
        raise DataError(f"need both classes {spec.class_pair}, found only {found or 'none'}")

    points = _parse_features(selected, feature_columns, 1 if spec.has_header else 0)
    is_x = (selected_labels == spec.class_pair[0]).to_numpy()

    if spec.dedupe:
        _, first = np.unique(points, axis=0, return_index=True)
        keep = np.sort(first)
        dropped = points.shape[0] - keep.size
        points, is_x = points[keep], is_x[keep]
        if dropped:
            logger.info("Dropped %d duplicate feature rows", dropped)

    x_points, y_points = points[is_x], points[~is_x]
    if x_points.shape[0] == 0 or y_points.shape[0] == 0:
        raise DataError("one class is empty after deduplication")

    if spec.max_rows_per_class is not None:
        rng = rng_for(spec.seed, _SUBSAMPLE_STREAM)
        x_points = _subsample(x_points, spec.max_rows_per_class, rng)
        y_points = _subsample(y_points, spec.max_rows_per_class, rng)

    merged = _normalize(np.vstack([x_points, y_points]), spec.normalize)
    if spec.jitter > 0:
        merged = merged + rng_for(spec.seed, _JITTER_STREAM).normal(0.0, spec.jitter, size=merged.shape)

    m = x_points.shape[0]
    sample = LabeledPointSet.from_arrays(merged[:m], merged[m:])
    logger.info(
        "✅ Loaded %s: %d x %d (class %s) and %d x %d (class %s)",
        path.name, sample.m, sample.dim, spec.class_pair[0], sample.n, sample.dim, spec.class_pair[1],
    )
    return sample


def _subsample(points: np.ndarray, limit: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw of limit rows without replacement, kept in file order"""
    if points.shape[0] <= limit:
        return points
    chosen = np.sort(rng.choice(points.shape[0], size=limit, replace=False))
    return points[chosen]


# WRITING
# =============================================================================

def write_labeled_csv(
    sample: LabeledPointSet,
    path: Union[str, Path],
    label_names: Tuple[str, str] = ("0", "1"),
    feature_names: Optional[Sequence[str]] = None,
) -> DatasetSpec:
    """
    Write a sample as CSV with 17 significant digits, which reloads exactly

    RETURNS:
    A DatasetSpec that reads the file back into an equal sample
    """
    feature_names = list(feature_names or [f"x{k + 1}" for k in range(sample.dim)])
    if len(feature_names) != sample.dim:
        raise DataError(f"{len(feature_names)} feature names for {sample.dim} features")
    points, labels = sample.merged()
    frame = pd.DataFrame(points, columns=feature_names)
    frame["label"] = np.where(labels == 0, label_names[0], label_names[1])
    frame.to_csv(path, index=False, float_format="%.17g", lineterminator="\n")
    return DatasetSpec(path=str(path), label_column="label", feature_columns=feature_names,
                       class_pair=tuple(label_names), delimiter=",")


# SWEEPS
# =============================================================================

def feature_sweep(sample: LabeledPointSet, max_dim: Optional[int] = None) -> List[DivergenceEstimate]:
    """
    Estimates using only the first k features, for k = 1 .. max_dim

    The output is descriptive: adding a feature may move the estimate
    either way.
    """
    max_dim = sample.dim if max_dim is None else max_dim
    if not 1 <= max_dim <= sample.dim:
        raise DataError(f"cannot sweep up to {max_dim} features, the sample has {sample.dim}")
    return [estimate_divergence(sample.first_features(k)) for k in range(1, max_dim + 1)]


def feature_sweep_frame(sample: LabeledPointSet, max_dim: Optional[int] = None) -> pd.DataFrame:
    """feature_sweep as a table with one row per feature count"""
    rows = []
    for k, estimate in enumerate(feature_sweep(sample, max_dim), start=1):
        rows.append({"features": k, **estimate.model_dump(include={"m", "n", "r_statistic", "d_hat_raw", "d_hat", "a_hat"})})
    return pd.DataFrame(rows, columns=["features", "m", "n", "r_statistic", "d_hat_raw", "d_hat", "a_hat"])


def sample_size_sweep(sample: LabeledPointSet, sizes: Sequence[int], parts: int = 1, seed: int = 0) -> pd.DataFrame:
    """
    Divergence against per-class sample size, with error bars from disjoint parts

    For every size s both classes are shuffled and cut into `parts`
    disjoint chunks of s points; each chunk pair gives one estimate.

    RETURNS:
    One row per size: size, parts, mean_d_hat, se_d_hat, mean_r
    """
    if parts < 1:
        raise DataError("parts must be at least 1")
    rows = []
    for index, size in enumerate(sizes):
        if size < 1 or size * parts > min(sample.m, sample.n):
            raise DataError(f"{parts} parts of {size} points need more rows than the smaller class has ({min(sample.m, sample.n)})")
        rng = rng_for(seed, index)
        x_order = rng.permutation(sample.m)
        y_order = rng.permutation(sample.n)
        estimates = []
        for part in range(parts):
            chunk = slice(part * size, (part + 1) * size)
            piece = LabeledPointSet.from_arrays(
                sample.x_points.points[np.sort(x_order[chunk])],
                sample.y_points.points[np.sort(y_order[chunk])],
            )
            estimates.append(estimate_divergence(piece))
        d_values = np.array([e.d_hat for e in estimates])
        rows.append({
            "size": size,
            "parts": parts,
            "mean_d_hat": float(d_values.mean()),
            "se_d_hat": float(d_values.std(ddof=1) / np.sqrt(parts)) if parts > 1 else 0.0,
            "mean_r": float(np.mean([e.r_statistic for e in estimates])),
        })
    return pd.DataFrame(rows, columns=["size", "parts", "mean_d_hat", "se_d_hat", "mean_r"])
