"""
Datasets: synthetic generation and CSV ingestion.

CSV files have a header row; an empty field is a missing value. The outcome
column must be binary and complete. Row numbers in error messages count the
header as row 1, so they match what a spreadsheet shows.

Usage:
    data = load_csv("data/mimic_like.csv", outcome_column="mortality")
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from common.errors import InvalidInputError, ParseError
from common.rng import derive_rng
from impute.masking import MaskedData

logger = logging.getLogger(__name__)

DEFAULT_OUTCOME_COLUMN = "outcome"
NOISE_SCALE = 0.1


@dataclass(frozen=True)
class Dataset:
    X: np.ndarray
    y: np.ndarray
    feature_names: Tuple[str, ...]
    provenance: str

    def __post_init__(self):
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise InvalidInputError(f"X rows must match y length: {self.X.shape} vs {self.y.shape}")
        if not np.all(np.isin(self.y, (0, 1))):
            raise InvalidInputError("y must be binary (0/1)")

    def to_masked(self) -> MaskedData:
        return MaskedData.complete(self.X, self.y, self.feature_names)


def _distinct_vertices(n_vertices: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    seen = set()
    vertices = []
    while len(vertices) < n_vertices:
        bits = tuple(int(b) for b in rng.integers(0, 2, size=dim))
        if bits not in seen:
            seen.add(bits)
            vertices.append(bits)
    return np.array(vertices, dtype=np.float64)


def generate_synthetic(
    n_rows: int,
    n_features: int,
    n_informative: int,
    class_sep: float = 1.0,
    seed: int = 0,
    n_clusters_per_class: int = 2,
    flip_y: float = 0.01,
) -> Dataset:
    """
    Two-class data in the style of make_classification.

    Class clusters are Gaussian blobs (random linear covariance) centred on
    distinct vertices of the hypercube [-class_sep, class_sep]^n_informative.
    The remaining features are random linear mixtures of the informative ones
    plus small noise. A fraction flip_y of labels is reassigned at random and
    the rows are shuffled.

    Args:
        n_rows: Number of rows
        n_features: Total number of features
        n_informative: Features carrying class signal
        class_sep: Half the hypercube side length
        seed: Random seed; the output is a pure function of the arguments

    Returns:
        Dataset
    """
    if n_rows < 2 or n_features < 1 or not 1 <= n_informative <= n_features:
        raise InvalidInputError(
            f"invalid sizes: n_rows={n_rows}, n_features={n_features}, n_informative={n_informative}"
        )
    n_clusters = 2 * n_clusters_per_class
    if n_clusters > 2 ** n_informative:
        raise InvalidInputError(
            f"{n_clusters} clusters do not fit on the vertices of a {n_informative}-dimensional hypercube"
        )
    if not 0.0 <= flip_y <= 1.0:
        raise InvalidInputError(f"flip_y must be in [0, 1], got {flip_y}")

    rng = derive_rng(seed, "synthetic")
    centroids = (2.0 * _distinct_vertices(n_clusters, n_informative, rng) - 1.0) * class_sep

    sizes = np.full(n_clusters, n_rows // n_clusters)
    sizes[: n_rows % n_clusters] += 1

    X_informative = np.empty((n_rows, n_informative))
    y = np.empty(n_rows, dtype=np.int64)
    start = 0
    for cluster, size in enumerate(sizes):
        covariance = 2.0 * rng.random((n_informative, n_informative)) - 1.0
        block = rng.standard_normal((size, n_informative)) @ covariance + centroids[cluster]
        X_informative[start:start + size] = block
        y[start:start + size] = cluster % 2
        start += size

    n_extra = n_features - n_informative
    mixing = 2.0 * rng.random((n_informative, n_extra)) - 1.0
    X_extra = X_informative @ mixing + NOISE_SCALE * rng.standard_normal((n_rows, n_extra))
    X = np.hstack([X_informative, X_extra])

    flipped = rng.random(n_rows) < flip_y
    y[flipped] = rng.integers(0, 2, size=int(flipped.sum()))

    order = rng.permutation(n_rows)
    names = tuple(f"x{j}" for j in range(n_features))
    provenance = (f"synthetic(n_rows={n_rows}, n_features={n_features}, n_informative={n_informative}, "
                  f"class_sep={class_sep}, seed={seed})")
    logger.debug(f"Generated {provenance}")
    return Dataset(X[order], y[order], names, provenance)


def load_csv(path: Union[str, Path], outcome_column: str = DEFAULT_OUTCOME_COLUMN) -> MaskedData:
    """
    Read a CSV into MaskedData.

    Args:
        path: CSV file with a header row
        outcome_column: Name of the binary outcome column

    Returns:
        MaskedData with empty feature cells masked

    Raises:
        ParseError: a feature cell is not a finite number
        InvalidInputError: the outcome column is absent, incomplete or non-binary
    """
    path = Path(path)
    if not path.exists():
        raise InvalidInputError(f"file not found: {path}")

    df = pd.read_csv(path, dtype=str, keep_default_na=False)
    if outcome_column not in df.columns:
        raise InvalidInputError(f"outcome column {outcome_column!r} not in {path.name} (columns: {list(df.columns)})")

    outcome = np.empty(len(df), dtype=np.int64)
    for row_number, cell in enumerate(df[outcome_column].str.strip(), start=2):
        if cell == "":
            raise InvalidInputError(f"{path.name} row {row_number}: outcome is missing")
        try:
            value = float(cell)
        except ValueError:
            raise InvalidInputError(f"{path.name} row {row_number}: outcome {cell!r} is not numeric")
        if value not in (0.0, 1.0):
            raise InvalidInputError(f"{path.name} row {row_number}: outcome {cell!r} is not 0 or 1")
        outcome[row_number - 2] = int(value)

    feature_names = [c for c in df.columns if c != outcome_column]
    values = np.empty((len(df), len(feature_names)))
    for j, name in enumerate(feature_names):
        cells = df[name].str.strip()
        empty = cells == ""
        numbers = pd.to_numeric(cells.where(~empty), errors="coerce").to_numpy(dtype=np.float64)
        bad = ~empty.to_numpy() & ~np.isfinite(numbers)
        if bad.any():
            row = int(np.argmax(bad))
            raise ParseError(
                f"{path.name} row {row + 2}, column {name!r}: cannot parse {df[name].iloc[row]!r} as a number",
                row=row + 2,
                column=name,
            )
        values[:, j] = numbers

    mask = np.isfinite(values)
    logger.info(f"Loaded {path.name}: {values.shape[0]} rows, {values.shape[1]} features, "
                f"{int((~mask).sum())} missing cells")
    return MaskedData(values, mask, outcome, tuple(feature_names))


def save_csv(
    path: Union[str, Path],
    values: np.ndarray,
    outcome: np.ndarray,
    feature_names: Sequence[str],
    outcome_column: str = DEFAULT_OUTCOME_COLUMN,
    mask: Optional[np.ndarray] = None,
) -> Path:
    """Write features and outcome; cells with mask False (or NaN) become empty fields."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    values = np.array(values, dtype=np.float64)
    if mask is not None:
        values[~np.asarray(mask, dtype=bool)] = np.nan
    df = pd.DataFrame(values, columns=list(feature_names))
    df[outcome_column] = np.asarray(outcome, dtype=np.int64)
    df.to_csv(path, index=False, na_rep="")
    logger.info(f"Wrote {path} ({len(df)} rows)")
    return path
