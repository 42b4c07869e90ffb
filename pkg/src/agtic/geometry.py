"""Observation storage and pairwise Euclidean distances.

Distances are computed on the raw coordinates; no per-dimension
standardization is applied.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DataError, InvalidQuantile, NonFiniteInput,
                     TooFewObservations)

MIN_OBSERVATIONS = 4


@dataclass(frozen=True, eq=False)
class Sample:
    """An ``m x p`` matrix of observations, one row per observation.

    A 1-D input is treated as a single column. The stored array is a
    read-only float64 copy.
    """

    data: np.ndarray
    columns: tuple = field(default=None)

    def __post_init__(self):
        arr = np.array(self.data, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2:
            raise ValueError(f"sample must be 1-D or 2-D, got {arr.ndim}-D")
        if arr.shape[0] < MIN_OBSERVATIONS:
            raise TooFewObservations(
                f"need at least {MIN_OBSERVATIONS} observations, got {arr.shape[0]}")
        if not np.all(np.isfinite(arr)):
            bad = np.argwhere(~np.isfinite(arr))[0]
            raise NonFiniteInput(
                f"non-finite value at row {bad[0]}, column {bad[1]}")
        arr.flags.writeable = False
        object.__setattr__(self, "data", arr)
        cols = self.columns
        if cols is None:
            cols = tuple(f"x{j}" for j in range(arr.shape[1]))
        elif len(cols) != arr.shape[1]:
            raise ValueError("column names do not match the data width")
        object.__setattr__(self, "columns", tuple(cols))

    @property
    def m(self):
        return self.data.shape[0]

    @property
    def p(self):
        return self.data.shape[1]

    def take(self, index):
        """Return a new sample with rows reordered by ``index``."""
        return Sample(self.data[np.asarray(index)], self.columns)

    def __len__(self):
        return self.m


@dataclass(frozen=True, eq=False)
class DistanceMatrix:
    """Symmetric, nonnegative, zero-diagonal ``m x m`` distance matrix."""

    entries: np.ndarray
    d_max: float

    @classmethod
    def from_array(cls, entries):
        arr = np.array(entries, dtype=np.float64)
        arr.flags.writeable = False
        return cls(arr, float(arr.max()) if arr.size else 0.0)

    @property
    def m(self):
        return self.entries.shape[0]

    def upper_triangle(self):
        """Strictly upper-triangular entries in row-major order."""
        return self.entries[np.triu_indices(self.m, k=1)]

    def transpose(self):
        return DistanceMatrix.from_array(self.entries.T)


def as_sample(x):
    return x if isinstance(x, Sample) else Sample(x)


def _distances(a):
    # Difference-then-square, summed column by column in a fixed order,
    # keeps d(i, j) bitwise equal to d(j, i) and makes row reordering
    # commute exactly with the distance computation.
    out = None
    for k in range(a.shape[1]):
        diff = np.subtract.outer(a[:, k], a[:, k])
        diff *= diff
        if out is None:
            out = diff
        else:
            out += diff
    return np.sqrt(out, out=out)


def pairwise_euclidean(s):
    """Euclidean distance matrix between the rows of a sample."""
    s = as_sample(s)
    return DistanceMatrix.from_array(_distances(s.data))


def max_distance(d):
    return d.d_max


def _nearest_rank_index(q, n):
    """0-based position of the nearest-rank order statistic ``ceil(q*n)``."""
    t = q * n
    r = round(t)
    # Absorb representation noise such as 0.7 * 10 == 7.000000000000001.
    rank = r if abs(t - r) <= 1e-9 * max(1.0, n) else math.ceil(t)
    return min(max(int(rank), 1), n) - 1


def offdiag_quantile(d, q):
    """Nearest-rank quantile of the strictly off-diagonal distances.

    Uses the ``m(m-1)/2`` upper-triangle values; ``q = 0`` maps to the
    minimum and ``q = 1`` to the maximum. No interpolation.
    """
    if not 0.0 <= q <= 1.0 or math.isnan(q):
        raise InvalidQuantile(f"quantile level must lie in [0, 1], got {q}")
    values = np.sort(d.upper_triangle())
    return float(values[_nearest_rank_index(q, values.size)])


def read_csv(path):
    """Read a sample from a CSV file with one header row.

    Raises
    ------
    DataError
        On ragged rows, non-numeric cells, or too few / non-finite rows.
        Messages name the offending row (1-based, header is row 1) and
        column.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    rows = [r for r in rows if r and any(c.strip() for c in r)]
    if not rows:
        raise DataError(f"{path}: empty file")
    header = [c.strip() for c in rows[0]]
    width = len(header)
    values = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != width:
            raise DataError(
                f"{path}: row {lineno} has {len(row)} fields, expected {width}")
        parsed = []
        for col, cell in zip(header, row):
            try:
                parsed.append(float(cell))
            except ValueError:
                raise DataError(
                    f"{path}: non-numeric value {cell!r} at row {lineno}, "
                    f"column {col!r}") from None
        values.append(parsed)
    if not values:
        raise DataError(f"{path}: no data rows")
    try:
        return Sample(np.array(values), tuple(header))
    except (TooFewObservations, NonFiniteInput) as exc:
        raise DataError(f"{path}: {exc}") from None


def write_csv(sample, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(sample.columns)
        for row in sample.data:
            writer.writerow([repr(float(v)) for v in row])
