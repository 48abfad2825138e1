"""Column summaries, standardization and missing-value policies."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .dataset import Dataset
from .errors import EmptyAnalysisError, SchemaError


@dataclass(frozen=True)
class ColumnSummary:
    """Statistics over the present cells of a numeric column.

    ``sigma`` is the population standard deviation (divisor
    ``present_count``).  An all-missing column has ``present_count == 0``,
    ``mean == sigma == 0`` and ``all_missing`` set; min/max are NaN.
    """

    present_count: int
    mean: float
    sigma: float
    min: float
    max: float
    all_missing: bool = False

    @property
    def degenerate(self) -> bool:
        return self.all_missing or self.sigma == 0.0


class MissingPolicy(str, enum.Enum):
    PAIRWISE = "pairwise"
    IMPUTE = "impute"
    DROP = "drop"


class Standardization(str, enum.Enum):
    MEAN_CENTER = "center"
    ZSCORE = "zscore"


def _present(values, missing=None) -> np.ndarray:
    values = np.asarray(values, dtype=np.float64)
    mask = np.isnan(values)
    if missing is not None:
        mask |= np.asarray(missing, dtype=bool)
    return values[~mask] if mask.any() else values


def summarize(values, missing=None) -> ColumnSummary:
    """Two-pass mean and population sigma over present cells.

    The second pass re-centres on the first-pass mean and applies the usual
    correction term, so columns like ``1e6 + noise`` keep full relative
    precision.
    """
    x = _present(values, missing)
    n = x.shape[0]
    if n == 0:
        return ColumnSummary(0, 0.0, 0.0, math.nan, math.nan, all_missing=True)
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return ColumnSummary(n, lo, 0.0, lo, hi)
    mean = float(np.sum(x)) / n
    d = x - mean
    correction = float(np.sum(d)) / n
    mean += correction
    ss = float(np.sum(d * d)) - n * correction * correction
    sigma = math.sqrt(max(ss, 0.0) / n)
    return ColumnSummary(n, mean, sigma, lo, hi)


class RunningStats:
    """Streaming mean/variance accumulator (Welford, merged per chunk with Chan's rule).

    >>> rs = RunningStats()
    >>> rs.update([1.0, 2.0, 3.0])
    >>> rs.summary().mean
    2.0
    """

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self.m2 = 0.0
        self.min = math.inf
        self.max = -math.inf

    def push(self, value: float) -> None:
        if math.isnan(value):
            return
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)
        self.min = min(self.min, value)
        self.max = max(self.max, value)

    def update(self, chunk: Iterable[float]) -> None:
        x = _present(np.fromiter(chunk, dtype=np.float64) if not hasattr(chunk, "shape") else chunk)
        nb = x.shape[0]
        if nb == 0:
            return
        mean_b = float(np.sum(x)) / nb
        d = x - mean_b
        mean_b += float(np.sum(d)) / nb
        d = x - mean_b
        m2_b = float(np.sum(d * d))
        na = self.count
        n = na + nb
        delta = mean_b - self.mean
        self.mean += delta * nb / n
        self.m2 += m2_b + delta * delta * na * nb / n
        self.count = n
        self.min = min(self.min, float(x.min()))
        self.max = max(self.max, float(x.max()))

    def summary(self) -> ColumnSummary:
        if self.count == 0:
            return ColumnSummary(0, 0.0, 0.0, math.nan, math.nan, all_missing=True)
        if self.min == self.max:
            return ColumnSummary(self.count, self.min, 0.0, self.min, self.max)
        sigma = math.sqrt(max(self.m2, 0.0) / self.count)
        return ColumnSummary(self.count, self.mean, sigma, self.min, self.max)


def standardize(
    values,
    mode: Standardization | str = Standardization.ZSCORE,
    summary: ColumnSummary | None = None,
) -> tuple[np.ndarray, bool]:
    """Mean-centre or z-score a numeric column.

    Returns ``(standardized, degenerate)``.  Missing (NaN) cells stay NaN.  A
    z-scored zero-variance column comes back as zeros (NaN where missing)
    with ``degenerate=True``.
    """
    mode = Standardization(mode)
    x = np.asarray(values, dtype=np.float64)
    summary = summary or summarize(x)
    out = x - summary.mean
    if mode is Standardization.MEAN_CENTER:
        return out, summary.all_missing
    if summary.degenerate:
        out = np.where(np.isnan(x), np.nan, 0.0)
        return out, True
    return out / summary.sigma, False


def modal_category(codes, n_categories: int) -> int:
    """Most frequent category code; ties resolve to the lowest code."""
    codes = np.asarray(codes)
    counts = np.bincount(codes[codes >= 0], minlength=n_categories)
    return int(np.argmax(counts))


def apply_missing_policy(
    ds: Dataset,
    policy: MissingPolicy | str,
    attributes: Sequence[int] | None = None,
) -> Dataset:
    """Resolve missing cells among ``attributes`` (default: all, target included).

    ``PAIRWISE`` returns ``ds`` unchanged; the correlation engine then pairs
    rows per attribute pair.  ``DROP`` keeps only rows complete on the
    analysis attributes.  ``IMPUTE`` fills numeric cells with the column mean
    and nominal cells with the modal category.
    """
    policy = MissingPolicy(policy)
    if attributes is None:
        attributes = range(ds.n_attributes)
    attributes = list(attributes)
    if policy is MissingPolicy.PAIRWISE:
        return ds
    if policy is MissingPolicy.DROP:
        keep = np.ones(ds.n_rows, dtype=bool)
        for i in attributes:
            keep &= ~ds.missing(i)
        if not keep.any():
            raise EmptyAnalysisError("dropping incomplete rows leaves no rows")
        return ds if keep.all() else ds.take(keep)

    replacements = {}
    for i in attributes:
        miss = ds.missing(i)
        if not miss.any():
            continue
        attr = ds.attributes[i]
        col = ds.columns[i]
        if miss.all():
            raise SchemaError(f"cannot impute all-missing attribute {attr.name!r}")
        if attr.is_numeric:
            fill = summarize(col).mean
            replacements[i] = np.where(miss, fill, col)
        else:
            replacements[i] = np.where(miss, modal_category(col, len(attr.categories)), col)
    return ds.replace_columns(replacements) if replacements else ds
