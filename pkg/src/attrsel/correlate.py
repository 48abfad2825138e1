"""Attribute-attribute and attribute-target correlations for mixed data.

Numeric pairs use Pearson's r with population moments.  A nominal
attribute is expanded into one 0/1 indicator per category; its correlation
with a numeric attribute is the frequency-weighted sum of the indicator
correlations, and nominal-nominal pairs weight every indicator pair by the
product of both frequencies.

Degenerate pairs (fewer than two paired rows, zero variance, all-missing)
come back as 0 with a flag instead of raising.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .colstats import MissingPolicy, apply_missing_policy
from .dataset import Dataset
from .errors import ParseError, SchemaError

SIGNED = "signed"
ABSOLUTE = "absolute"


class Corr(NamedTuple):
    """One correlation value with its bookkeeping."""

    r: float
    count: int
    degenerate: bool


_DEGENERATE = Corr(0.0, 0, True)


def _clamp(r: float) -> float:
    return min(1.0, max(-1.0, r))


def _numeric_pair(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Rows where both numeric columns are present."""
    mask = ~(np.isnan(x) | np.isnan(y))
    if mask.all():
        return x, y
    return x[mask], y[mask]


def pearson_corr(x, y) -> Corr:
    """Pearson r over paired-present rows of two numeric columns (NaN = missing)."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape:
        raise ValueError("columns must have equal length")
    xs, ys = _numeric_pair(x, y)
    n = xs.shape[0]
    if n < 2:
        return Corr(0.0, n, True)
    if xs.min() == xs.max() or ys.min() == ys.max():
        return Corr(0.0, n, True)
    dx = xs - np.sum(xs) / n
    dy = ys - np.sum(ys) / n
    sxx = float(np.sum(dx * dx))
    syy = float(np.sum(dy * dy))
    sxy = float(np.sum(dx * dy))
    return Corr(_clamp(sxy / math.sqrt(sxx * syy)), n, False)


def pearson(x, y) -> float:
    """``r = sum(dx*dy) / (n * sigma_x * sigma_y)``; 0 for degenerate pairs.

    >>> pearson([1, 2, 3, 4], [1, 3, 2, 4])
    0.8
    """
    return pearson_corr(x, y).r


def _weighted(contrib: np.ndarray, weights: np.ndarray, aggregation: str) -> float:
    if aggregation == ABSOLUTE:
        contrib = np.abs(contrib)
    elif aggregation != SIGNED:
        raise ValueError(f"unknown aggregation {aggregation!r}")
    return math.fsum((weights * contrib).tolist())


def nominal_numeric_corr_info(
    codes, y, n_categories: int | None = None, aggregation: str = SIGNED
) -> Corr:
    """Frequency-weighted indicator correlation of a nominal vs a numeric column.

    ``codes`` holds category indices with -1 for missing; ``y`` uses NaN.
    """
    codes = np.asarray(codes, dtype=np.int64)
    y = np.asarray(y, dtype=np.float64)
    if codes.shape != y.shape:
        raise ValueError("columns must have equal length")
    mask = (codes >= 0) & ~np.isnan(y)
    if not mask.all():
        codes, y = codes[mask], y[mask]
    n = codes.shape[0]
    if n < 2:
        return Corr(0.0, n, True)
    k = int(n_categories) if n_categories is not None else int(codes.max()) + 1
    counts = np.bincount(codes, minlength=k).astype(np.float64)
    if y.min() == y.max() or counts.max() == n:
        return Corr(0.0, n, True)
    dy = y - np.sum(y) / n
    syy = float(np.sum(dy * dy))
    sum_dy = float(np.sum(dy))
    # sum over rows of (indicator - p) * dy, per category
    block = np.bincount(codes, weights=dy, minlength=k)
    p = counts / n
    sxy = block - p * sum_dy
    sxx = n * p * (1.0 - p)
    live = (counts > 0) & (counts < n)
    r = np.zeros(k)
    r[live] = sxy[live] / np.sqrt(sxx[live] * syy)
    r = np.clip(r, -1.0, 1.0)
    return Corr(_clamp(_weighted(r, p, aggregation)), n, False)


def nominal_numeric_corr(codes, y, n_categories: int | None = None, aggregation: str = SIGNED) -> float:
    """``sum_i p(X = x_i) * pearson(indicator_i(X), Y)``.

    >>> nominal_numeric_corr([0, 0, 0, 1], [1, 1, 1, 0])
    0.5
    """
    return nominal_numeric_corr_info(codes, y, n_categories, aggregation).r


def nominal_nominal_corr_info(
    x_codes, y_codes, kx: int | None = None, ky: int | None = None, aggregation: str = SIGNED
) -> Corr:
    x_codes = np.asarray(x_codes, dtype=np.int64)
    y_codes = np.asarray(y_codes, dtype=np.int64)
    if x_codes.shape != y_codes.shape:
        raise ValueError("columns must have equal length")
    mask = (x_codes >= 0) & (y_codes >= 0)
    if not mask.all():
        x_codes, y_codes = x_codes[mask], y_codes[mask]
    n = x_codes.shape[0]
    if n < 2:
        return Corr(0.0, n, True)
    kx = int(kx) if kx is not None else int(x_codes.max()) + 1
    ky = int(ky) if ky is not None else int(y_codes.max()) + 1
    table = np.bincount(x_codes * ky + y_codes, minlength=kx * ky).reshape(kx, ky)
    table = table.astype(np.float64)
    nx = table.sum(axis=1)
    ny = table.sum(axis=0)
    if nx.max() == n or ny.max() == n:
        return Corr(0.0, n, True)
    # phi coefficient of each indicator pair, from integer counts
    num = n * table - np.outer(nx, ny)
    den = np.sqrt(np.outer(nx * (n - nx), ny * (n - ny)))
    live = den > 0
    r = np.zeros_like(num)
    r[live] = num[live] / den[live]
    r = np.clip(r, -1.0, 1.0)
    weights = np.outer(nx / n, ny / n)
    return Corr(_clamp(_weighted(r.ravel(), weights.ravel(), aggregation)), n, False)


def nominal_nominal_corr(x_codes, y_codes, kx=None, ky=None, aggregation: str = SIGNED) -> float:
    """``sum_ij p(X=x_i) p(Y=y_j) pearson(indicator_i(X), indicator_j(Y))``."""
    return nominal_nominal_corr_info(x_codes, y_codes, kx, ky, aggregation).r


def column_corr(ds: Dataset, i: int, j: int, aggregation: str = SIGNED) -> Corr:
    """Correlation between columns ``i`` and ``j`` of ``ds``, dispatched on kind."""
    ai, aj = ds.attributes[i], ds.attributes[j]
    ci, cj = ds.columns[i], ds.columns[j]
    if ai.is_numeric and aj.is_numeric:
        return pearson_corr(ci, cj)
    if ai.is_nominal and aj.is_nominal:
        return nominal_nominal_corr_info(ci, cj, len(ai.categories), len(aj.categories), aggregation)
    if ai.is_nominal:
        return nominal_numeric_corr_info(ci, cj, len(ai.categories), aggregation)
    return nominal_numeric_corr_info(cj, ci, len(aj.categories), aggregation)


def _self_corr(ds: Dataset, i: int) -> Corr:
    """Diagonal entry: 1 unless the attribute cannot vary."""
    attr = ds.attributes[i]
    present = ~ds.missing(i)
    n = int(present.sum())
    col = ds.columns[i][present]
    if n < 2 or col.min() == col.max():
        return Corr(0.0, n, True)
    return Corr(1.0, n, False)


@dataclass(frozen=True, eq=False)
class CorrelationStructure:
    """Correlations among analysis attributes and against the target.

    Attributes
    ----------
    names : tuple of str
        Analysis attribute names, in the order used by every array here.
    target_name : str
    matrix : ndarray (n, n)
        Symmetric; diagonal 1 for non-degenerate attributes, 0 otherwise.
    target_corr : ndarray (n,)
    pair_counts, target_counts : ndarray of int or None
        Rows used per pair; None when loaded from a precomputed matrix.
    degenerate_mask, target_degenerate : ndarray of bool
    """

    names: tuple[str, ...]
    target_name: str
    matrix: np.ndarray
    target_corr: np.ndarray
    pair_counts: np.ndarray | None = None
    degenerate_mask: np.ndarray | None = None
    target_counts: np.ndarray | None = None
    target_degenerate: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.names)
        m = np.array(self.matrix, dtype=np.float64)
        t = np.array(self.target_corr, dtype=np.float64)
        if m.shape != (n, n) or t.shape != (n,):
            raise SchemaError("correlation arrays do not match the attribute list")
        if not np.array_equal(m, m.T):
            raise SchemaError("correlation matrix is not symmetric")
        if len(set(self.names)) != n or self.target_name in self.names:
            raise SchemaError("attribute names must be unique and exclude the target")
        deg = (
            np.zeros((n, n), dtype=bool)
            if self.degenerate_mask is None
            else np.array(self.degenerate_mask, dtype=bool)
        )
        tdeg = (
            np.zeros(n, dtype=bool)
            if self.target_degenerate is None
            else np.array(self.target_degenerate, dtype=bool)
        )
        for name, arr in (("matrix", m), ("target_corr", t), ("degenerate_mask", deg), ("target_degenerate", tdeg)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        object.__setattr__(self, "names", tuple(self.names))
        for name in ("pair_counts", "target_counts"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.array(arr, dtype=np.int64)
                arr.setflags(write=False)
                object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise SchemaError(f"no attribute named {name!r} in correlation structure") from None

    def subset(self, indices: Sequence[int]) -> "CorrelationStructure":
        idx = np.asarray(indices, dtype=np.int64)
        pick = lambda a: None if a is None else a[np.ix_(idx, idx)]  # noqa: E731
        vec = lambda a: None if a is None else a[idx]  # noqa: E731
        return CorrelationStructure(
            tuple(self.names[i] for i in idx),
            self.target_name,
            self.matrix[np.ix_(idx, idx)],
            self.target_corr[idx],
            pick(self.pair_counts),
            pick(self.degenerate_mask),
            vec(self.target_counts),
            vec(self.target_degenerate),
        )

    # -- lower-triangle CSV --------------------------------------------------

    def full_matrix(self) -> tuple[tuple[str, ...], np.ndarray]:
        """Names and the (n+1)x(n+1) matrix with the target as the last row/column."""
        n = self.size
        full = np.empty((n + 1, n + 1))
        full[:n, :n] = self.matrix
        full[n, :n] = self.target_corr
        full[:n, n] = self.target_corr
        full[n, n] = 1.0
        return self.names + (self.target_name,), full

    def to_csv(self, decimals: int | None = None, triangle: bool = True) -> str:
        """Lower-triangular matrix with header row and column, target last.

        ``decimals=None`` writes shortest round-trip (full precision) values.
        """
        names, full = self.full_matrix()
        fmt = (lambda v: repr(float(v))) if decimals is None else (lambda v: f"{v:.{decimals}f}")
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["", *names])
        for i, name in enumerate(names):
            cells = [fmt(full[i, j]) if (j <= i or not triangle) else "" for j in range(len(names))]
            writer.writerow([name, *cells])
        return out.getvalue()

    @classmethod
    def from_csv(cls, source, target: str | None = None) -> "CorrelationStructure":
        """Load a square or lower-triangular matrix written by :meth:`to_csv`.

        The target defaults to the last column.  Blank upper cells are filled
        by symmetry.
        """
        text = source if isinstance(source, str) else source.read()
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise ParseError("empty correlation matrix")
        names = [c.strip() for c in rows[0][1:]]
        if len(rows) - 1 != len(names):
            raise ParseError(f"matrix has {len(rows) - 1} rows for {len(names)} columns")
        size = len(names)
        full = np.full((size, size), np.nan)
        for i, row in enumerate(rows[1:]):
            lineno = i + 2
            if row[0].strip() != names[i]:
                raise ParseError("row label does not match column order", lineno, row[0])
            cells = [c.strip() for c in row[1:]]
            if len(cells) > size:
                raise ParseError("too many cells", lineno, ",".join(row))
            for j, cell in enumerate(cells):
                if cell == "":
                    continue
                try:
                    full[i, j] = float(cell)
                except ValueError:
                    raise ParseError("correlation is not a number", lineno, cell) from None
        for i in range(size):
            for j in range(i):
                lo, hi = full[i, j], full[j, i]
                if math.isnan(lo):
                    full[i, j] = hi
                elif not math.isnan(hi) and hi != lo:
                    raise ParseError(f"asymmetric entries for {names[i]!r}/{names[j]!r}")
                full[j, i] = full[i, j]
        if np.isnan(full).any():
            raise ParseError("correlation matrix has empty cells below the diagonal")
        tname = target if target is not None else names[-1]
        if tname not in names:
            raise SchemaError(f"target {tname!r} not present in matrix")
        t = names.index(tname)
        keep = [i for i in range(size) if i != t]
        return cls(
            tuple(names[i] for i in keep),
            tname,
            full[np.ix_(keep, keep)],
            full[keep, t],
        )


def correlation_structure(
    ds: Dataset,
    attributes: Sequence[int] | None = None,
    policy: MissingPolicy | str = MissingPolicy.PAIRWISE,
    aggregation: str = SIGNED,
    threads: int = 1,
) -> CorrelationStructure:
    """Build the correlation structure of ``ds`` against its target.

    ``attributes`` defaults to every attribute except the target.  Each pair
    is computed independently and written to its own slot, so the result is
    identical for any ``threads`` value.
    """
    if ds.target is None:
        raise SchemaError("dataset has no target attribute")
    if attributes is None:
        attributes = [i for i in range(ds.n_attributes) if i != ds.target]
    attributes = [int(a) for a in attributes]
    if ds.target in attributes:
        raise SchemaError("analysis set must exclude the target")
    if len(set(attributes)) != len(attributes):
        raise SchemaError("analysis set has repeated attributes")

    data = apply_missing_policy(ds, policy, attributes + [ds.target])
    n = len(attributes)
    matrix = np.zeros((n, n))
    counts = np.zeros((n, n), dtype=np.int64)
    degenerate = np.zeros((n, n), dtype=bool)
    tcorr = np.zeros(n)
    tcounts = np.zeros(n, dtype=np.int64)
    tdeg = np.zeros(n, dtype=bool)

    jobs = [(a, b) for a in range(n) for b in range(a, n)] + [(a, None) for a in range(n)]

    def work(job):
        a, b = job
        ia = attributes[a]
        if b is None:
            return column_corr(data, ia, data.target, aggregation)
        if a == b:
            return _self_corr(data, ia)
        return column_corr(data, ia, attributes[b], aggregation)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]

    for (a, b), c in zip(jobs, results):
        if b is None:
            tcorr[a], tcounts[a], tdeg[a] = c.r, c.count, c.degenerate
        else:
            matrix[a, b] = matrix[b, a] = c.r
            counts[a, b] = counts[b, a] = c.count
            degenerate[a, b] = degenerate[b, a] = c.degenerate

    return CorrelationStructure(
        tuple(data.attributes[i].name for i in attributes),
        data.attributes[data.target].name,
        matrix,
        tcorr,
        counts,
        degenerate,
        tcounts,
        tdeg,
    )
