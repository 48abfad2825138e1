"""Principal component analysis of the numeric attributes.

The eigendecomposition is a cyclic Jacobi sweep over the symmetric
covariance or correlation matrix.  Eigenpairs come out sorted by
descending eigenvalue (stable for ties) with each eigenvector's
largest-magnitude entry made non-negative, so reports are reproducible
byte for byte.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .colstats import MissingPolicy, apply_missing_policy, summarize
from .correlate import pearson_corr
from .dataset import Dataset
from .errors import ConvergenceError, EmptyAnalysisError, SchemaError

DEFAULT_VARIANCE_THRESHOLD = 0.95
MAX_SWEEPS = 50


class PcaMode(str, enum.Enum):
    CORRELATION = "corr"
    COVARIANCE = "cov"


def _rotate(a: np.ndarray, v: np.ndarray, p: int, q: int) -> None:
    """Apply the Jacobi rotation that zeroes ``a[p, q]`` in place."""
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c

    col_p = a[:, p].copy()
    col_q = a[:, q].copy()
    a[:, p] = c * col_p - s * col_q
    a[:, q] = s * col_p + c * col_q
    row_p = a[p, :].copy()
    row_q = a[q, :].copy()
    a[p, :] = c * row_p - s * row_q
    a[q, :] = s * row_p + c * row_q
    a[p, q] = a[q, p] = 0.0

    vp = v[:, p].copy()
    vq = v[:, q].copy()
    v[:, p] = c * vp - s * vq
    v[:, q] = s * vp + c * vq


def eigen_sym(
    m, tol: float = 1e-10, max_sweeps: int = MAX_SWEEPS
) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and eigenvectors of a symmetric matrix by cyclic Jacobi rotation.

    Parameters
    ----------
    m : array_like (n, n)
        Symmetric within 1e-12 (relative to its largest entry).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol`` times the norm of ``m``.
    max_sweeps : int
        Sweep budget before :class:`ConvergenceError` is raised.

    Returns
    -------
    eigenvalues : ndarray (n,)
        Descending.
    eigenvectors : ndarray (n, n)
        Column ``j`` is the unit eigenvector for ``eigenvalues[j]``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    a = np.array(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if a.size and float(np.max(np.abs(a - a.T))) > 1e-12 * max(1.0, scale):
        raise ValueError("matrix is not symmetric")
    a = (a + a.T) / 2.0
    v = np.eye(n)
    norm = float(np.linalg.norm(a))
    if n == 0 or norm == 0.0:
        return np.zeros(n), v

    upper = np.triu_indices(n, 1)
    for _ in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[upper] ** 2)))
        if off <= tol * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q)
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")

    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    for j in range(n):
        lead = int(np.argmax(np.abs(v[:, j])))
        if v[lead, j] < 0:
            v[:, j] = -v[:, j]
    return w, v


def components_for_threshold(
    eigenvalues, threshold: float = DEFAULT_VARIANCE_THRESHOLD, total_variance: float | None = None
) -> int:
    """Smallest ``k`` whose leading eigenvalues explain at least ``threshold`` of the variance.

    ``total_variance`` lets a truncated spectrum be scored against the full
    variance (e.g. the trace of the original matrix).  If the supplied
    eigenvalues never reach the threshold, ``len(eigenvalues) + 1`` is
    returned as the lower bound on the count.

    >>> components_for_threshold([2, 1, 1], 0.95)
    3
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must lie in (0, 1]")
    lam = np.asarray(eigenvalues, dtype=np.float64)
    total = math.fsum(lam.tolist()) if total_variance is None else float(total_variance)
    if total <= 0 or not np.any(lam != 0):
        raise ValueError("spectrum is all zero")
    truncated = total_variance is not None and total_variance > math.fsum(lam.tolist()) * (1 + 1e-12)
    cumulative = np.cumsum(lam) / total
    hits = np.nonzero(cumulative >= threshold)[0]
    if hits.size:
        return int(hits[0]) + 1
    # rounding can leave the full-spectrum sum a hair under 1
    return lam.size + 1 if truncated else lam.size


@dataclass(frozen=True, eq=False)
class PcaResult:
    names: tuple[str, ...]
    mode: PcaMode
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    proportions: np.ndarray
    cumulative: np.ndarray
    threshold: float
    k_for_threshold: int
    total_variance: float
    means: np.ndarray
    scales: np.ndarray
    matrix: np.ndarray
    dropped: tuple[str, ...] = ()

    @property
    def n_components(self) -> int:
        return self.eigenvalues.shape[0]


def _resolve_attributes(ds: Dataset, attributes: Sequence[int | str] | None) -> list[int]:
    if attributes is None:
        return [i for i, a in enumerate(ds.attributes) if a.is_numeric]
    idx = [ds.index(a) if isinstance(a, str) else int(a) for a in attributes]
    nominal = [ds.attributes[i].name for i in idx if ds.attributes[i].is_nominal]
    if nominal:
        raise SchemaError(f"PCA takes numeric attributes only; got nominal {nominal}")
    return idx


def pca_fit(
    ds: Dataset,
    mode: PcaMode | str = PcaMode.CORRELATION,
    threshold: float = DEFAULT_VARIANCE_THRESHOLD,
    policy: MissingPolicy | str = MissingPolicy.PAIRWISE,
    attributes: Sequence[int | str] | None = None,
) -> PcaResult:
    """Fit PCA on the numeric attributes of ``ds``.

    Correlation mode decomposes the (pairwise-complete, unless another
    policy is chosen) correlation matrix of z-scored columns; covariance
    mode decomposes the population covariance of mean-centred columns and
    needs complete data, so it rejects the pairwise policy.  Zero-variance
    columns are dropped with a warning.
    """
    mode = PcaMode(mode)
    policy = MissingPolicy(policy)
    if not 0 < threshold <= 1:
        raise ValueError("variance threshold must lie in (0, 1]")
    if mode is PcaMode.COVARIANCE and policy is MissingPolicy.PAIRWISE:
        raise SchemaError("covariance PCA needs the impute or drop missing policy")
    idx = _resolve_attributes(ds, attributes)
    data = apply_missing_policy(ds, policy, idx)
    if data.n_rows < 2:
        raise EmptyAnalysisError("PCA needs at least two rows")

    usable, dropped, summaries = [], [], []
    for i in idx:
        s = summarize(data.columns[i])
        if s.degenerate or s.present_count < 2:
            dropped.append(data.attributes[i].name)
        else:
            usable.append(i)
            summaries.append(s)
    if dropped:
        warnings.warn(f"dropping zero-variance attributes from PCA: {', '.join(dropped)}", stacklevel=2)
    if len(usable) < 2:
        raise EmptyAnalysisError("PCA needs at least two attributes with non-zero variance")

    d = len(usable)
    mat = np.zeros((d, d))
    means = np.array([s.mean for s in summaries])
    if mode is PcaMode.CORRELATION:
        scales = np.array([s.sigma for s in summaries])
        for a in range(d):
            mat[a, a] = 1.0
            for b in range(a + 1, d):
                r = pearson_corr(data.columns[usable[a]], data.columns[usable[b]]).r
                mat[a, b] = mat[b, a] = r
    else:
        scales = np.ones(d)
        centred = [data.columns[i] - m for i, m in zip(usable, means)]
        n = data.n_rows
        for a in range(d):
            for b in range(a, d):
                mat[a, b] = mat[b, a] = float(np.sum(centred[a] * centred[b])) / n

    eigenvalues, eigenvectors = eigen_sym(mat)
    total = math.fsum(eigenvalues.tolist())
    proportions = eigenvalues / total
    cumulative = np.cumsum(proportions)
    k = components_for_threshold(eigenvalues, threshold)
    return PcaResult(
        names=tuple(data.attributes[i].name for i in usable),
        mode=mode,
        eigenvalues=eigenvalues,
        eigenvectors=eigenvectors,
        proportions=proportions,
        cumulative=cumulative,
        threshold=threshold,
        k_for_threshold=k,
        total_variance=total,
        means=means,
        scales=scales,
        matrix=mat,
        dropped=tuple(dropped),
    )


def standardized_matrix(ds: Dataset, result: PcaResult) -> np.ndarray:
    """Rows of ``ds`` centred (and scaled, in correlation mode) as in the fit; missing -> 0."""
    cols = []
    for name, mean, scale in zip(result.names, result.means, result.scales):
        z = (ds.column(name) - mean) / scale
        cols.append(np.where(np.isnan(z), 0.0, z))
    return np.column_stack(cols) if cols else np.empty((ds.n_rows, 0))


def project(ds: Dataset, result: PcaResult, k: int | None = None) -> np.ndarray:
    """Component scores, shape ``(n_rows, k)``: each standardized row times the top-k eigenvectors."""
    k = result.k_for_threshold if k is None else int(k)
    if not 1 <= k <= result.n_components:
        raise ValueError(f"k must lie in [1, {result.n_components}]")
    return standardized_matrix(ds, result) @ result.eigenvectors[:, :k]
