"""Correlation-based subset merit and the searches that maximise it.

The merit of a subset of ``k`` attributes is::

    k * mean|r_cf| / sqrt(k + k (k - 1) * mean|r_ff|)

where ``r_cf`` are attribute-target correlations and ``r_ff`` the pairwise
attribute-attribute correlations inside the subset.  Magnitudes are used
throughout so the square root stays real and merits stay non-negative.

All sums go through :func:`math.fsum`, which makes a merit independent of
the order in which subset members are listed; greedy steps and the
exhaustive oracle therefore agree bit-for-bit on identical subsets.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .correlate import CorrelationStructure
from .errors import EmptyAnalysisError, SchemaError

IMPROVEMENT_TOL = 1e-12
DEFAULT_MERIT_THRESHOLD = 0.5
EXHAUSTIVE_LIMIT = 20


class Mode(str, enum.Enum):
    SELECT = "select"
    RANK = "rank"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class MeritEvaluation:
    subset: tuple[int, ...]
    r_cf_bar: float
    r_ff_bar: float
    merit: float

    @property
    def k(self) -> int:
        return len(self.subset)


def merit_value(k: int, r_cf_bar: float, r_ff_bar: float) -> float:
    """Merit of a ``k``-attribute subset from its mean correlation magnitudes.

    >>> merit_value(1, 0.6, 0.0)
    0.6
    """
    if k < 1:
        raise ValueError("subset must be non-empty")
    return k * r_cf_bar / math.sqrt(k + k * (k - 1) * r_ff_bar)


def merit(subset: Sequence[int], corr: CorrelationStructure) -> MeritEvaluation:
    """Evaluate a subset of ``corr``'s attributes (given as indices)."""
    members = tuple(sorted(int(i) for i in subset))
    k = len(members)
    if k == 0:
        raise EmptyAnalysisError("cannot evaluate the merit of an empty subset")
    if len(set(members)) != k:
        raise SchemaError("subset has repeated attributes")
    if members[0] < 0 or members[-1] >= corr.size:
        raise SchemaError("subset index out of range")
    tc = corr.target_corr
    m = corr.matrix
    r_cf = math.fsum(abs(tc[i]) for i in members) / k
    if k == 1:
        r_ff = 0.0
    else:
        pairs = k * (k - 1) // 2
        r_ff = math.fsum(abs(m[i, j]) for i, j in itertools.combinations(members, 2)) / pairs
    return MeritEvaluation(members, r_cf, r_ff, merit_value(k, r_cf, r_ff))


@dataclass(frozen=True)
class RankedAttribute:
    index: int
    name: str
    rank: int
    merit: float  # merit of the subset formed by this attribute and all better-ranked ones
    abs_r_cf: float
    selected: bool
    above_threshold: bool


@dataclass(frozen=True)
class SelectionReport:
    """Outcome of a greedy stepwise search.

    ``trace`` holds ``(attribute index, merit)`` pairs.  In select mode these
    are the committed steps (additions going forward, removals going
    backward), so merits strictly increase.  In rank mode the trace is the
    full ranking with, for each attribute, the merit of the subset made of it
    and every better-ranked attribute.

    ``ranking`` always orders attributes best-first; in select mode it only
    contains the selected ones.
    """

    mode: Mode
    direction: Direction
    names: tuple[str, ...]
    trace: tuple[tuple[int, float], ...]
    selected: tuple[int, ...]
    ranking: tuple[RankedAttribute, ...]
    merit: float
    merit_threshold: float

    @property
    def threshold_flags(self) -> tuple[bool, ...]:
        return tuple(r.above_threshold for r in self.ranking)


def _best_candidate(base: list[int], candidates: list[int], corr, adding: bool):
    """Candidate whose addition/removal gives the highest merit; lowest index on ties."""
    best_attr, best_val = None, -math.inf
    for a in candidates:
        subset = base + [a] if adding else [b for b in base if b != a]
        val = merit(subset, corr).merit
        if val > best_val:
            best_attr, best_val = a, val
    return best_attr, best_val


def _forward_path(corr: CorrelationStructure, stop_early: bool):
    """Greedy additions; returns (order, merits, select_size)."""
    n = corr.size
    chosen: list[int] = []
    merits: list[float] = []
    remaining = list(range(n))
    best = -math.inf
    select_size = None
    while remaining:
        attr, val = _best_candidate(chosen, remaining, corr, adding=True)
        if select_size is None and not val > best + IMPROVEMENT_TOL:
            select_size = len(chosen)
            if stop_early:
                break
        chosen.append(attr)
        merits.append(val)
        remaining.remove(attr)
        if select_size is None:
            best = val
    if select_size is None:
        select_size = len(chosen)
    return chosen, merits, select_size


def _backward_path(corr: CorrelationStructure):
    """Greedy removals down to one attribute; returns (removed, merits, full merit, select_size)."""
    current = list(range(corr.size))
    removed: list[int] = []
    merits: list[float] = []
    best = merit(current, corr).merit
    full = best
    select_size = None
    while len(current) > 1:
        attr, val = _best_candidate(current, current, corr, adding=False)
        if select_size is None and not val > best + IMPROVEMENT_TOL:
            select_size = len(current)
        current.remove(attr)
        removed.append(attr)
        merits.append(val)
        if select_size is None:
            best = val
    if select_size is None:
        select_size = 1
    removed.append(current[0])  # the survivor, ranked first once reversed
    return removed, merits, full, select_size


def greedy_stepwise(
    corr: CorrelationStructure,
    mode: Mode | str = Mode.SELECT,
    direction: Direction | str = Direction.FORWARD,
    merit_threshold: float = DEFAULT_MERIT_THRESHOLD,
) -> SelectionReport:
    """Hill-climb over subsets, adding (forward) or removing (backward) one attribute per step.

    Select mode stops as soon as no single step raises the merit by more
    than ``IMPROVEMENT_TOL``; rank mode keeps going until every attribute is
    placed.  The first forward step is always taken, so a selection is never
    empty.
    """
    mode, direction = Mode(mode), Direction(direction)
    n = corr.size
    if n == 0:
        raise EmptyAnalysisError("no attributes to search over")

    if direction is Direction.FORWARD:
        order, prefix_merits, select_size = _forward_path(corr, stop_early=mode is Mode.SELECT)
        steps = list(zip(order[:select_size], prefix_merits[:select_size]))
    else:
        removed, step_merits, full, select_size = _backward_path(corr)
        order = removed[::-1]
        # top-i ranked attributes are exactly the survivors after n-i removals
        prefix_merits = step_merits[::-1] + [full]
        n_steps = n - select_size
        steps = list(zip(removed[:n_steps], step_merits[:n_steps]))

    selected_set = set(order[:select_size])
    ranking = []
    for pos, attr in enumerate(order):
        if mode is Mode.SELECT and attr not in selected_set:
            continue
        ranking.append(
            RankedAttribute(
                index=attr,
                name=corr.names[attr],
                rank=pos + 1,
                merit=prefix_merits[pos],
                abs_r_cf=abs(float(corr.target_corr[attr])),
                selected=attr in selected_set,
                above_threshold=prefix_merits[pos] > merit_threshold,
            )
        )

    if mode is Mode.SELECT:
        trace = tuple(steps)
        selected = tuple(order[:select_size])
        final = prefix_merits[select_size - 1]
    else:
        trace = tuple(zip(order, prefix_merits))
        selected = tuple(order)
        final = prefix_merits[-1]
    return SelectionReport(
        mode=mode,
        direction=direction,
        names=corr.names,
        trace=trace,
        selected=selected,
        ranking=tuple(ranking),
        merit=final,
        merit_threshold=merit_threshold,
    )


def exhaustive_best_subset(
    corr: CorrelationStructure, max_attrs: int = EXHAUSTIVE_LIMIT
) -> MeritEvaluation:
    """Best subset over all ``2**n - 1`` non-empty subsets.

    A vectorised pass screens every subset; the survivors within a small
    margin of the maximum are re-scored with :func:`merit` and the exact
    maximum wins, ties going to the lexicographically smallest subset.
    """
    n = corr.size
    if max_attrs > EXHAUSTIVE_LIMIT:
        raise ValueError(f"max_attrs is capped at {EXHAUSTIVE_LIMIT}")
    if n > max_attrs:
        raise SchemaError(f"{n} attributes exceed the exhaustive-search bound of {max_attrs}")
    if n == 0:
        raise EmptyAnalysisError("no attributes to search over")

    rcf = np.abs(corr.target_corr)
    rff = np.abs(corr.matrix).copy()
    np.fill_diagonal(rff, 0.0)
    bits = 1 << np.arange(n, dtype=np.int64)
    total = (1 << n) - 1
    chunk = 1 << 15
    screened: list[np.ndarray] = []
    screened_vals: list[np.ndarray] = []
    best_val = -math.inf
    for start in range(1, total + 1, chunk):
        masks = np.arange(start, min(start + chunk, total + 1), dtype=np.int64)
        member = ((masks[:, None] & bits) != 0).astype(np.float64)
        k = member.sum(axis=1)
        sum_cf = member @ rcf
        sum_ff = np.einsum("ij,ij->i", member @ rff, member) / 2.0
        vals = sum_cf / np.sqrt(k + 2.0 * sum_ff)
        best_val = max(best_val, float(vals.max()))
        keep = vals >= best_val - 1e-9
        screened.append(masks[keep])
        screened_vals.append(vals[keep])

    candidates = np.concatenate(screened)[np.concatenate(screened_vals) >= best_val - 1e-9]
    best: MeritEvaluation | None = None
    for mask in candidates.tolist():
        subset = tuple(i for i in range(n) if mask >> i & 1)
        ev = merit(subset, corr)
        if best is None or ev.merit > best.merit or (ev.merit == best.merit and subset < best.subset):
            best = ev
    return best
