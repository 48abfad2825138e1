"""Synthetic datasets with planted relevant/redundant/irrelevant attributes.

Randomness comes from numpy's ``SeedSequence``: the spec seed is spawned
into one child stream for the target and one per attribute (plus one per
attribute for missing-cell strikes), so each column depends only on the
seed and its position and columns could be generated in any order.

A relevant attribute with target correlation ``rho`` is the mixture
``w * target + (1 - w) * noise`` of two unit-variance independent
Gaussians.  Its population correlation with the target is
``w / sqrt(w**2 + (1 - w)**2 * var_noise)``; solving for ``w`` gives
``w = a / (1 + a)`` with ``a = rho * sqrt(var_noise) / sqrt(1 - rho**2)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .correlate import CorrelationStructure
from .dataset import Attribute, Dataset
from .errors import SchemaError

RELEVANT = "relevant"
REDUNDANT = "redundant"
IRRELEVANT = "irrelevant"
ROLES = (RELEVANT, REDUNDANT, IRRELEVANT)


@dataclass(frozen=True)
class Blueprint:
    """One planted attribute.

    ``level`` is the target correlation for relevant attributes and the
    noise scale (relative to the source's spread) for redundant ones.
    ``source`` is the index of an earlier attribute that a redundant one
    copies.  ``categories > 0`` makes the attribute nominal by quantile
    binning its latent values.
    """

    name: str
    role: str = IRRELEVANT
    level: float = 0.0
    source: int | None = None
    categories: int = 0
    missing_rate: float = 0.0


@dataclass(frozen=True)
class PlantedSpec:
    rows: int
    attributes: tuple[Blueprint, ...]
    seed: int = 0
    target_name: str = "target"

    def __post_init__(self):
        object.__setattr__(self, "attributes", tuple(self.attributes))
        if self.rows < 0:
            raise SchemaError("row count must be non-negative")
        names = [b.name for b in self.attributes] + [self.target_name]
        if len(set(names)) != len(names):
            raise SchemaError("planted attribute names must be unique and differ from the target")
        for i, b in enumerate(self.attributes):
            if b.role not in ROLES:
                raise SchemaError(f"{b.name}: unknown role {b.role!r}")
            if b.role == RELEVANT and not 0 <= b.level < 1:
                raise SchemaError(f"{b.name}: correlation level must lie in [0, 1)")
            if b.role == REDUNDANT:
                if b.source is None or not 0 <= b.source < i:
                    raise SchemaError(f"{b.name}: redundant attributes must copy an earlier attribute")
                if b.level < 0:
                    raise SchemaError(f"{b.name}: noise level must be non-negative")
            if not 0 <= b.missing_rate < 1:
                raise SchemaError(f"{b.name}: missing rate must lie in [0, 1)")
            if b.categories < 0 or b.categories == 1:
                raise SchemaError(f"{b.name}: nominal attributes need at least two categories")

    @classmethod
    def from_dict(cls, doc: dict) -> "PlantedSpec":
        attrs = []
        names = [a["name"] for a in doc.get("attributes", [])]
        for a in doc.get("attributes", []):
            a = dict(a)
            src = a.get("source")
            if isinstance(src, str):
                if src not in names:
                    raise SchemaError(f"{a['name']}: unknown source attribute {src!r}")
                a["source"] = names.index(src)
            attrs.append(Blueprint(**a))
        return cls(
            rows=int(doc["rows"]),
            attributes=tuple(attrs),
            seed=int(doc.get("seed", 0)),
            target_name=doc.get("target", "target"),
        )

    @classmethod
    def from_json(cls, text: str) -> "PlantedSpec":
        return cls.from_dict(json.loads(text))


def mixing_weight(rho: float, noise_var: float = 1.0) -> float:
    """Weight ``w`` such that ``w*t + (1-w)*e`` correlates ``rho`` with unit-variance ``t``."""
    if rho == 0:
        return 0.0
    a = rho * math.sqrt(noise_var) / math.sqrt(1.0 - rho * rho)
    return a / (1.0 + a)


def _quantile_bins(latent: np.ndarray, k: int) -> np.ndarray:
    edges = np.quantile(latent, np.arange(1, k) / k)
    return np.searchsorted(edges, latent, side="right").astype(np.int64)


def generate(spec: PlantedSpec) -> Dataset:
    """Materialize ``spec`` as a Dataset whose last attribute is the numeric target."""
    n = spec.rows
    m = len(spec.attributes)
    children = np.random.SeedSequence(spec.seed).spawn(2 * m + 1)
    target = np.random.default_rng(children[0]).standard_normal(n)

    latents: list[np.ndarray] = []
    attributes: list[Attribute] = []
    columns: list[np.ndarray] = []
    for i, bp in enumerate(spec.attributes):
        rng = np.random.default_rng(children[1 + i])
        noise = rng.standard_normal(n)
        if bp.role == RELEVANT:
            w = mixing_weight(bp.level)
            latent = w * target + (1.0 - w) * noise
        elif bp.role == REDUNDANT:
            src = latents[bp.source]
            spread = float(np.std(src)) if n else 0.0
            latent = src + bp.level * spread * noise
        else:
            latent = noise
        latents.append(latent)

        miss = np.random.default_rng(children[1 + m + i]).random(n) < bp.missing_rate
        if bp.categories:
            codes = _quantile_bins(latent, bp.categories) if n else np.zeros(0, np.int64)
            codes[miss] = -1
            attributes.append(Attribute.nominal(bp.name, (f"c{j}" for j in range(bp.categories))))
            columns.append(codes)
        else:
            col = latent.copy()
            col[miss] = np.nan
            attributes.append(Attribute.numeric(bp.name))
            columns.append(col)

    attributes.append(Attribute.numeric(spec.target_name))
    columns.append(target)
    return Dataset(tuple(attributes), tuple(columns), relation=f"planted_{spec.seed}", target=m)


def planted_recovery_spec(
    seed: int,
    rows: int = 20_000,
    relevant: Sequence[float] = (0.7, 0.65, 0.6),
    redundant_noise: float = 0.5,
    n_redundant: int = 2,
    n_irrelevant: int = 3,
) -> PlantedSpec:
    """Relevant attributes, noisy copies of the first few, then independent noise columns."""
    bps = [Blueprint(f"rel{i}", RELEVANT, level) for i, level in enumerate(relevant)]
    bps += [Blueprint(f"red{j}", REDUNDANT, redundant_noise, source=j) for j in range(n_redundant)]
    bps += [Blueprint(f"irr{j}", IRRELEVANT) for j in range(n_irrelevant)]
    return PlantedSpec(rows, tuple(bps), seed)


def scale_spec(rows: int = 519_000, seed: int = 2024, missing_rate: float = 0.01) -> PlantedSpec:
    """24 predictors (2 nominal) plus target, shaped like a full-size drought table."""
    bps = [
        Blueprint("eco", RELEVANT, 0.4, categories=54, missing_rate=missing_rate),
        Blueprint("landcover", RELEVANT, 0.3, categories=18, missing_rate=missing_rate),
    ]
    for i in range(10):
        bps.append(Blueprint(f"rel{i}", RELEVANT, 0.1 + 0.07 * i, missing_rate=missing_rate))
    for j in range(6):
        bps.append(Blueprint(f"red{j}", REDUNDANT, 0.2 + 0.1 * j, source=2 + j, missing_rate=missing_rate))
    for j in range(6):
        bps.append(Blueprint(f"irr{j}", IRRELEVANT, missing_rate=missing_rate))
    return PlantedSpec(rows, tuple(bps), seed, target_name="SSG")


def random_structure(n: int, rng: np.random.Generator, factors: int = 3) -> CorrelationStructure:
    """Random valid correlation structure over ``n`` attributes plus a target.

    Drawn from a factor model so the joint (n+1)x(n+1) matrix is positive
    semi-definite with unit diagonal, then split into attribute and target
    parts.
    """
    loadings = rng.normal(size=(n + 1, factors))
    unique = rng.uniform(0.2, 1.5, size=n + 1)
    cov = loadings @ loadings.T + np.diag(unique)
    sd = np.sqrt(np.diag(cov))
    full = cov / np.outer(sd, sd)
    full = (full + full.T) / 2.0
    np.fill_diagonal(full, 1.0)
    names = tuple(f"a{i}" for i in range(n))
    return CorrelationStructure(names, "target", full[:n, :n], full[:n, n])
