import json

import numpy as np
import pytest

from attrsel import SchemaError
from attrsel.cfs import greedy_stepwise
from attrsel.colstats import summarize
from attrsel.correlate import correlation_structure, pearson
from attrsel.dataset import parse_arff, to_arff, validate_target
from attrsel.synth import (
    IRRELEVANT,
    REDUNDANT,
    RELEVANT,
    Blueprint,
    PlantedSpec,
    generate,
    mixing_weight,
    planted_recovery_spec,
    random_structure,
    scale_spec,
)


def test_relevant_and_irrelevant_levels():
    spec = PlantedSpec(10_000, (Blueprint("r", RELEVANT, 0.9), Blueprint("z", IRRELEVANT)), seed=7)
    ds = generate(spec)
    y = ds.column("target")
    assert 0.85 <= abs(pearson(ds.column("r"), y)) <= 0.95
    assert abs(pearson(ds.column("z"), y)) < 0.05


@pytest.mark.parametrize("rho", [0.1, 0.35, 0.6, 0.85])
def test_mixing_weight_population_correlation(rho):
    w = mixing_weight(rho)
    assert w / np.sqrt(w**2 + (1 - w) ** 2) == pytest.approx(rho, abs=1e-12)
    w4 = mixing_weight(rho, 4.0)
    assert w4 / np.sqrt(w4**2 + 4.0 * (1 - w4) ** 2) == pytest.approx(rho, abs=1e-12)


def test_redundant_copy_tracks_source():
    spec = PlantedSpec(
        20_000,
        (Blueprint("r", RELEVANT, 0.6), Blueprint("c", REDUNDANT, 0.5, source=0)),
        seed=3,
    )
    ds = generate(spec)
    # source + 0.5 sd noise: correlation 1/sqrt(1.25)
    assert pearson(ds.column("r"), ds.column("c")) == pytest.approx(1 / np.sqrt(1.25), abs=0.01)


def test_no_missing_at_rate_zero():
    ds = generate(planted_recovery_spec(1, rows=500))
    assert all(ds.missing(i).sum() == 0 for i in range(ds.n_attributes))


def test_missing_rate_is_respected():
    spec = PlantedSpec(20_000, (Blueprint("a", IRRELEVANT, missing_rate=0.2), Blueprint("b", IRRELEVANT, categories=4, missing_rate=0.05)))
    ds = generate(spec)
    assert ds.missing("a").mean() == pytest.approx(0.2, abs=0.01)
    assert ds.missing("b").mean() == pytest.approx(0.05, abs=0.01)
    assert ds.missing("target").sum() == 0


def test_same_seed_same_dataset():
    spec = scale_spec(rows=2000, seed=11)
    assert generate(spec) == generate(spec)
    assert not generate(spec) == generate(scale_spec(rows=2000, seed=12))


def test_column_depends_only_on_seed_and_position():
    a = generate(PlantedSpec(300, (Blueprint("x"), Blueprint("y")), seed=5))
    b = generate(PlantedSpec(300, (Blueprint("x"), Blueprint("y"), Blueprint("z", RELEVANT, 0.3)), seed=5))
    assert np.array_equal(a.column("x"), b.column("x"))
    assert np.array_equal(a.column("target"), b.column("target"))


def test_nominal_quantile_bins_are_balanced():
    ds = generate(PlantedSpec(9000, (Blueprint("n", RELEVANT, 0.5, categories=3),), seed=2))
    counts = np.bincount(ds.column("n"), minlength=3)
    assert counts.tolist() == [3000, 3000, 3000]
    assert ds.attributes[0].categories == ("c0", "c1", "c2")


def test_output_shape_and_round_trip():
    ds = generate(scale_spec(rows=300))
    assert ds.n_attributes == 25 and ds.target_name == "SSG" and ds.target == 24
    assert sum(a.is_nominal for a in ds.attributes) == 2
    assert validate_target(parse_arff(to_arff(ds)), "SSG") == ds


def test_spec_from_json():
    doc = {
        "rows": 50,
        "seed": 9,
        "target": "y",
        "attributes": [
            {"name": "a", "role": "relevant", "level": 0.5},
            {"name": "b", "role": "redundant", "level": 0.1, "source": "a"},
            {"name": "c", "role": "irrelevant", "categories": 5, "missing_rate": 0.1},
        ],
    }
    spec = PlantedSpec.from_json(json.dumps(doc))
    assert spec.attributes[1].source == 0 and spec.target_name == "y"
    assert generate(spec).names[-1] == "y"


@pytest.mark.parametrize(
    "attrs",
    [
        (Blueprint("a", RELEVANT, 1.0),),
        (Blueprint("a", RELEVANT, -0.1),),
        (Blueprint("a", REDUNDANT, 0.1, source=0),),
        (Blueprint("a"), Blueprint("b", REDUNDANT, -1.0, source=0)),
        (Blueprint("a", "weird"),),
        (Blueprint("a", categories=1),),
        (Blueprint("a", missing_rate=1.0),),
        (Blueprint("target"),),
        (Blueprint("a"), Blueprint("a")),
    ],
)
def test_invalid_specs(attrs):
    with pytest.raises(SchemaError):
        PlantedSpec(10, attrs)


def test_unknown_source_name():
    with pytest.raises(SchemaError):
        PlantedSpec.from_dict({"rows": 1, "attributes": [{"name": "b", "role": "redundant", "source": "zz"}]})


def test_random_structure_is_a_valid_correlation_matrix(rng):
    cs = random_structure(10, rng)
    names, full = cs.full_matrix()
    assert np.allclose(np.diag(full), 1.0)
    assert np.linalg.eigvalsh(full).min() > 0


def _recovery(seed):
    ds = generate(planted_recovery_spec(seed))
    cs = correlation_structure(ds)
    sel = [cs.names[a] for a in greedy_stepwise(cs, "select").selected]
    order = [cs.names[a] for a, _ in greedy_stepwise(cs, "rank").trace]
    relevant = [n for n in cs.names if n.startswith("rel")]
    irrelevant = [n for n in cs.names if n.startswith("irr")]
    before = max(order.index(n) for n in relevant) < min(order.index(n) for n in irrelevant)
    before = before and set(relevant) <= set(sel)
    clean = not any(n.startswith("red") for n in sel)
    return before, clean


def test_planted_recovery_small_batch():
    results = [_recovery(s) for s in range(10)]
    assert sum(b for b, _ in results) >= 9
    assert sum(c for _, c in results) >= 9


def test_scale_spec_summaries():
    ds = generate(scale_spec(rows=5000))
    s = summarize(ds.column("rel0"))
    assert s.present_count == pytest.approx(4950, abs=30)
