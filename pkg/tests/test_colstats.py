import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from attrsel import Attribute, Dataset, EmptyAnalysisError, SchemaError
from attrsel.colstats import (
    MissingPolicy,
    RunningStats,
    Standardization,
    apply_missing_policy,
    standardize,
    summarize,
)

nan = float("nan")


def test_constant_column():
    s = summarize([1, 1, 1])
    assert (s.mean, s.sigma) == (1.0, 0.0)
    assert s.degenerate


def test_population_sigma():
    s = summarize([1, 2, 3])
    assert s.mean == 2.0
    assert s.sigma == pytest.approx(0.816497, abs=1e-6)
    assert s.sigma == pytest.approx(math.sqrt(2 / 3), rel=1e-15)


def test_missing_cells_excluded():
    s = summarize([1, nan, 3])
    assert s.present_count == 2
    assert s.mean == 2.0


def test_all_missing_and_empty():
    for col in ([nan, nan], []):
        s = summarize(col)
        assert s.all_missing and s.present_count == 0
        assert s.mean == 0.0 and s.sigma == 0.0


def test_zscore_values():
    z, degenerate = standardize([1, 2, 3], Standardization.ZSCORE)
    assert not degenerate
    np.testing.assert_allclose(z, [-1.224745, 0, 1.224745], atol=1e-6)


def test_zscore_degenerate():
    z, degenerate = standardize([4, 4, nan], "zscore")
    assert degenerate
    assert z[0] == 0 and z[1] == 0 and math.isnan(z[2])


def test_mean_center_keeps_missing():
    out, _ = standardize([1, nan, 3], "center")
    assert out[0] == -1 and out[2] == 1 and math.isnan(out[1])


finite = st.floats(-1e6, 1e6, allow_nan=False)


@settings(max_examples=200, deadline=None)
@given(hnp.arrays(np.float64, st.integers(2, 60), elements=finite))
def test_zscore_is_standard(col):
    s = summarize(col)
    assume(s.sigma > 1e-6 * max(1.0, abs(s.mean)))
    z, degenerate = standardize(col, "zscore")
    assert not degenerate
    zs = summarize(z)
    assert abs(zs.mean) <= 1e-12
    assert abs(zs.sigma - 1) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(hnp.arrays(np.float64, st.integers(1, 40), elements=finite), st.randoms())
def test_summary_permutation_invariant(col, rnd):
    perm = list(range(col.size))
    rnd.shuffle(perm)
    a, b = summarize(col), summarize(col[perm])
    assert a.present_count == b.present_count
    assert a.mean == pytest.approx(b.mean, rel=1e-12, abs=1e-9)
    assert a.sigma == pytest.approx(b.sigma, rel=1e-9, abs=1e-9)


def test_streaming_matches_two_pass_on_offset_data(rng):
    # 1e6 + small noise: the naive sum-of-squares formula loses everything here
    col = 1e6 + rng.normal(0, 1e-3, size=100_000)
    two_pass = summarize(col)
    rs = RunningStats()
    for chunk in np.array_split(col, 37):
        rs.update(chunk)
    streamed = rs.summary()
    assert streamed.mean == pytest.approx(two_pass.mean, rel=1e-10)
    assert streamed.sigma == pytest.approx(two_pass.sigma, rel=1e-10)
    # independent check with exactly rounded sums
    exact_mean = math.fsum(col.tolist()) / col.size
    exact_sigma = math.sqrt(math.fsum(((col - exact_mean) ** 2).tolist()) / col.size)
    assert two_pass.sigma == pytest.approx(exact_sigma, rel=1e-10)


def test_streaming_scalar_pushes():
    rs = RunningStats()
    for v in [1.0, nan, 2.0, 3.0]:
        rs.push(v)
    s = rs.summary()
    assert s.present_count == 3 and s.mean == 2.0
    assert s.sigma == pytest.approx(math.sqrt(2 / 3))


def _pair_ds():
    return Dataset(
        (Attribute.numeric("x"), Attribute.numeric("y")),
        ([1.0, 2.0, 3.0], [1.0, nan, 3.0]),
    )


def test_drop_incomplete_rows():
    out = apply_missing_policy(_pair_ds(), MissingPolicy.DROP)
    assert out.column("x").tolist() == [1, 3]
    assert out.column("y").tolist() == [1, 3]


def test_mean_impute():
    out = apply_missing_policy(_pair_ds(), "impute")
    assert out.column("y").tolist() == [1.0, 2.0, 3.0]


def test_pairwise_is_identity():
    ds = _pair_ds()
    assert apply_missing_policy(ds, "pairwise") is ds


def test_nominal_impute_uses_lowest_modal_code():
    ds = Dataset((Attribute.nominal("c", ["a", "b", "c"]),), ([2, 1, -1, 1, 2],))
    out = apply_missing_policy(ds, "impute")
    assert out.column("c").tolist() == [2, 1, 1, 1, 2]


def test_policy_errors():
    ds = Dataset((Attribute.numeric("x"), Attribute.numeric("y")), ([1.0, nan], [nan, 2.0]))
    with pytest.raises(EmptyAnalysisError):
        apply_missing_policy(ds, "drop")
    dead = Dataset((Attribute.numeric("x"),), ([nan, nan],))
    with pytest.raises(SchemaError):
        apply_missing_policy(dead, "impute")


@settings(max_examples=100, deadline=None)
@given(hnp.arrays(np.float64, st.integers(2, 50), elements=finite), st.data())
def test_impute_preserves_mean(col, data):
    mask = data.draw(hnp.arrays(bool, col.shape))
    assume(not mask.all())
    col = np.where(mask, nan, col)
    ds = Dataset((Attribute.numeric("x"),), (col,))
    before = summarize(col).mean
    after = summarize(apply_missing_policy(ds, "impute").column("x")).mean
    # scaled to the data: an absolute 1e-12 is below double resolution at |x| ~ 1e6
    scale = max(1.0, float(np.nanmax(np.abs(col))))
    assert after == pytest.approx(before, rel=1e-12, abs=1e-12 * scale)
