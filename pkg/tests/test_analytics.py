import math

import numpy as np
import polars as pl
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from oracles import normal_equations, pearson_textbook
from placeconn import (
    DataError,
    Place,
    PlaceLevel,
    PlaceRegistry,
    decay_fit,
    log10_scaled,
    ols,
    pearson_r,
    per_place_correlation,
    same_region_dummy,
)


def test_log10_scaled():
    assert log10_scaled([0.158], 1000)[0] == pytest.approx(math.log10(158), abs=1e-12)
    assert log10_scaled([0.158], 1000)[0] == pytest.approx(2.1987, abs=5e-5)
    assert log10_scaled([1.0], 1)[0] == 0.0
    with pytest.raises(ValueError):
        log10_scaled([0.0], 1000)
    with pytest.raises(ValueError):
        log10_scaled([1.0], 0)


def test_pearson_basic():
    x = np.arange(10.0)
    assert pearson_r(x, 2 * x + 1) == 1.0
    assert pearson_r(x, -x) == -1.0
    with pytest.raises(ValueError):
        pearson_r(x, np.ones(10))
    with pytest.raises(ValueError):
        pearson_r([1, 2], [3, 4])


def test_pearson_matches_textbook():
    rng = np.random.default_rng(0)
    x = rng.normal(size=50)
    y = 0.3 * x + rng.normal(size=50)
    assert abs(pearson_r(x, y) - pearson_textbook(list(x), list(y))) < 1e-12


vec = st.lists(st.floats(-1e3, 1e3), min_size=5, max_size=40)


@settings(max_examples=200)
@given(vec, st.floats(0.01, 100), st.floats(-1e3, 1e3), st.integers(0, 2**31))
def test_pearson_affine_invariant(x, a, b, seed):
    x = np.array(x)
    y = np.random.default_rng(seed).normal(size=x.size) + 0.5 * x
    assume(np.ptp(x) > 1e-3)
    r = pearson_r(x, y)
    assert abs(pearson_r(a * x + b, y) - r) < 1e-12
    assert abs(pearson_r(x, a * y + b) - r) < 1e-12


def test_ols_exact_fit():
    x = np.arange(12.0)
    res = ols(3 + 2 * x, x, names=["x"])
    assert res["Intercept"]["coef"] == pytest.approx(3, abs=1e-12)
    assert res["x"]["coef"] == pytest.approx(2, abs=1e-12)
    assert res.adj_r2 == pytest.approx(1.0, abs=1e-12)
    assert np.all(res.se < 1e-12)


def test_ols_matches_normal_equations_single_predictor():
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 10, 20)
    y = 1.5 - 0.7 * x + rng.normal(size=20)
    res = ols(y, x)
    # closed form for one predictor
    sxy = ((x - x.mean()) * (y - y.mean())).sum()
    sxx = ((x - x.mean()) ** 2).sum()
    slope = sxy / sxx
    assert res.coef[1] == pytest.approx(slope, abs=1e-10)
    assert res.coef[0] == pytest.approx(y.mean() - slope * x.mean(), abs=1e-10)


def test_ols_three_coefficient_report():
    rng = np.random.default_rng(2)
    n = 400
    same = rng.integers(0, 2, n).astype(float)
    dist = rng.uniform(10, 2000, n)
    y = 5 + 8 * same - 0.004 * dist + rng.normal(0, 3, n)
    X = np.column_stack([same, dist])
    res = ols(y, X, names=["same_state", "distance"])
    beta, se, r2 = normal_equations(y, np.column_stack([np.ones(n), X]))
    np.testing.assert_allclose(res.coef, beta, atol=1e-10)
    np.testing.assert_allclose(res.se, se, atol=1e-10)
    assert res.r2 == pytest.approx(r2, abs=1e-10)
    assert res.adj_r2 == pytest.approx(1 - (1 - r2) * (n - 1) / (n - 2 - 1), abs=1e-12)
    assert res.adj_r2 <= res.r2
    assert res.names == ["Intercept", "same_state", "distance"]
    text = res.table()
    assert "same_state" in text and "***" in text and "Adjusted R2" in text and "Observations" in text
    d = res.to_dict()
    assert set(d["coefficients"]) == {"Intercept", "same_state", "distance"}
    assert d["coefficients"]["same_state"]["stars"] == "***"
    # classical p-values from the t distribution
    from scipy import stats

    t = res.coef / res.se
    np.testing.assert_allclose(res.p, 2 * stats.t.sf(np.abs(t), n - 3), rtol=1e-9)
    # residuals orthogonal to every column
    Xi = np.column_stack([np.ones(n), X])
    assert np.all(np.abs(Xi.T @ res.resid) < 1e-8 * n * np.abs(Xi).max(axis=0))


def test_ols_scaling_outcome():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(50, 2))
    y = X @ [0.2, -0.1] + rng.normal(0, 0.1, 50)
    a, b = ols(y, X), ols(1000 * y, X)
    np.testing.assert_allclose(b.coef, 1000 * a.coef, rtol=1e-10)
    np.testing.assert_allclose(b.se, 1000 * a.se, rtol=1e-10)
    np.testing.assert_allclose(b.t, a.t, rtol=1e-9)
    np.testing.assert_allclose(b.p, a.p, rtol=1e-7, atol=1e-300)
    assert b.adj_r2 == pytest.approx(a.adj_r2, abs=1e-12)


def test_ols_errors():
    x = np.arange(10.0)
    with pytest.raises(ValueError, match="rank"):
        ols(x, np.column_stack([x, 2 * x]))
    with pytest.raises(ValueError, match="observations"):
        ols([1.0, 2.0], [1.0, 3.0])


def test_stars():
    from placeconn.analytics import _stars

    assert [_stars(p) for p in (0.001, 0.02, 0.07, 0.5)] == ["***", "**", "*", ""]


def test_decay_exact_and_constant():
    d = np.geomspace(5, 3000, 60)
    fit = decay_fit(2 * d ** -1.5, d)
    assert fit.exponent == pytest.approx(-1.5, abs=1e-9)
    assert fit.amplitude == pytest.approx(2.0, rel=1e-9)
    assert fit.r2 == pytest.approx(1.0, abs=1e-9)
    flat = decay_fit(np.full(60, 0.01), d)
    assert flat.exponent == pytest.approx(0.0, abs=1e-12) and flat.r2 == 0.0
    with pytest.raises(ValueError):
        decay_fit([0.1, 0.0, 0.2], [1, 2, 3])


def test_decay_with_noise():
    rng = np.random.default_rng(4)
    d = rng.uniform(10, 2000, 2000)
    pci = 0.9 * d ** -1.2 * np.exp(rng.normal(0, 0.05, d.size))
    fit = decay_fit(pci, d)
    assert -1.35 <= fit.exponent <= -1.05
    assert 0 <= fit.r2 <= 1


def pairs_df(rows, col="v"):
    return pl.DataFrame(rows, schema={"place_i": pl.Utf8, "place_j": pl.Utf8, col: pl.Float64}, orient="row")


def test_per_place_identical_and_floor():
    rng = np.random.default_rng(5)
    places = [f"p{k}" for k in range(6)]
    rows = [(a, b, rng.uniform(0.01, 1)) for i, a in enumerate(places) for b in places[i + 1:]]
    rows.append(("p6", "p0", 0.5))
    rows.append(("p6", "p1", 0.4))
    df = pairs_df(rows)
    res, omitted = per_place_correlation(df, df, "v", "v", 1000, 1000)
    assert set(res) == set(places)
    assert all(abs(r - 1.0) < 1e-12 for r, _ in res.values())
    assert "p6" in omitted and "2" in omitted["p6"]


def test_per_place_matches_direct_recompute():
    rng = np.random.default_rng(6)
    places = [f"p{k:02d}" for k in range(15)]
    rows_a, rows_b = [], []
    for i, a in enumerate(places):
        for b in places[i + 1:]:
            v = rng.lognormal()
            rows_a.append((a, b, v))
            if rng.random() < 0.9:
                rows_b.append((a, b, v * rng.lognormal(0, 0.5)))
    A, B = pairs_df(rows_a, "x"), pairs_df(rows_b, "y")
    res, _ = per_place_correlation(A, B, "x", "y", 1000, 1)
    bmap = {(a, b): v for a, b, v in rows_b}
    for f in places:
        xs, ys = [], []
        for a, b, v in rows_a:
            if f in (a, b) and (a, b) in bmap:
                xs.append(math.log10(v * 1000))
                ys.append(math.log10(bmap[(a, b)]))
        r, n = res[f]
        assert n == len(xs)
        assert abs(r - pearson_textbook(xs, ys)) < 1e-12


def test_same_region_dummy():
    reg = PlaceRegistry()
    reg.add_places([Place(c, PlaceLevel.ADMIN1, c, (0, 0)) for c in ("06", "32")])
    reg.add_places([
        Place("06001", PlaceLevel.COUNTY, "a", (0, 0), "06"),
        Place("06003", PlaceLevel.COUNTY, "b", (0, 0), "06"),
        Place("32001", PlaceLevel.COUNTY, "c", (0, 0), "32"),
        Place("99001", PlaceLevel.COUNTY, "d", (0, 0), "99"),
    ])
    assert list(same_region_dummy([("06001", "06003"), ("06001", "32001")], reg, "admin1")) == [1, 0]
    with pytest.raises(DataError):
        same_region_dummy([("06001", "99001")], reg, "admin1")


def test_same_region_dummy_random_pairs(world):
    rng = np.random.default_rng(7)
    codes = [p.code for p in world.counties]
    pairs = [tuple(rng.choice(codes, 2, replace=False)) for _ in range(100)]
    got = same_region_dummy(pairs, world.registry, "admin1")
    parent = {p.code: p.parent_code for p in world.counties}
    assert list(got) == [int(parent[a] == parent[b]) for a, b in pairs]
