import datetime as dt

import numpy as np
import polars as pl
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import days_oracle, shared_oracle, tuple_set, users_oracle
from placeconn import presence_to_days, shared_users, unique_users
from placeconn.ingest import presence_frame
from placeconn.presence import count_group_pairs
from placeconn.synth import random_presence

D0 = dt.date(2019, 1, 1)


def frame(rows):
    return presence_frame([(p, u, D0 + dt.timedelta(days=d)) for p, u, d in rows])


def as_dict(df, key_cols, val_col):
    return {tuple(r[:-1]) if len(key_cols) > 1 else r[0]: r[-1] for r in df.select(*key_cols, val_col).iter_rows()}


def test_two_day_count_and_empty():
    out = presence_to_days(frame([("A", "u", 0), ("A", "u", 1)]))
    assert out.rows() == [("A", "u", 2)]
    empty = presence_frame([])
    assert presence_to_days(empty).height == 0
    assert unique_users(empty).height == 0
    assert shared_users(empty).height == 0


def test_unique_users_small_cases():
    assert unique_users(frame([("A", "u", d) for d in range(5)])).rows() == [("A", 1)]
    rows = [(p, u, 0) for p in "AB" for u in ("x", "y", "z")]
    assert unique_users(frame(rows)).rows() == [("A", 3), ("B", 3)]


def test_shared_users_small_cases():
    df = frame([("A", "u1", 0), ("A", "u2", 0), ("B", "u2", 3), ("B", "u3", 0)])
    assert shared_users(df).rows() == [("A", "B", 1)]
    disjoint = frame([("A", "u1", 0), ("B", "u2", 0)])
    assert shared_users(disjoint).height == 0


@pytest.mark.parametrize("seed", range(5))
def test_aggregates_match_oracles(seed):
    rng = np.random.default_rng(seed)
    df = random_presence(rng, n_places=20, n_users=1000, n_days=90).unique()
    tuples = tuple_set(df)
    assert as_dict(presence_to_days(df), ["place", "user"], "days") == days_oracle(tuples)
    assert as_dict(unique_users(df), ["place"], "users") == users_oracle(tuples)
    assert as_dict(shared_users(df), ["place_i", "place_j"], "shared") == shared_oracle(tuples)


def test_outputs_sorted_and_canonical():
    df = random_presence(np.random.default_rng(1), n_places=12, n_users=300).unique()
    s = shared_users(df)
    assert (s["place_i"] < s["place_j"]).all()
    assert s.equals(s.sort("place_i", "place_j"))
    d = presence_to_days(df)
    assert d.equals(d.sort("place", "user"))


def test_permutation_and_duplicates_do_not_matter():
    df = random_presence(np.random.default_rng(2), n_places=15, n_users=500)
    ref = shared_users(df.unique())
    shuffled = df.sample(fraction=1.0, shuffle=True, seed=4)
    doubled = pl.concat([shuffled, shuffled])
    assert shared_users(doubled).equals(ref)
    assert unique_users(doubled).equals(unique_users(df))
    assert presence_to_days(doubled).equals(presence_to_days(df))


def test_threads_and_batches_give_identical_counts():
    df = random_presence(np.random.default_rng(3), n_places=20, n_users=1000)
    ref = shared_users(df, threads=1)
    assert shared_users(df, threads=4).equals(ref)
    assert shared_users(df, threads=3, pair_budget=97).equals(ref)


def test_sparse_path_with_spill_is_exact(tmp_path, monkeypatch):
    import placeconn.presence as pres

    df = random_presence(np.random.default_rng(4), n_places=20, n_users=1000, mean_visits=10)
    ref = shared_users(df)
    monkeypatch.setattr(pres, "DENSE_LIMIT", 0)  # force the sorted-run accumulator
    spilled = []
    real_spill = pres._SparseAccumulator._spill

    def spy(self, k, c):
        spilled.append(k.size)
        real_spill(self, k, c)

    monkeypatch.setattr(pres._SparseAccumulator, "_spill", spy)
    got = shared_users(df, threads=2, spill_threshold=50, pair_budget=200, spill_dir=str(tmp_path))
    assert spilled, "spill path was not exercised"
    assert got.equals(ref)
    assert not any(tmp_path.iterdir())  # runs cleaned up


def test_pair_emission_per_user():
    # a user in k places contributes to exactly k(k-1)/2 pairs
    rng = np.random.default_rng(5)
    pidx, gid = [], []
    ks = rng.integers(1, 9, 200)
    for g, k in enumerate(ks):
        pidx.extend(sorted(rng.choice(30, k, replace=False)))
        gid.extend([g] * k)
    i, j, c = count_group_pairs(np.array(pidx), np.array(gid), 30)
    assert c.sum() == sum(k * (k - 1) // 2 for k in ks)
    assert np.all(i < j)


rows_strategy = st.lists(
    st.tuples(st.sampled_from("ABCDE"), st.sampled_from(["u1", "u2", "u3", "u4"]), st.integers(0, 5)),
    max_size=40,
)


@settings(max_examples=60, deadline=None)
@given(rows_strategy)
def test_shared_bounded_by_populations(rows):
    df = frame(rows)
    users = dict(unique_users(df).iter_rows())
    for a, b, s in shared_users(df).iter_rows():
        assert 1 <= s <= min(users[a], users[b])
    assert sum(users.values()) >= len({u for _, u, _ in rows})


@settings(max_examples=60, deadline=None)
@given(rows_strategy)
def test_aggregations_idempotent(rows):
    df = frame(rows)
    once = shared_users(df)
    assert shared_users(pl.concat([df, df])).equals(once)
    days = presence_to_days(df)
    assert (days["days"] >= 1).all() and (days["days"] <= 6).all()
