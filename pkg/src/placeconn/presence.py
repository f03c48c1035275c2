"""Per-place user-day aggregates, unique-user counts and shared-user counts.

All functions take a presence table (columns ``place``, ``user``, ``date``)
and return polars DataFrames. Counting is exact.

Shared-user counting works per user: a user seen in ``k`` places adds one to
each of the ``k*(k-1)/2`` place pairs. Users are processed in batches whose
pair emissions stay under a budget; batch results are integer partial sums,
so any batching or thread schedule gives the same totals. When the number of
places is small enough the pair counts live in a dense ``P*P`` array;
otherwise each batch produces a sorted run of ``(pair key, count)`` which is
merged in memory, or spilled to disk once the runs grow past
``spill_threshold`` entries and merged back range by range.
"""
from __future__ import annotations

import logging
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import polars as pl

log = logging.getLogger(__name__)

DENSE_LIMIT = 1 << 24  # max P*P cells for the dense pair accumulator
PAIR_BUDGET = 4_000_000  # pair emissions per batch
DEFAULT_SPILL_THRESHOLD = 50_000_000


def presence_to_days(presence: pl.DataFrame) -> pl.DataFrame:
    """``place, user, days``: distinct observed dates per (place, user)."""
    return (
        presence.group_by("place", "user")
        .agg(days=pl.col("date").n_unique().cast(pl.Int64))
        .sort("place", "user")
    )


def unique_users(presence: pl.DataFrame) -> pl.DataFrame:
    """``place, users``: distinct users observed in each place."""
    return (
        presence.group_by("place")
        .agg(users=pl.col("user").n_unique().cast(pl.Int64))
        .sort("place")
    )


def _factorize(presence: pl.DataFrame, group_cols: list[str]):
    """Sorted place codes, plus per-row place index and group id.

    Rows are deduplicated on (group, place) and sorted by group then place,
    so place indices ascend within each group.
    """
    places = presence["place"].unique().sort().to_list()
    pdf = presence.select([*group_cols, "place"]).unique().sort([*group_cols, "place"])
    changed = pl.lit(False)
    for c in group_cols:
        changed = changed | (pl.col(c) != pl.col(c).shift(1)).fill_null(True)
    pdf = pdf.select(
        pidx=pl.col("place").cast(pl.Enum(places)).to_physical().cast(pl.Int64),
        gid=changed.cast(pl.Int64).cum_sum(),
    )
    return places, pdf["pidx"].to_numpy(), pdf["gid"].to_numpy()


def _group_bounds(gid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if gid.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    starts = np.flatnonzero(np.r_[True, gid[1:] != gid[:-1]])
    sizes = np.diff(np.r_[starts, gid.size])
    return starts, sizes


def _emit_pairs(pidx: np.ndarray, starts: np.ndarray, sizes: np.ndarray, n_places: int) -> np.ndarray:
    """Pair keys ``i*P + j`` (i < j) for every group; places sorted within group."""
    keys = []
    for k in np.unique(sizes):
        if k < 2:
            continue
        s = starts[sizes == k]
        block = pidx[s[:, None] + np.arange(k)[None, :]]
        iu, ju = np.triu_indices(int(k), 1)
        keys.append((block[:, iu] * n_places + block[:, ju]).ravel())
    if not keys:
        return np.zeros(0, np.int64)
    return np.concatenate(keys)


def _batches(sizes: np.ndarray, budget: int) -> list[tuple[int, int]]:
    """Split groups into contiguous ranges emitting about ``budget`` pairs each."""
    pairs = sizes * (sizes - 1) // 2
    cum = np.cumsum(pairs)
    out, lo = [], 0
    n = sizes.size
    while lo < n:
        base = cum[lo - 1] if lo else 0
        hi = int(np.searchsorted(cum, base + budget, side="right"))
        hi = max(hi, lo + 1)
        out.append((lo, min(hi, n)))
        lo = hi
    return out


def _reduce(keys: np.ndarray, counts: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Sum counts per distinct key; returns sorted keys."""
    if keys.size == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64)
    order = np.argsort(keys, kind="stable")
    k = keys[order]
    starts = np.flatnonzero(np.r_[True, k[1:] != k[:-1]])
    if counts is None:
        c = np.diff(np.r_[starts, k.size])
    else:
        c = np.add.reduceat(np.asarray(counts, dtype=np.int64)[order], starts)
    return k[starts], c.astype(np.int64)


def _bounded_map(fn, items, threads: int):
    """``map`` in submission order with at most ``2*threads`` tasks in flight."""
    if threads <= 1 or len(items) <= 1:
        for it in items:
            yield fn(it)
        return
    with ThreadPoolExecutor(threads) as pool:
        pending = []
        for it in items:
            pending.append(pool.submit(fn, it))
            if len(pending) >= 2 * threads:
                yield pending.pop(0).result()
        for fut in pending:
            yield fut.result()


class _SparseAccumulator:
    """Sorted-run accumulator for pair counts with optional disk spill."""

    def __init__(self, spill_threshold: int, spill_dir: str | None = None):
        self.spill_threshold = spill_threshold
        self.spill_dir = spill_dir
        self.runs: list[tuple[np.ndarray, np.ndarray]] = []
        self.size = 0
        self.files: list[tuple[str, str]] = []
        self._tmp = None

    def add(self, keys: np.ndarray, counts: np.ndarray) -> None:
        if keys.size == 0:
            return
        self.runs.append((keys, counts))
        self.size += keys.size
        if self.size > self.spill_threshold:
            k, c = _reduce(np.concatenate([r[0] for r in self.runs]),
                           np.concatenate([r[1] for r in self.runs]))
            self.runs = [(k, c)]
            self.size = k.size
            if self.size > self.spill_threshold:
                self._spill(k, c)

    def _spill(self, k: np.ndarray, c: np.ndarray) -> None:
        if self._tmp is None:
            self._tmp = tempfile.TemporaryDirectory(prefix="placeconn-pairs-", dir=self.spill_dir)
        n = len(self.files)
        kf = os.path.join(self._tmp.name, f"run{n}.keys.npy")
        cf = os.path.join(self._tmp.name, f"run{n}.counts.npy")
        np.save(kf, k)
        np.save(cf, c)
        self.files.append((kf, cf))
        self.runs, self.size = [], 0
        log.debug("spilled run %d (%d pairs)", n, k.size)

    def result(self) -> tuple[np.ndarray, np.ndarray]:
        if self.runs:
            k, c = _reduce(np.concatenate([r[0] for r in self.runs]),
                           np.concatenate([r[1] for r in self.runs]))
        else:
            k, c = np.zeros(0, np.int64), np.zeros(0, np.int64)
        if not self.files:
            return k, c
        if k.size:
            self._spill(k, c)
        try:
            return self._merge_files()
        finally:
            self._tmp.cleanup()
            self._tmp = None
            self.files = []

    def _merge_files(self) -> tuple[np.ndarray, np.ndarray]:
        # each run is sorted; merge key range by key range to bound memory
        runs = [(np.load(kf, mmap_mode="r"), np.load(cf, mmap_mode="r")) for kf, cf in self.files]
        total = sum(r[0].size for r in runs)
        n_ranges = max(1, int(np.ceil(total / max(self.spill_threshold, 1))))
        lo_key = min(int(r[0][0]) for r in runs)
        hi_key = max(int(r[0][-1]) for r in runs) + 1
        edges = np.unique(np.linspace(lo_key, hi_key, n_ranges + 1).astype(np.int64))
        out_k, out_c = [], []
        for a, b in zip(edges[:-1], edges[1:]):
            ks, cs = [], []
            for rk, rc in runs:
                i, j = np.searchsorted(rk, [a, b])
                if j > i:
                    ks.append(np.asarray(rk[i:j]))
                    cs.append(np.asarray(rc[i:j]))
            if ks:
                k, c = _reduce(np.concatenate(ks), np.concatenate(cs))
                out_k.append(k)
                out_c.append(c)
        del runs
        if not out_k:
            return np.zeros(0, np.int64), np.zeros(0, np.int64)
        return np.concatenate(out_k), np.concatenate(out_c)


def count_group_pairs(
    pidx: np.ndarray,
    gid: np.ndarray,
    n_places: int,
    threads: int = 1,
    spill_threshold: int = DEFAULT_SPILL_THRESHOLD,
    pair_budget: int = PAIR_BUDGET,
    spill_dir: str | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Count, for each place pair, the groups containing both places.

    ``pidx``/``gid`` must be sorted by group then place with no repeated
    (group, place). Returns ``(i, j, count)`` arrays with ``i < j``, sorted.
    """
    starts, sizes = _group_bounds(gid)
    batches = _batches(sizes, pair_budget)
    dense = n_places * n_places <= DENSE_LIMIT

    if dense:
        # one private accumulator per worker; integer sums merge exactly
        n_workers = max(1, min(threads, len(batches)))
        shares = [batches[w::n_workers] for w in range(n_workers)]

        def work_dense(share):
            acc = np.zeros(n_places * n_places, dtype=np.int64)
            for lo, hi in share:
                keys = _emit_pairs(pidx, starts[lo:hi], sizes[lo:hi], n_places)
                if keys.size:
                    acc += np.bincount(keys, minlength=n_places * n_places)
            return acc

        acc = np.zeros(n_places * n_places, dtype=np.int64)
        for part in _bounded_map(work_dense, shares, n_workers):
            acc += part
        keys = np.flatnonzero(acc)
        counts = acc[keys]
    else:
        def work_sparse(b):
            lo, hi = b
            return _reduce(_emit_pairs(pidx, starts[lo:hi], sizes[lo:hi], n_places))

        sparse = _SparseAccumulator(spill_threshold, spill_dir)
        for k, c in _bounded_map(work_sparse, batches, threads):
            sparse.add(k, c)
        keys, counts = sparse.result()
    if n_places == 0:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0, np.int64)
    return keys // n_places, keys % n_places, counts


def shared_users(
    presence: pl.DataFrame,
    threads: int = 1,
    spill_threshold: int = DEFAULT_SPILL_THRESHOLD,
    pair_budget: int = PAIR_BUDGET,
    spill_dir: str | None = None,
) -> pl.DataFrame:
    """``place_i, place_j, shared`` for every pair with at least one shared user.

    ``place_i < place_j`` by code; rows sorted by (place_i, place_j).
    """
    if presence.height == 0:
        return pl.DataFrame(schema={"place_i": pl.Utf8, "place_j": pl.Utf8, "shared": pl.Int64})
    places, pidx, gid = _factorize(presence, ["user"])
    i, j, c = count_group_pairs(pidx, gid, len(places), threads, spill_threshold, pair_budget, spill_dir)
    codes = np.asarray(places, dtype=object)
    return pl.DataFrame(
        {
            "place_i": pl.Series(codes[i], dtype=pl.Utf8),
            "place_j": pl.Series(codes[j], dtype=pl.Utf8),
            "shared": pl.Series(c, dtype=pl.Int64),
        }
    )
