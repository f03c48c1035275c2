"""Average-linkage (UPGMA) clustering of places on inverse-PCI distances.

The distance between two places is ``1 / pci``. Pairs without shared users
get a sentinel ten times the largest finite distance, so disconnected groups
merge last.

``agglomerate`` is the greedy algorithm with a cached nearest neighbour per
row: at every step the globally closest pair of clusters merges, ties going
to the lexicographically smallest ``(cluster_a, cluster_b)`` id pair. Merged
distances follow the size-weighted Lance-Williams update, which equals the
mean over all cross pairs of leaves. Average linkage is reducible, so a
merge never lowers any row's nearest-neighbour distance and only rows whose
cached neighbour took part in the merge need a rescan.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import polars as pl

SENTINEL_FACTOR = 10.0


@dataclass
class DistanceMatrix:
    places: list[str]
    values: np.ndarray  # dense (n, n), zero diagonal
    dmax: float

    @property
    def n(self) -> int:
        return len(self.places)


class Merge(NamedTuple):
    cluster_a: int
    cluster_b: int
    height: float
    new_cluster: int
    size: int


@dataclass
class Dendrogram:
    places: list[str]
    merges: list[Merge]

    @property
    def n(self) -> int:
        return len(self.places)

    def heights(self) -> np.ndarray:
        return np.array([m.height for m in self.merges])

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {
                "merge_index": list(range(len(self.merges))),
                "cluster_a": [m.cluster_a for m in self.merges],
                "cluster_b": [m.cluster_b for m in self.merges],
                "height": [m.height for m in self.merges],
                "size": [m.size for m in self.merges],
            },
            schema={"merge_index": pl.Int64, "cluster_a": pl.Int64, "cluster_b": pl.Int64,
                    "height": pl.Float64, "size": pl.Int64},
        )

    def linkage_matrix(self) -> np.ndarray:
        """SciPy-style ``(n-1, 4)`` linkage array."""
        return np.array([[m.cluster_a, m.cluster_b, m.height, m.size] for m in self.merges], dtype=float)


def pci_to_distance(matrix: pl.DataFrame, places: list[str] | None = None, column: str = "pci") -> DistanceMatrix:
    """Dense inverse-PCI distances over ``places`` (default: all places in the matrix).

    Self-pairs in the matrix are ignored. Absent pairs get
    ``SENTINEL_FACTOR`` times the largest finite distance (10.0 if there is
    none).
    """
    m = matrix.filter(pl.col("place_i") != pl.col("place_j"))
    if places is None:
        places = sorted(set(m["place_i"].to_list()) | set(m["place_j"].to_list()))
    else:
        places = sorted(places)
    index = {p: k for k, p in enumerate(places)}
    m = m.filter(pl.col("place_i").is_in(places) & pl.col("place_j").is_in(places))
    vals = m[column].to_numpy().astype(np.float64)
    if np.any(~(vals > 0)):
        raise ValueError("all connectivity values must be > 0 to invert")
    n = len(places)
    d = np.full((n, n), np.nan)
    ii = np.array([index[p] for p in m["place_i"].to_list()], dtype=np.int64)
    jj = np.array([index[p] for p in m["place_j"].to_list()], dtype=np.int64)
    dist = 1.0 / vals
    d[ii, jj] = dist
    d[jj, ii] = dist
    dmax = SENTINEL_FACTOR * (dist.max() if dist.size else 1.0)
    d[np.isnan(d)] = dmax
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(places, d, float(dmax))


def _matrix(d) -> tuple[list[str], np.ndarray]:
    if isinstance(d, DistanceMatrix):
        return d.places, d.values
    a = np.asarray(d, dtype=np.float64)
    return [str(k) for k in range(a.shape[0])], a


def agglomerate(d: DistanceMatrix | np.ndarray) -> Dendrogram:
    """UPGMA merge tree; leaves are ``0..n-1`` in place order, merge k creates ``n+k``."""
    places, values = _matrix(d)
    n = values.shape[0]
    if n < 2:
        raise ValueError("need at least 2 places to cluster")
    if values.shape != (n, n):
        raise ValueError("distance matrix must be square")
    D = values.astype(np.float64, copy=True)
    np.fill_diagonal(D, np.inf)
    size = np.ones(n, dtype=np.int64)
    cid = np.arange(n, dtype=np.int64)  # cluster id held by each row
    active = np.ones(n, dtype=bool)
    nn_dist = D.min(axis=1)
    nn_idx = D.argmin(axis=1)
    merges: list[Merge] = []
    for step in range(n - 1):
        m = nn_dist.min()
        rows = np.flatnonzero(nn_dist == m)
        if rows.size == 1:
            a = int(rows[0])
            partners = np.flatnonzero(D[a] == m)
            if partners.size == 1:
                b = int(partners[0])
            else:
                b = int(partners[np.argmin(cid[partners])])
        else:
            # tie: pick the smallest (id_a, id_b) over every closest pair
            best = None
            for r in rows:
                for c in np.flatnonzero(D[r] == m):
                    key = (min(cid[r], cid[c]), max(cid[r], cid[c]))
                    if best is None or key < best[0]:
                        best = (key, int(r), int(c))
            _, a, b = best
        ida, idb = sorted((int(cid[a]), int(cid[b])))
        keep, drop = (a, b) if a < b else (b, a)
        na, nb = size[keep], size[drop]
        # equal entries stay bit-exact so sentinel-distance ties remain ties
        new_row = np.where(D[keep] == D[drop], D[keep], (na * D[keep] + nb * D[drop]) / (na + nb))
        new_row[keep] = np.inf
        new_row[drop] = np.inf
        D[keep, :] = new_row
        D[:, keep] = new_row
        D[drop, :] = np.inf
        D[:, drop] = np.inf
        active[drop] = False
        size[keep] = na + nb
        size[drop] = 0
        new_id = n + step
        cid[keep] = new_id
        merges.append(Merge(ida, idb, float(m), new_id, int(na + nb)))
        nn_dist[drop] = np.inf
        nn_idx[drop] = -1
        stale = np.flatnonzero(active & ((nn_idx == keep) | (nn_idx == drop)))
        stale = np.union1d(stale, [keep])
        if stale.size:
            sub = D[stale]
            nn_idx[stale] = sub.argmin(axis=1)
            nn_dist[stale] = sub[np.arange(stale.size), nn_idx[stale]]
        # merged row may now be the nearest neighbour of others at equal distance
        closer = active & (D[:, keep] < nn_dist)
        if closer.any():
            nn_dist[closer] = D[closer, keep]
            nn_idx[closer] = keep
    return Dendrogram(list(places), merges)


@dataclass
class CommunityAssignment:
    places: list[str]
    labels: np.ndarray  # community id per place, in [0, k)
    k: int

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.places, (int(x) for x in self.labels)))

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame({"place": self.places, "community": self.labels.astype(np.int64)})


def cut(dendro: Dendrogram, k: int) -> CommunityAssignment:
    """Stop merging at ``k`` clusters.

    Communities are numbered by their smallest member code.
    """
    n = dendro.n
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    parent = list(range(2 * n - 1))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for mg in dendro.merges[: n - k]:
        parent[find(mg.cluster_a)] = mg.new_cluster
        parent[find(mg.cluster_b)] = mg.new_cluster
    roots = [find(i) for i in range(n)]
    order = np.argsort(np.asarray(dendro.places, dtype=object), kind="stable")
    labels = np.empty(n, dtype=np.int64)
    seen: dict[int, int] = {}
    for i in order:
        r = roots[i]
        if r not in seen:
            seen[r] = len(seen)
        labels[i] = seen[r]
    return CommunityAssignment(list(dendro.places), labels, k)
