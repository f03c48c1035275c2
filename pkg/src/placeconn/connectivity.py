"""Symmetric and directional place connectivity index."""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
import polars as pl

from .errors import DataError
from .presence import shared_users, unique_users

PCI_COLUMNS = ("place_i", "place_j", "users_i", "users_j", "shared_users", "pci", "pci_i_to_j", "pci_j_to_i")
PCI_SCHEMA = {
    "place_i": pl.Utf8, "place_j": pl.Utf8, "users_i": pl.Int64, "users_j": pl.Int64,
    "shared_users": pl.Int64, "pci": pl.Float64, "pci_i_to_j": pl.Float64, "pci_j_to_i": pl.Float64,
}


class PciRecord(NamedTuple):
    place_i: str
    place_j: str
    users_i: int
    users_j: int
    shared_users: int
    pci: float
    pci_i_to_j: float
    pci_j_to_i: float


def _check(shared: int, users_i: int, users_j: int) -> None:
    for v in (shared, users_i, users_j):
        if isinstance(v, bool) or v != math.floor(v):
            raise ValueError(f"counts must be whole numbers (got {v!r})")
    if users_i < 1 or users_j < 1:
        raise ValueError(f"place populations must be >= 1 (got {users_i}, {users_j})")
    if shared < 0 or shared > min(users_i, users_j):
        raise ValueError(f"shared users {shared} outside [0, min({users_i}, {users_j})]")


def pci(shared: int, users_i: int, users_j: int) -> float:
    """Shared users normalised by the geometric mean of the two populations."""
    _check(shared, users_i, users_j)
    if shared == 0:
        return 0.0
    return shared / math.sqrt(users_i * users_j)


def directional_pci(shared: int, users_i: int, users_j: int) -> tuple[float, float]:
    """``(i -> j, j -> i)``: the share of j's users also seen in i, and vice versa.

    The i -> j value measures how much place i weighs on place j, so it is
    normalised by the population of j.
    """
    _check(shared, users_i, users_j)
    return shared / users_j, shared / users_i


def build_matrix(shared: pl.DataFrame, counts: pl.DataFrame, include_self: bool = False) -> pl.DataFrame:
    """Sparse PCI matrix from shared-user pairs and per-place user counts.

    ``shared`` has columns place_i, place_j, shared (place_i < place_j);
    ``counts`` has place, users. Returns one row per pair with the columns
    in :data:`PCI_COLUMNS`, sorted by (place_i, place_j). With
    ``include_self`` every counted place also gets its trivial self-pair.
    """
    counts = counts.select("place", "users")
    known = set(counts["place"].to_list())
    for col in ("place_i", "place_j"):
        missing = set(shared[col].unique().to_list()) - known
        if missing:
            raise DataError(f"shared pair references place without a user count: {sorted(missing)[0]!r}")
    if (shared["place_i"] >= shared["place_j"]).any():
        raise DataError("shared pairs must be canonical (place_i < place_j, no self-pairs)")
    df = (
        shared.rename({"shared": "shared_users"})
        .join(counts.rename({"place": "place_i", "users": "users_i"}), on="place_i", how="left")
        .join(counts.rename({"place": "place_j", "users": "users_j"}), on="place_j", how="left")
    )
    if include_self:
        selfs = counts.select(
            place_i=pl.col("place"), place_j=pl.col("place"), shared_users=pl.col("users"),
            users_i=pl.col("users"), users_j=pl.col("users"),
        )
        df = pl.concat([df.select(selfs.columns), selfs])
    bad = df.filter(
        (pl.col("shared_users") > pl.min_horizontal("users_i", "users_j")) | (pl.col("shared_users") < 1)
    )
    if bad.height:
        r = bad.row(0, named=True)
        raise DataError(f"inconsistent counts for pair ({r['place_i']}, {r['place_j']})")
    s = df["shared_users"].to_numpy().astype(np.float64)
    ui = df["users_i"].to_numpy().astype(np.float64)
    uj = df["users_j"].to_numpy().astype(np.float64)
    df = df.with_columns(
        pci=pl.Series(s / np.sqrt(ui * uj)),
        pci_i_to_j=pl.Series(s / uj),
        pci_j_to_i=pl.Series(s / ui),
    )
    return df.select(PCI_COLUMNS).cast(PCI_SCHEMA).sort("place_i", "place_j")


def records(matrix: pl.DataFrame) -> list[PciRecord]:
    return [PciRecord(*row) for row in matrix.select(PCI_COLUMNS).iter_rows()]


def empty_matrix() -> pl.DataFrame:
    return pl.DataFrame(schema=PCI_SCHEMA)


def pci_from_presence(presence: pl.DataFrame, threads: int = 1, include_self: bool = False, **pair_opts) -> pl.DataFrame:
    """Presence tuples straight to the PCI matrix."""
    if presence.height == 0:
        return empty_matrix()
    return build_matrix(shared_users(presence, threads, **pair_opts), unique_users(presence), include_self)
