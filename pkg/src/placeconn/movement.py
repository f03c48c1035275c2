"""Person-day origin-destination movements.

Two sources: presence tuples from the event pipeline, and third-party
directed flows (``origin,destination,count,date`` CSV) that are rolled up
to a place level and made symmetric.
"""
from __future__ import annotations

import datetime as dt
from pathlib import Path
from typing import NamedTuple

import numpy as np
import polars as pl

from .errors import DataError
from .places import PlaceLevel, PlaceRegistry
from .presence import _factorize, count_group_pairs

OD_SCHEMA = {"place_i": pl.Utf8, "place_j": pl.Utf8, "person_days": pl.Int64}
FLOW_SCHEMA = {"origin": pl.Utf8, "destination": pl.Utf8, "count": pl.Int64, "date": pl.Utf8}


class DirectedFlow(NamedTuple):
    origin: str
    destination: str
    count: int
    date: dt.date | str | None = None


def _empty() -> pl.DataFrame:
    return pl.DataFrame(schema=OD_SCHEMA)


def person_day_movements(presence: pl.DataFrame, threads: int = 1) -> pl.DataFrame:
    """Symmetric movement counts from presence tuples.

    Every user-day that touches a set of places ``V`` adds one movement to
    each unordered pair of distinct places in ``V``.
    """
    if presence.height == 0:
        return _empty()
    places, pidx, gid = _factorize(presence, ["user", "date"])
    i, j, c = count_group_pairs(pidx, gid, len(places), threads)
    codes = np.asarray(places, dtype=object)
    return pl.DataFrame(
        {
            "place_i": pl.Series(codes[i], dtype=pl.Utf8),
            "place_j": pl.Series(codes[j], dtype=pl.Utf8),
            "person_days": pl.Series(c, dtype=pl.Int64),
        }
    )


def transition_movements(events: pl.DataFrame) -> pl.DataFrame:
    """Alternative rule: consecutive distinct places within a user-day.

    ``events`` needs columns place, user, date and ``ts`` (any sortable
    within-day order). Runs of the same place collapse, so A,A,B,A counts
    A-B twice.
    """
    if events.height == 0:
        return _empty()
    df = events.sort("user", "date", "ts", "place")
    same_day = (pl.col("user") == pl.col("user").shift(1)) & (pl.col("date") == pl.col("date").shift(1))
    df = df.with_columns(prev=pl.when(same_day).then(pl.col("place").shift(1)).otherwise(None))
    df = df.filter(pl.col("prev").is_not_null() & (pl.col("prev") != pl.col("place")))
    return (
        df.select(
            place_i=pl.min_horizontal("prev", "place"),
            place_j=pl.max_horizontal("prev", "place"),
        )
        .group_by("place_i", "place_j")
        .agg(person_days=pl.len().cast(pl.Int64))
        .sort("place_i", "place_j")
    )


def read_flows(path: str | Path) -> pl.DataFrame:
    """Read a directed-flow CSV (``origin,destination,count,date``; ``#`` comments)."""
    try:
        df = pl.read_csv(path, comment_prefix="#", schema_overrides=FLOW_SCHEMA)
    except (pl.exceptions.PolarsError, OSError) as exc:
        raise DataError(f"cannot read flows from {path}: {exc}") from None
    missing = {"origin", "destination", "count"} - set(df.columns)
    if missing:
        raise DataError(f"{path}: missing columns {sorted(missing)}")
    if df["count"].null_count() or (df["count"] < 0).any():
        raise DataError(f"{path}: flow counts must be non-negative integers")
    return df


def symmetrize_flows(
    flows: pl.DataFrame | list[DirectedFlow],
    registry: PlaceRegistry,
    level: PlaceLevel | str,
) -> pl.DataFrame:
    """Roll directed flows up to ``level`` and add both directions.

    A pair's movement count is ``m + n`` where ``m`` and ``n`` are the total
    flows each way over all dates; flows within one place are dropped.
    """
    level = PlaceLevel.parse(level)
    if not isinstance(flows, pl.DataFrame):
        flows = pl.DataFrame(
            [(f.origin, f.destination, int(f.count)) for f in flows],
            schema={"origin": pl.Utf8, "destination": pl.Utf8, "count": pl.Int64},
            orient="row",
        )
    if flows.height == 0:
        return _empty()
    if (flows["count"] < 0).any():
        raise DataError("flow counts must be non-negative")
    codes = set(flows["origin"].unique().to_list()) | set(flows["destination"].unique().to_list())
    mapping = {}
    for c in sorted(codes):
        up = registry.rollup(c, level)
        if up is None:
            raise DataError(f"flow place {c!r} has no ancestor at level {level.value}")
        mapping[c] = up
    df = flows.select(
        a=pl.col("origin").replace_strict(mapping),
        b=pl.col("destination").replace_strict(mapping),
        count=pl.col("count").cast(pl.Int64),
    ).filter(pl.col("a") != pl.col("b"))
    return (
        df.select(
            place_i=pl.min_horizontal("a", "b"),
            place_j=pl.max_horizontal("a", "b"),
            count=pl.col("count"),
        )
        .group_by("place_i", "place_j")
        .agg(person_days=pl.col("count").sum().cast(pl.Int64))
        .filter(pl.col("person_days") > 0)
        .sort("place_i", "place_j")
    )
