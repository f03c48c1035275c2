"""Event parsing, human-source and resolution filtering, presence emission.

Events arrive as NDJSON lines. Each kept event becomes a presence tuple
``(place, user, date)`` at the target level; duplicates collapse. Rejected
events are tallied under exactly one reason, checked in this order:
``parse``, ``source``, ``resolution``, ``window``, ``unresolved``.

Files are processed in chunks. A chunk is decoded with polars when every
line is plain (string fields are JSON strings, coordinates are JSON
numbers); lines that are not go through :func:`json.loads` one at a time.
Both routes feed the same columnar validator.
"""
from __future__ import annotations

import datetime as dt
import json
import logging
import math
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator

import numpy as np
import polars as pl

from .errors import ConfigError, DataError
from .places import PlaceLevel, PlaceRegistry, SpatialResolution

log = logging.getLogger(__name__)

REJECT_REASONS = ("parse", "source", "resolution", "window", "unresolved")
PRESENCE_SCHEMA = {"place": pl.Utf8, "user": pl.Utf8, "date": pl.Date}

_RES_RANK = {r.value: r.rank for r in SpatialResolution}
_EPOCH = dt.date(1970, 1, 1)

# Human-posting applications, as listed (duplicates and odd spellings kept).
HUMAN_SOURCES = (
    "TweetCaster for Android", "TweetCaster for iOS", "Tweetings for iPad",
    "Tweetings for Android", "Tweetings for Android Holo", "Tweetings for Android Tablets",
    "Tweetings for iPhone", "Tweetings for iPhone", "Tweetlogix", "twicca",
    "Twidere for Android #4", "Twidere for Android #5", "Twidere for Android #7",
    "Twishort Client", "Twittelator", "Twitter Dashboard for iPhone",
    "Twitter Engage for iPhone", "Twitter for Android", "Twitter for iPhone",
    "Twitter for Android", "Twitter for Android Tablets", "Twitter for Apple Watch",
    "Twitter for BlackBerry", "Twitter for Calendar", "Twitter for iPad",
    "Twitter for iPhone", "Twitter for Mac", "Twitter for Windows",
    "Twitter for Windows Phone", "Untappd", "Tweetbot for iOS", "Foursquare Swarm",
    "UberSocial for Android", "Twitter Web Client", "Gay Los Angeles", "Gay Santa Monica",
    "Gay West Hollywood", "Hootsuite", "Instagram", "iOS", "OS X", "PlumeforAndroid",
    "SoundHound", "Squarespace", "Talon (Plus)", "Talon Android", "Talon Plus",
    "Echofon", "Endomondo", "Fenix for Android", "Flamingo for Android", "Foursquare",
    "Tweet It! for Windows", "Tweetbot for iS", "Tweetbot for Mac",
)


# ---------------------------------------------------------------------------
# types

@dataclass(frozen=True)
class GeoEvent:
    user: str
    ts: dt.datetime
    res: SpatialResolution
    source: str = ""
    lat: float | None = None
    lon: float | None = None
    place_code: str | None = None

    def __post_init__(self):
        if (self.lat is None) != (self.lon is None):
            raise ValueError("lat and lon must be given together")
        if self.lat is None and self.place_code is None:
            raise ValueError("event needs lat/lon or place_code")
        if self.res is SpatialResolution.COORD and self.lat is None:
            raise ValueError("res 'coord' requires lat/lon")

    @property
    def date(self) -> dt.date:
        return _utc(self.ts).date()


@dataclass(frozen=True)
class PresenceTuple:
    place: str
    user: str
    date: dt.date


@dataclass(frozen=True)
class SourceWhitelist:
    """Exact, case-sensitive set of accepted posting applications."""

    sources: frozenset

    def __post_init__(self):
        if not self.sources:
            raise ValueError("an enabled source whitelist must not be empty")

    @classmethod
    def human_sources(cls) -> "SourceWhitelist":
        return cls(frozenset(HUMAN_SOURCES))

    @classmethod
    def from_file(cls, path: str | Path) -> "SourceWhitelist":
        sources = set()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.rstrip("\r\n")
                if not line.strip() or line.lstrip().startswith("#"):
                    continue
                sources.add(line)
        if not sources:
            raise ConfigError(f"whitelist {path} has no entries")
        return cls(frozenset(sources))

    def __contains__(self, source: object) -> bool:
        return source in self.sources

    def __len__(self) -> int:
        return len(self.sources)


def is_human_source(source: str, wl: SourceWhitelist | None) -> bool:
    return wl is None or source in wl


@dataclass
class IngestReport:
    read: int = 0
    kept: int = 0
    rejected: Counter = field(default_factory=Counter)
    tuples: int = 0
    errors: list = field(default_factory=list)  # (line number, message), first few only

    max_errors = 20

    def merge(self, other: "IngestReport") -> None:
        self.read += other.read
        self.kept += other.kept
        self.rejected.update(other.rejected)
        room = self.max_errors - len(self.errors)
        if room > 0:
            self.errors.extend(other.errors[:room])

    @property
    def total_rejected(self) -> int:
        return sum(self.rejected.values())

    def to_dict(self) -> dict:
        return {
            "read": self.read,
            "kept": self.kept,
            "rejected": {r: int(self.rejected.get(r, 0)) for r in REJECT_REASONS},
            "tuples": self.tuples,
            "parse_errors": [{"line": n, "error": msg} for n, msg in self.errors],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


class ParseError(DataError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        super().__init__(message if lineno is None else f"line {lineno}: {message}")


# ---------------------------------------------------------------------------
# scalar parsing

def _utc(ts: dt.datetime) -> dt.datetime:
    if ts.tzinfo is None:
        return ts.replace(tzinfo=dt.timezone.utc)
    return ts.astimezone(dt.timezone.utc)


def parse_timestamp(text: str) -> dt.datetime:
    """ISO-8601 to an aware UTC datetime; naive stamps are taken as UTC."""
    s = text.strip()
    if s[-1:] in ("Z", "z"):
        s = s[:-1] + "+00:00"
    return _utc(dt.datetime.fromisoformat(s))


def _ts_day(text: str) -> int | None:
    try:
        return (parse_timestamp(text).date() - _EPOCH).days
    except (ValueError, IndexError, OverflowError):
        return None


def _as_str(value, name: str) -> str | None:
    if value is None:
        return None
    if isinstance(value, str):
        return value
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    raise ValueError(f"field {name!r} has wrong type")


def _as_float(value, name: str) -> float | None:
    if value is None:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ValueError(f"field {name!r} has wrong type")


def _raw_from_obj(obj) -> dict:
    """Typed raw fields of one decoded line; ``error`` set on type problems."""
    row = dict.fromkeys(_RAW_FIELDS)
    if not isinstance(obj, dict):
        row["error"] = "record is not a JSON object"
        return row
    try:
        row["user"] = _as_str(obj.get("user"), "user")
        ts = obj.get("ts")
        if ts is not None and not isinstance(ts, str):
            raise ValueError("field 'ts' has wrong type")
        row["ts"] = ts
        row["lat"] = _as_float(obj.get("lat"), "lat")
        row["lon"] = _as_float(obj.get("lon"), "lon")
        res = obj.get("res")
        if res is not None and not isinstance(res, str):
            raise ValueError("field 'res' has wrong type")
        row["res"] = res
        row["place_code"] = _as_str(obj.get("place_code"), "place_code")
        row["source"] = _as_str(obj.get("source"), "source")
    except ValueError as exc:
        row = dict.fromkeys(_RAW_FIELDS)
        row["error"] = str(exc)
    return row


def _row_error(row: dict) -> str | None:
    """Validation of one raw row; mirrors :func:`_validate` rule for rule."""
    if row.get("error"):
        return row["error"]
    if not row["user"]:
        return "missing field 'user'"
    if row["ts"] is None:
        return "missing field 'ts'"
    if row["res"] is None:
        return "missing field 'res'"
    if row["res"] not in _RES_RANK:
        return f"invalid resolution token {row['res']!r}"
    if _ts_day(row["ts"]) is None:
        return "invalid timestamp"
    lat, lon = row["lat"], row["lon"]
    if (lat is None) != (lon is None):
        return "lat and lon must be given together"
    if lat is not None and not (
        math.isfinite(lat) and math.isfinite(lon) and -90 <= lat <= 90 and -180 <= lon <= 180
    ):
        return "coordinates out of range"
    code = row["place_code"] or None
    if lat is None and code is None:
        return "no location (lat/lon or place_code)"
    if row["res"] == "coord" and lat is None:
        return "res 'coord' requires lat/lon"
    return None


def parse_event(line: str, lineno: int | None = None) -> GeoEvent:
    """Parse and validate one NDJSON record."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc.msg}", lineno) from None
    row = _raw_from_obj(obj)
    err = _row_error(row)
    if err:
        raise ParseError(err, lineno)
    return GeoEvent(
        user=row["user"],
        ts=parse_timestamp(row["ts"]),
        res=SpatialResolution(row["res"]),
        source=row["source"] or "",
        lat=row["lat"],
        lon=row["lon"],
        place_code=row["place_code"] or None,
    )


# ---------------------------------------------------------------------------
# columnar validation

_RAW_FIELDS = ("user", "ts", "lat", "lon", "res", "place_code", "source", "error")
_RAW_SCHEMA = {
    "user": pl.Utf8, "ts": pl.Utf8, "lat": pl.Float64, "lon": pl.Float64,
    "res": pl.Utf8, "place_code": pl.Utf8, "source": pl.Utf8, "error": pl.Utf8,
}
_DECODE_DTYPE = pl.Struct({k: v for k, v in _RAW_SCHEMA.items() if k != "error"})

# Lines polars may coerce differently from json.loads: non-objects, booleans,
# nested containers, non-string values in string fields.
_NEEDS_STDLIB = (
    r'^\s*[^{\s]|\btrue\b|\bfalse\b|[\[\]]|\{.*\{|NaN|Infinity'
    r'|"(?:user|ts|res|place_code|source)"\s*:\s*[-0-9]'
    r'|"(?:lat|lon)"\s*:\s*"'
)
_FAST_TS = r"^\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}(?:\.\d{3}|\.\d{6})?Z$"


def _ts_days(ts: pl.Series) -> pl.Series:
    """Vectorised ``_ts_day``: UTC date as days since epoch, null if invalid."""
    fast = ts.str.contains(_FAST_TS).fill_null(False)
    day = ts.str.slice(0, 10).str.to_date("%Y-%m-%d", strict=False)
    hh = ts.str.slice(11, 2).cast(pl.Int32, strict=False)
    mm = ts.str.slice(14, 2).cast(pl.Int32, strict=False)
    ss = ts.str.slice(17, 2).cast(pl.Int32, strict=False)
    ok = fast & day.is_not_null() & (hh < 24) & (mm < 60) & (ss < 60)
    ok = ok.fill_null(False)
    out = day.cast(pl.Int32).to_numpy().astype(np.float64, copy=True)
    out[~ok.to_numpy()] = np.nan
    slow = np.flatnonzero((~ok & ts.is_not_null()).to_numpy())
    if slow.size:
        vals = ts.gather(slow).to_list()
        memo = {}
        for i, v in zip(slow, vals):
            if v not in memo:
                memo[v] = _ts_day(v)
            d = memo[v]
            out[i] = np.nan if d is None else d
    return pl.Series("day", out).cast(pl.Int32, strict=False)


def _validate(raw: pl.DataFrame) -> pl.DataFrame:
    """Add ``day``, ``rank`` and ``error`` columns; same rules as ``_row_error``."""
    day = _ts_days(raw["ts"])
    df = raw.with_columns(
        day=day,
        rank=pl.col("res").replace_strict(_RES_RANK, default=None, return_dtype=pl.Int8),
        place_code=pl.when(pl.col("place_code") == "").then(None).otherwise(pl.col("place_code")),
    )
    lat, lon = pl.col("lat"), pl.col("lon")
    bad_coord = lat.is_not_null() & ~(
        lat.is_finite() & lon.is_finite() & lat.is_between(-90, 90) & lon.is_between(-180, 180)
    )
    err = (
        pl.when(pl.col("error").is_not_null()).then(pl.col("error"))
        .when(pl.col("user").is_null() | (pl.col("user") == "")).then(pl.lit("missing field 'user'"))
        .when(pl.col("ts").is_null()).then(pl.lit("missing field 'ts'"))
        .when(pl.col("res").is_null()).then(pl.lit("missing field 'res'"))
        .when(pl.col("rank").is_null()).then(pl.lit("invalid resolution token"))
        .when(pl.col("day").is_null()).then(pl.lit("invalid timestamp"))
        .when(lat.is_null() != lon.is_null()).then(pl.lit("lat and lon must be given together"))
        .when(bad_coord).then(pl.lit("coordinates out of range"))
        .when(lat.is_null() & pl.col("place_code").is_null()).then(pl.lit("no location (lat/lon or place_code)"))
        .when((pl.col("res") == "coord") & lat.is_null()).then(pl.lit("res 'coord' requires lat/lon"))
        .otherwise(None)
    )
    return df.with_columns(error=err)


def _decode_lines(lines: list[str]) -> pl.DataFrame:
    """Raw typed columns for a chunk of non-blank lines."""
    s = pl.Series("line", lines, dtype=pl.Utf8)
    needs = s.str.contains(_NEEDS_STDLIB).to_numpy()
    fast_idx = np.flatnonzero(~needs)
    rows: dict[int, dict] = {}
    fast_df = None
    if fast_idx.size:
        try:
            dec = s.gather(fast_idx).str.json_decode(_DECODE_DTYPE)
            if len(dec) != fast_idx.size:
                raise ValueError("row count changed while decoding")
            fast_df = dec.struct.unnest().with_columns(error=pl.lit(None, dtype=pl.Utf8))
        except Exception:  # polars raises ComputeError subclasses; decode slowly
            fast_df = None
    slow_idx = np.flatnonzero(needs) if fast_df is not None else np.arange(len(lines))
    for i in slow_idx:
        try:
            obj = json.loads(lines[i])
        except json.JSONDecodeError as exc:
            row = dict.fromkeys(_RAW_FIELDS)
            row["error"] = f"malformed JSON: {exc.msg}"
        else:
            row = _raw_from_obj(obj)
        rows[int(i)] = row
    slow_df = pl.DataFrame(
        {k: [rows[int(i)][k] for i in slow_idx] for k in _RAW_FIELDS}, schema=_RAW_SCHEMA
    )
    if fast_df is None or fast_df.height == 0:
        return slow_df
    fast_df = fast_df.select(list(_RAW_SCHEMA)).cast(_RAW_SCHEMA)
    if slow_df.height == 0:
        return fast_df
    order = np.argsort(np.concatenate([fast_idx, slow_idx]), kind="stable")
    return pl.concat([fast_df, slow_df]).select(pl.all().gather(order))


# ---------------------------------------------------------------------------
# filtering and place resolution

def _empty_presence() -> pl.DataFrame:
    return pl.DataFrame(schema=PRESENCE_SCHEMA)


def _window_days(window) -> tuple[int | None, int | None]:
    if window is None:
        return None, None
    start, end = window
    lo = None if start is None else (_as_date(start) - _EPOCH).days
    hi = None if end is None else (_as_date(end) - _EPOCH).days
    if lo is not None and hi is not None and lo > hi:
        raise ConfigError("window start is after window end")
    return lo, hi


def _as_date(value) -> dt.date:
    if isinstance(value, dt.datetime):
        return _utc(value).date()
    if isinstance(value, dt.date):
        return value
    return dt.date.fromisoformat(str(value))


def _filter_and_locate(
    df: pl.DataFrame,
    registry: PlaceRegistry,
    level: PlaceLevel,
    window: tuple[int | None, int | None],
    wl: SourceWhitelist | None,
    report: IngestReport,
) -> pl.DataFrame:
    """Apply source/resolution/window filters and resolve places.

    ``df`` holds validated rows: user, day, rank, lat, lon, place_code, source.
    """
    n = df.height
    if wl is not None:
        keep = df["source"].is_in(list(wl.sources)).fill_null(False)
        report.rejected["source"] += n - int(keep.sum())
        df = df.filter(keep)
    keep = df["rank"] >= level.rank
    report.rejected["resolution"] += df.height - int(keep.sum())
    df = df.filter(keep)
    lo, hi = window
    if lo is not None or hi is not None:
        keep = pl.lit(True)
        if lo is not None:
            keep = keep & (pl.col("day") >= lo)
        if hi is not None:
            keep = keep & (pl.col("day") <= hi)
        before = df.height
        df = df.filter(keep)
        report.rejected["window"] += before - df.height
    if df.height == 0:
        return _empty_presence()

    codes = registry.codes(level)
    place = np.full(df.height, -1, dtype=np.int64)
    pc = df["place_code"]
    if pc.null_count() < df.height:
        uniq = pc.drop_nulls().unique().to_list()
        index = {c: i for i, c in enumerate(codes)}
        mapping = {}
        for c in uniq:
            up = registry.rollup(c, level)
            if up is not None:
                mapping[c] = index[up]
        if mapping:
            place = (
                pc.replace_strict(mapping, default=-1, return_dtype=pl.Int64)
                .fill_null(-1)
                .to_numpy()
                .copy()
            )
    need_pt = (place < 0) & df["lat"].is_not_null().to_numpy()
    if need_pt.any():
        sel = np.flatnonzero(need_pt)
        place[sel] = registry.assign_points(
            df["lat"].to_numpy()[sel], df["lon"].to_numpy()[sel], level
        )
    ok = place >= 0
    report.rejected["unresolved"] += int((~ok).sum())
    report.kept += int(ok.sum())
    if not ok.any():
        return _empty_presence()
    code_arr = np.asarray(codes, dtype=object)
    mask = pl.Series(ok)
    cols = {
        "place": pl.Series(code_arr[place[ok]], dtype=pl.Utf8),
        "user": df["user"].filter(mask),
        "date": df["day"].filter(mask).cast(pl.Date),
    }
    if "ts" in df.columns and df["ts"].dtype != pl.Utf8:
        # timed events (see locate_events) keep every row
        cols["ts"] = df["ts"].filter(mask)
        return pl.DataFrame(cols)
    return pl.DataFrame(cols).unique()


def _finish(parts: list[pl.DataFrame], report: IngestReport) -> tuple[pl.DataFrame, IngestReport]:
    parts = [p for p in parts if p.height]
    if parts:
        presence = pl.concat(parts).unique().sort(["place", "user", "date"])
    else:
        presence = _empty_presence()
    report.tuples = presence.height
    return presence, report


def _process_chunk(numbered: list[tuple[int, str]], registry, level, window, wl) -> tuple[pl.DataFrame, IngestReport]:
    report = IngestReport()
    report.read = len(numbered)
    if not numbered:
        return _empty_presence(), report
    raw = _decode_lines([line for _, line in numbered])
    df = _validate(raw)
    err = df["error"]
    bad = err.is_not_null().to_numpy()
    nbad = int(bad.sum())
    if nbad:
        report.rejected["parse"] += nbad
        for i in np.flatnonzero(bad)[: IngestReport.max_errors]:
            report.errors.append((numbered[i][0], err[int(i)]))
        df = df.filter(pl.Series(~bad))
    out = _filter_and_locate(df, registry, level, window, wl, report)
    return out, report


def _chunks(paths, chunk_lines: int) -> Iterator[list[tuple[int, str]]]:
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            buf = []
            for n, line in enumerate(fh, 1):
                if line.strip():
                    buf.append((n, line))
                    if len(buf) >= chunk_lines:
                        yield buf
                        buf = []
            if buf:
                yield buf


def ingest_files(
    paths: Iterable[str | Path],
    registry: PlaceRegistry,
    level: PlaceLevel | str,
    window=None,
    whitelist: SourceWhitelist | None = None,
    threads: int = 1,
    chunk_lines: int = 500_000,
) -> tuple[pl.DataFrame, IngestReport]:
    """Ingest NDJSON event files into a presence table.

    Malformed lines are counted and skipped; blank lines are ignored. The
    result is a DataFrame with columns place, user, date, deduplicated and
    sorted, so it does not depend on ``threads`` or ``chunk_lines``.
    """
    level = PlaceLevel.parse(level)
    win = _window_days(window)
    paths = [Path(p) for p in paths]
    for p in paths:
        if not p.is_file():
            raise DataError(f"event file not found: {p}")
    report = IngestReport()
    parts = []
    threads = max(1, int(threads))
    if threads == 1:
        for chunk in _chunks(paths, chunk_lines):
            part, rep = _process_chunk(chunk, registry, level, win, whitelist)
            parts.append(part)
            report.merge(rep)
    else:
        with ThreadPoolExecutor(threads) as pool:
            pending = []
            for chunk in _chunks(paths, chunk_lines):
                pending.append(pool.submit(_process_chunk, chunk, registry, level, win, whitelist))
                if len(pending) >= 2 * threads:
                    part, rep = pending.pop(0).result()
                    parts.append(part)
                    report.merge(rep)
            for fut in pending:
                part, rep = fut.result()
                parts.append(part)
                report.merge(rep)
    if report.rejected["parse"]:
        log.warning("%d malformed event lines skipped", report.rejected["parse"])
    return _finish(parts, report)


def ingest_stream(
    events: Iterable[GeoEvent],
    registry: PlaceRegistry,
    level: PlaceLevel | str,
    window=None,
    whitelist: SourceWhitelist | None = None,
    batch_size: int = 200_000,
) -> tuple[pl.DataFrame, IngestReport]:
    """Turn already-parsed events into deduplicated presence tuples."""
    level = PlaceLevel.parse(level)
    win = _window_days(window)
    report = IngestReport()
    parts = []
    batch: list[GeoEvent] = []

    def flush():
        if not batch:
            return
        report.read += len(batch)
        df = pl.DataFrame(
            {
                "user": [e.user for e in batch],
                "day": [(e.date - _EPOCH).days for e in batch],
                "rank": [e.res.rank for e in batch],
                "lat": [e.lat for e in batch],
                "lon": [e.lon for e in batch],
                "place_code": [e.place_code for e in batch],
                "source": [e.source for e in batch],
            },
            schema={"user": pl.Utf8, "day": pl.Int32, "rank": pl.Int8, "lat": pl.Float64,
                    "lon": pl.Float64, "place_code": pl.Utf8, "source": pl.Utf8},
        )
        parts.append(_filter_and_locate(df, registry, level, win, whitelist, report))
        batch.clear()

    for ev in events:
        batch.append(ev)
        if len(batch) >= batch_size:
            flush()
    flush()
    return _finish(parts, report)


def locate_events(
    events: Iterable[GeoEvent],
    registry: PlaceRegistry,
    level: PlaceLevel | str,
    window=None,
    whitelist: SourceWhitelist | None = None,
) -> tuple[pl.DataFrame, IngestReport]:
    """Like :func:`ingest_stream` but keeps one row per event with its UTC time.

    Columns place, user, date, ts; used where within-day order matters.
    """
    level = PlaceLevel.parse(level)
    events = list(events)
    report = IngestReport(read=len(events))
    df = pl.DataFrame(
        {
            "user": [e.user for e in events],
            "day": [(e.date - _EPOCH).days for e in events],
            "rank": [e.res.rank for e in events],
            "lat": [e.lat for e in events],
            "lon": [e.lon for e in events],
            "place_code": [e.place_code for e in events],
            "source": [e.source for e in events],
            "ts": [_utc(e.ts) for e in events],
        },
        schema={"user": pl.Utf8, "day": pl.Int32, "rank": pl.Int8, "lat": pl.Float64,
                "lon": pl.Float64, "place_code": pl.Utf8, "source": pl.Utf8,
                "ts": pl.Datetime("us", "UTC")},
    )
    out = _filter_and_locate(df, registry, level, _window_days(window), whitelist, report)
    if "ts" not in out.columns:
        out = out.with_columns(ts=pl.lit(None, dtype=pl.Datetime("us", "UTC")))
    out = out.sort("user", "ts", "place")
    report.tuples = out.select("place", "user", "date").unique().height
    return out, report


def read_events(paths: Iterable[str | Path], report: IngestReport | None = None) -> Iterator[GeoEvent]:
    """Yield parsed events line by line, tallying parse errors in ``report``."""
    for path in paths:
        with open(path, encoding="utf-8") as fh:
            for n, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    yield parse_event(line, n)
                except ParseError as exc:
                    if report is not None:
                        report.read += 1
                        report.rejected["parse"] += 1
                        if len(report.errors) < IngestReport.max_errors:
                            report.errors.append((n, str(exc)))


def presence_tuples(presence: pl.DataFrame) -> set[PresenceTuple]:
    return {PresenceTuple(p, u, d) for p, u, d in presence.select("place", "user", "date").iter_rows()}


def presence_frame(tuples: Iterable) -> pl.DataFrame:
    """Presence DataFrame from ``(place, user, date)`` triples (deduplicated, sorted)."""
    rows = [(t[0], t[1], t[2]) for t in tuples]
    if not rows:
        return _empty_presence()
    df = pl.DataFrame(rows, schema=PRESENCE_SCHEMA, orient="row")
    return df.unique().sort(["place", "user", "date"])
