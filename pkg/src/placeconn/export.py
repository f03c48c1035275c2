"""CSV/JSON/GeoJSON writers and readers for pipeline artifacts.

Every CSV starts with one ``#`` line naming the tool version and a hash of
the run configuration; JSON files carry the same text under ``"_meta"``.
Readers skip ``#`` lines.
"""
from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import polars as pl
from shapely.geometry import mapping

from . import __version__
from .clustering import CommunityAssignment
from .connectivity import PCI_SCHEMA
from .errors import DataError
from .ingest import PRESENCE_SCHEMA
from .places import PlaceLevel, PlaceRegistry

FLOAT_FORMAT = "{:.6g}"


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def header_line(config: dict | None = None) -> str:
    return f"# placeconn {__version__} config={config_hash(config or {})}"


def _format_floats(df: pl.DataFrame) -> pl.DataFrame:
    cols = {}
    for name, dtype in df.schema.items():
        if dtype.is_float():
            vals = df[name].to_list()
            cols[name] = pl.Series(name, [FLOAT_FORMAT.format(v) for v in vals], dtype=pl.Utf8)
    return df.with_columns(**cols) if cols else df


def write_csv(df: pl.DataFrame, path: str | Path, config: dict | None = None) -> Path:
    """CSV with the header comment; floats use 6 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = _format_floats(df)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(header_line(config) + "\n")
        fh.write(out.write_csv(quote_style="necessary", date_format="%Y-%m-%d"))
    return path


def write_json(obj: dict, path: str | Path, config: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"_meta": header_line(config)[2:], **obj}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n", encoding="utf-8")
    return path


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not JSON serialisable: {type(o).__name__}")


def read_csv(path: str | Path, schema: dict | None = None) -> pl.DataFrame:
    path = Path(path)
    if not path.is_file():
        raise DataError(f"missing input file: {path}")
    try:
        return pl.read_csv(path, comment_prefix="#", schema_overrides=schema, infer_schema_length=10000)
    except pl.exceptions.NoDataError:
        return pl.DataFrame(schema=schema or {})
    except pl.exceptions.PolarsError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None


def read_presence(path: str | Path) -> pl.DataFrame:
    df = read_csv(path, {"place": pl.Utf8, "user": pl.Utf8, "date": pl.Utf8})
    _require(df, PRESENCE_SCHEMA, path)
    return df.with_columns(pl.col("date").str.to_date("%Y-%m-%d")).select(list(PRESENCE_SCHEMA))


def read_pci(path: str | Path) -> pl.DataFrame:
    df = read_csv(path, PCI_SCHEMA)
    _require(df, PCI_SCHEMA, path)
    return df.select(list(PCI_SCHEMA))


def read_pairs(path: str | Path) -> pl.DataFrame:
    """Any ``place_i,place_j,...`` pair table (PCI, OD, SCI exports)."""
    df = read_csv(path, {"place_i": pl.Utf8, "place_j": pl.Utf8})
    _require(df, {"place_i": None, "place_j": None}, path)
    return df


def _require(df: pl.DataFrame, cols, path) -> None:
    missing = [c for c in cols if c not in df.columns]
    if missing:
        raise DataError(f"{path}: missing columns {missing}")


def export_geojson(
    values: CommunityAssignment | dict,
    registry: PlaceRegistry,
    path: str | Path | None = None,
    prop: str | None = None,
    level: PlaceLevel | str | None = None,
    config: dict | None = None,
) -> dict:
    """FeatureCollection of the keyed places with one value property each.

    A :class:`CommunityAssignment` is written as ``community``; a plain
    mapping as ``value`` unless ``prop`` says otherwise. Features are sorted
    by code. Every place must exist in the registry with a geometry.
    """
    if isinstance(values, CommunityAssignment):
        data = values.as_dict()
        prop = prop or "community"
    else:
        data = dict(values)
        prop = prop or "value"
    feats = []
    for code in sorted(data):
        place = registry.get(code, level) if level is not None else registry.get(code)
        if place is None:
            raise DataError(f"place {code!r} not in registry")
        if place.geometry is None:
            raise DataError(f"place {code!r} has no geometry")
        v = data[code]
        if isinstance(v, np.generic):
            v = v.item()
        feats.append({
            "type": "Feature",
            "properties": {"code": code, "name": place.name, prop: v},
            "geometry": json.loads(json.dumps(mapping(place.geometry))),
        })
    doc = {"type": "FeatureCollection", "features": feats}
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        out = {"type": "FeatureCollection", "_meta": header_line(config)[2:], "features": feats}
        path.write_text(json.dumps(out, sort_keys=True) + "\n", encoding="utf-8")
    return doc
