"""Command-line entry point: ``placeconn <command> [flags]``.

Settings come from an optional TOML file (``--config``) whose top-level keys
use the long flag names with underscores; a ``[<command>]`` table overrides
them for one command. Flags given on the command line win over both.

Exit codes: 0 success (warnings allowed), 2 configuration error, 3 data error.
"""
from __future__ import annotations

import argparse
import datetime as dt
import logging
import os
import sys
from pathlib import Path

import numpy as np
import polars as pl

from . import __version__
from .analytics import (
    decay_fit,
    focal_pairs,
    join_pairs,
    log10_scaled,
    ols,
    pair_distances,
    pearson_r,
    per_place_correlation,
    same_region_dummy,
)
from .clustering import agglomerate, cut, pci_to_distance
from .connectivity import pci_from_presence
from .errors import ConfigError, DataError
from .export import (
    config_hash,
    export_geojson,
    read_csv,
    read_pairs,
    read_presence,
    write_csv,
    write_json,
)
from .ingest import IngestReport, SourceWhitelist, ingest_files, locate_events, read_events
from .movement import person_day_movements, read_flows, symmetrize_flows, transition_movements
from .places import PlaceLevel, PlaceRegistry, load_registry
from .presence import DEFAULT_SPILL_THRESHOLD

try:  # Python 3.11+
    import tomllib
except ModuleNotFoundError:  # pragma: no cover
    import tomli as tomllib

log = logging.getLogger("placeconn")

# settings that do not change results and so stay out of the config hash
_UNHASHED = {"threads", "out", "config", "verbose", "command", "spill_dir"}

_DEFAULTS = {
    "registry": [],
    "events": [],
    "level": None,
    "from": None,
    "to": None,
    "whitelist": None,
    "out": "out",
    "threads": None,
    "spill_threshold": DEFAULT_SPILL_THRESHOLD,
    "spill_dir": None,
    "include_self": False,
    "transitions": False,
    "scale": 1000.0,
    "k": None,
    "presence": None,
    "matrix": None,
    "column": "pci",
    "flows": None,
    "a": None,
    "b": None,
    "a_col": None,
    "b_col": None,
    "scale_b": None,
    "min_n": 3,
    "region_level": "admin1",
    "table": None,
    "y": None,
    "x": None,
    "no_log": False,
    "focal": None,
    "pairs": "all",
    "assignment": None,
    "values": None,
    "value_col": None,
    "name": None,
}


def _parser() -> argparse.ArgumentParser:
    shared = argparse.ArgumentParser(add_help=False)
    g = shared.add_argument_group("shared")
    g.add_argument("--config", help="TOML settings file; flags override it")
    g.add_argument("--registry", action="append", help="GeoJSON place registry (repeatable)")
    g.add_argument("--events", action="append", help="NDJSON event file (repeatable)")
    g.add_argument("--level", help="place level: country, admin1, county, metro, tract")
    g.add_argument("--from", dest="from", metavar="DATE", help="first day of the window (UTC, inclusive)")
    g.add_argument("--to", metavar="DATE", help="last day of the window (UTC, inclusive)")
    g.add_argument("--out", help="output directory (default: out)")
    g.add_argument("--threads", type=int, help="worker threads (default: all cores)")
    g.add_argument("--whitelist", help="source whitelist file, or 'builtin' for the built-in list")
    g.add_argument("--include-self", action="store_true", default=None, help="keep self-pairs in PCI output")
    g.add_argument("--transitions", action="store_true", default=None,
                   help="movements from consecutive distinct places instead of all pairs per user-day")
    g.add_argument("--scale", type=float, help="multiplier before log10 (default 1000)")
    g.add_argument("--k", help="cluster count, or a comma list such as 20,50,75")
    g.add_argument("--spill-threshold", type=int, help="pairs held in memory before spilling to disk")
    g.add_argument("-v", "--verbose", action="count", default=0)

    p = argparse.ArgumentParser(prog="placeconn", description="Place connectivity from geotagged events.")
    p.add_argument("--version", action="version", version=f"placeconn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    sub.add_parser("ingest", parents=[shared], help="events -> presence tuples")

    s = sub.add_parser("pci", parents=[shared], help="presence tuples -> PCI matrix")
    s.add_argument("--presence", help="presence CSV (default: OUT/presence.csv)")

    s = sub.add_parser("movement", parents=[shared], help="person-day OD matrix")
    s.add_argument("--presence", help="presence CSV (default: OUT/presence.csv)")
    s.add_argument("--flows", help="directed flows CSV to roll up and symmetrise instead")

    s = sub.add_parser("cluster", parents=[shared], help="UPGMA communities from a PCI matrix")
    s.add_argument("--matrix", help="PCI CSV (default: OUT/pci.csv)")
    s.add_argument("--column", help="connectivity column (default: pci)")

    s = sub.add_parser("correlate", parents=[shared], help="log-log Pearson r between two pair tables")
    s.add_argument("--a", help="first pair CSV (default: OUT/pci.csv)")
    s.add_argument("--b", required=False, help="second pair CSV")
    s.add_argument("--a-col", help="value column in A (default: pci)")
    s.add_argument("--b-col", help="value column in B (default: same as A)")
    s.add_argument("--scale-b", type=float, help="multiplier for B before log10 (default: --scale)")
    s.add_argument("--min-n", type=int, help="minimum partners for a per-place r (default 3)")
    s.add_argument("--no-log", action="store_true", default=None, help="correlate raw values")

    s = sub.add_parser("regress", parents=[shared], help="OLS with classical standard errors")
    s.add_argument("--matrix", help="PCI CSV (default: OUT/pci.csv)")
    s.add_argument("--column", help="connectivity column (default: pci)")
    s.add_argument("--region-level", help="level defining the same-region dummy (default admin1)")
    s.add_argument("--table", help="generic mode: CSV with outcome and predictor columns")
    s.add_argument("--y", help="outcome column for --table")
    s.add_argument("--x", help="comma list of predictor columns for --table")
    s.add_argument("--focal", help="with --table: add each place's connectivity to this place as a predictor")

    s = sub.add_parser("decay", parents=[shared], help="power-law distance decay of PCI")
    s.add_argument("--matrix", help="PCI CSV (default: OUT/pci.csv)")
    s.add_argument("--column", help="connectivity column (default: pci)")
    s.add_argument("--focal", help="fit only pairs touching this place")
    s.add_argument("--pairs", choices=["all", "cross", "within"],
                   help="restrict to pairs in different (cross) or the same (within) region")
    s.add_argument("--region-level", help="level for --pairs (default admin1)")

    s = sub.add_parser("export-geojson", parents=[shared], help="per-place values as GeoJSON")
    s.add_argument("--assignment", help="CSV place,community")
    s.add_argument("--values", help="CSV with a place column and a value column")
    s.add_argument("--value-col", help="value column for --values (default: value)")
    s.add_argument("--name", help="output file name (default: derived from the input)")
    return p


# ---------------------------------------------------------------------------
# settings

def _load_config(path: str | None, command: str) -> dict:
    if path is None:
        return {}
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path}: {exc}") from None
    base = {k.replace("-", "_"): v for k, v in doc.items() if not isinstance(v, dict)}
    section = doc.get(command, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config {path}: [{command}] must be a table")
    base.update({k.replace("-", "_"): v for k, v in section.items()})
    unknown = sorted(set(base) - set(_DEFAULTS))
    if unknown:
        raise ConfigError(f"config {path}: unknown keys {unknown}")
    base_dir = Path(path).resolve().parent
    return _resolve_paths(base, base_dir)


_PATH_KEYS = ("registry", "events", "whitelist", "out", "presence", "matrix", "flows", "a", "b",
              "table", "assignment", "values", "spill_dir")


def _resolve_paths(cfg: dict, base: Path) -> dict:
    # relative paths in a config file are relative to the file
    out = dict(cfg)
    for key in _PATH_KEYS:
        v = out.get(key)
        if v is None or (key == "whitelist" and v == "builtin"):
            continue
        if isinstance(v, list):
            out[key] = [str(base / x) for x in v]
        else:
            out[key] = str(base / v)
    return out


def settings(args: argparse.Namespace) -> dict:
    cfg = dict(_DEFAULTS)
    cfg.update(_load_config(args.config, args.command))
    for key, value in vars(args).items():
        if key in ("config", "command", "verbose"):
            continue
        if value is not None:
            cfg[key] = value
    for key in ("registry", "events"):
        if isinstance(cfg[key], str):
            cfg[key] = [cfg[key]]
    if cfg["level"] is not None:
        try:
            cfg["level"] = PlaceLevel.parse(cfg["level"]).value
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    for key in ("from", "to"):
        v = cfg[key]
        if v is not None and not isinstance(v, dt.date):
            try:
                v = dt.date.fromisoformat(str(v))
            except ValueError:
                raise ConfigError(f"--{key}: expected YYYY-MM-DD, got {cfg[key]!r}") from None
        cfg[key] = None if v is None else v.isoformat()
    if cfg["from"] and cfg["to"] and cfg["from"] > cfg["to"]:
        raise ConfigError("window start is after window end")
    if cfg["threads"] is None:
        cfg["threads"] = os.cpu_count() or 1
    if cfg["threads"] < 1:
        raise ConfigError("--threads must be at least 1")
    if not cfg["scale"] > 0 or (cfg["scale_b"] is not None and not cfg["scale_b"] > 0):
        raise ConfigError("scale factors must be positive")
    if cfg["spill_threshold"] < 1:
        raise ConfigError("--spill-threshold must be positive")
    cfg["k"] = _parse_k(cfg["k"])
    return cfg


def _parse_k(value) -> list[int] | None:
    if value is None:
        return None
    items = value if isinstance(value, list) else str(value).split(",")
    try:
        ks = [int(x) for x in items]
    except ValueError:
        raise ConfigError(f"--k: expected integers, got {value!r}") from None
    if any(k < 1 for k in ks):
        raise ConfigError("--k values must be positive")
    return ks


def _hashed(cfg: dict, command: str) -> dict:
    h = {k: v for k, v in cfg.items() if k not in _UNHASHED}
    h["command"] = command
    return h


def _out(cfg: dict) -> Path:
    out = Path(cfg["out"])
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"output directory {out} is not writable: {exc.strerror}") from None
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")
    return out


def _need(cfg: dict, key: str, what: str):
    if not cfg.get(key):
        raise ConfigError(f"{what} is required (--{key.replace('_', '-')} or config key {key!r})")
    return cfg[key]


def _registry(cfg: dict) -> PlaceRegistry:
    paths = _need(cfg, "registry", "a place registry")
    reg = PlaceRegistry()
    for p in paths:
        if not Path(p).is_file():
            raise DataError(f"registry file not found: {p}")
        load_registry(p, registry=reg)
    return reg


def _whitelist(cfg: dict) -> SourceWhitelist | None:
    w = cfg["whitelist"]
    if w is None:
        return None
    if w == "builtin":
        return SourceWhitelist.human_sources()
    if not Path(w).is_file():
        raise ConfigError(f"whitelist file not found: {w}")
    return SourceWhitelist.from_file(w)


def _window(cfg: dict):
    if cfg["from"] is None and cfg["to"] is None:
        return None
    return cfg["from"], cfg["to"]


# ---------------------------------------------------------------------------
# commands

def cmd_ingest(cfg: dict) -> dict:
    level = _need(cfg, "level", "a place level")
    events = _need(cfg, "events", "at least one event file")
    reg = _registry(cfg)
    if PlaceLevel.parse(level) not in reg.levels:
        raise DataError(f"registry has no places at level {level!r}")
    out = _out(cfg)
    presence, report = ingest_files(events, reg, level, _window(cfg), _whitelist(cfg), cfg["threads"])
    h = _hashed(cfg, "ingest")
    write_csv(presence, out / "presence.csv", h)
    write_json(report.to_dict(), out / "ingest_report.json", h)
    return {"presence": str(out / "presence.csv"), **report.to_dict()}


def cmd_pci(cfg: dict) -> dict:
    out = _out(cfg)
    presence = read_presence(cfg["presence"] or out / "presence.csv")
    matrix = pci_from_presence(
        presence, cfg["threads"], cfg["include_self"],
        spill_threshold=cfg["spill_threshold"], spill_dir=cfg["spill_dir"],
    )
    write_csv(matrix, out / "pci.csv", _hashed(cfg, "pci"))
    return {"pairs": matrix.height, "matrix": str(out / "pci.csv")}


def cmd_movement(cfg: dict) -> dict:
    out = _out(cfg)
    h = _hashed(cfg, "movement")
    if cfg["flows"]:
        level = _need(cfg, "level", "a place level for flow roll-up")
        od = symmetrize_flows(read_flows(cfg["flows"]), _registry(cfg), level)
        name = "od_flows.csv"
    elif cfg["transitions"]:
        level = _need(cfg, "level", "a place level")
        events = _need(cfg, "events", "event files (--transitions needs event times)")
        for p in events:
            if not Path(p).is_file():
                raise DataError(f"event file not found: {p}")
        parse_report = IngestReport()
        located, _ = locate_events(read_events(events, parse_report), _registry(cfg), level,
                                   _window(cfg), _whitelist(cfg))
        if parse_report.rejected["parse"]:
            log.warning("%d malformed event lines skipped", parse_report.rejected["parse"])
        od = transition_movements(located)
        name = "od_transitions.csv"
    else:
        presence = read_presence(cfg["presence"] or out / "presence.csv")
        od = person_day_movements(presence, cfg["threads"])
        name = "od.csv"
    write_csv(od, out / name, h)
    return {"pairs": od.height, "od": str(out / name)}


def cmd_cluster(cfg: dict) -> dict:
    out = _out(cfg)
    ks = _need(cfg, "k", "a cluster count")
    matrix = read_pairs(cfg["matrix"] or out / "pci.csv")
    col = cfg["column"]
    if col not in matrix.columns:
        raise DataError(f"matrix has no column {col!r}")
    try:
        dist = pci_to_distance(matrix, column=col)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    if dist.n < 2:
        raise DataError("need at least 2 places to cluster")
    for k in ks:
        if k > dist.n:
            raise ConfigError(f"--k {k} exceeds the {dist.n} places in the matrix")
    dendro = agglomerate(dist)
    h = _hashed(cfg, "cluster")
    write_csv(dendro.to_frame(), out / "dendrogram.csv", h)
    write_csv(pl.DataFrame({"leaf": range(dist.n), "place": dist.places}), out / "leaves.csv", h)
    reg = _registry(cfg) if cfg["registry"] else None
    files = []
    for k in ks:
        assignment = cut(dendro, k)
        path = write_csv(assignment.to_frame(), out / f"communities_k{k}.csv", h)
        files.append(str(path))
        if reg is not None:
            gj = out / f"communities_k{k}.geojson"
            export_geojson(assignment, reg, gj, level=cfg["level"], config=h)
            files.append(str(gj))
    return {"places": dist.n, "files": files}


def cmd_correlate(cfg: dict) -> dict:
    out = _out(cfg)
    a = read_pairs(cfg["a"] or out / "pci.csv")
    b = read_pairs(_need(cfg, "b", "a second pair table"))
    a_col = cfg["a_col"] or "pci"
    b_col = cfg["b_col"] or a_col
    for df, c, name in ((a, a_col, "A"), (b, b_col, "B")):
        if c not in df.columns:
            raise DataError(f"table {name} has no column {c!r}")
    log_ = not cfg["no_log"]
    sa = cfg["scale"]
    sb = cfg["scale_b"] if cfg["scale_b"] is not None else sa
    a, b = _canonical(a), _canonical(b)
    series = join_pairs(a, b, a_col, b_col, sa, sb, log_)
    if series.n < 3:
        raise DataError(f"only {series.n} pairs with positive values in both tables")
    try:
        r = pearson_r(series.x, series.y)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    per_place, omitted = per_place_correlation(a, b, a_col, b_col, sa, sb, log_, cfg["min_n"])
    h = _hashed(cfg, "correlate")
    rows = sorted(per_place.items())
    write_csv(
        pl.DataFrame(
            {"place": [p for p, _ in rows], "r": [v[0] for _, v in rows], "n": [v[1] for _, v in rows]},
            schema={"place": pl.Utf8, "r": pl.Float64, "n": pl.Int64},
        ),
        out / "correlation_by_place.csv", h,
    )
    summary = {"r": r, "n": series.n, "excluded_nonpositive": series.excluded,
               "places": len(per_place), "places_omitted": len(omitted)}
    write_json(summary, out / "correlation.json", h)
    return summary


def _canonical(df: pl.DataFrame) -> pl.DataFrame:
    # accept either orientation; drop self-pairs
    return (
        df.filter(pl.col("place_i") != pl.col("place_j"))
        .with_columns(
            pl.min_horizontal("place_i", "place_j").alias("_i"),
            pl.max_horizontal("place_i", "place_j").alias("_j"),
        )
        .drop("place_i", "place_j")
        .rename({"_i": "place_i", "_j": "place_j"})
    )


def cmd_regress(cfg: dict) -> dict:
    out = _out(cfg)
    if cfg["table"]:
        df = read_csv(cfg["table"], {"place": pl.Utf8})
        y_col = _need(cfg, "y", "an outcome column")
        x_cols = [c for c in str(cfg["x"] or "").split(",") if c]
        if cfg["focal"]:
            # covariate mode: add the focal place's connectivity to each place
            if "place" not in df.columns:
                raise DataError("covariate table needs a place column")
            col = cfg["column"]
            matrix = read_pairs(cfg["matrix"] or out / "pci.csv")
            if col not in matrix.columns:
                raise DataError(f"matrix has no column {col!r}")
            name = f"{col}_x{cfg['scale']:g}"
            link = focal_pairs(matrix, cfg["focal"], col).select(
                place=pl.col("partner"), **{name: pl.col("value").cast(pl.Float64) * cfg["scale"]}
            )
            df = df.join(link, on="place", how="left").with_columns(pl.col(name).fill_null(0.0))
            x_cols.append(name)
        if not x_cols:
            raise ConfigError("predictor columns are required (--x, or --focal for a connectivity column)")
        for c in [y_col, *x_cols]:
            if c not in df.columns:
                raise DataError(f"table has no column {c!r}")
        df = df.select([y_col, *x_cols]).drop_nulls()
        y = df[y_col].to_numpy().astype(np.float64)
        X = df.select(x_cols).to_numpy().astype(np.float64)
        names = x_cols
    else:
        matrix = _canonical(read_pairs(cfg["matrix"] or out / "pci.csv"))
        col = cfg["column"]
        if col not in matrix.columns:
            raise DataError(f"matrix has no column {col!r}")
        matrix = matrix.filter(pl.col(col) > 0).sort("place_i", "place_j")
        reg = _registry(cfg)
        pairs = list(zip(matrix["place_i"].to_list(), matrix["place_j"].to_list()))
        same = same_region_dummy(pairs, reg, cfg["region_level"])
        dist = pair_distances(pairs, reg)
        keep = dist > 0
        y = log10_scaled(matrix[col].to_numpy()[keep], cfg["scale"])
        X = np.column_stack([same[keep], np.log10(dist[keep])])
        names = [f"same_{PlaceLevel.parse(cfg['region_level']).value}", "log_distance"]
    try:
        res = ols(y, X, names)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    h = _hashed(cfg, "regress")
    write_json(res.to_dict(), out / "regression.json", h)
    (out / "regression.txt").write_text(f"# placeconn {__version__} config={config_hash(h)}\n{res.table()}\n",
                                        encoding="utf-8")
    return res.to_dict()


def cmd_decay(cfg: dict) -> dict:
    out = _out(cfg)
    matrix = _canonical(read_pairs(cfg["matrix"] or out / "pci.csv"))
    col = cfg["column"]
    if col not in matrix.columns:
        raise DataError(f"matrix has no column {col!r}")
    matrix = matrix.filter(pl.col(col) > 0).sort("place_i", "place_j")
    if cfg["focal"]:
        f = cfg["focal"]
        matrix = matrix.filter((pl.col("place_i") == f) | (pl.col("place_j") == f))
    reg = _registry(cfg)
    pairs = list(zip(matrix["place_i"].to_list(), matrix["place_j"].to_list()))
    values = matrix[col].to_numpy().astype(np.float64)
    if cfg["pairs"] != "all" and pairs:
        same = same_region_dummy(pairs, reg, cfg["region_level"]).astype(bool)
        sel = same if cfg["pairs"] == "within" else ~same
        pairs = [p for p, s in zip(pairs, sel) if s]
        values = values[sel]
    dist = pair_distances(pairs, reg) if pairs else np.zeros(0)
    keep = dist > 0
    try:
        fit = decay_fit(values[keep], dist[keep])
    except ValueError as exc:
        raise DataError(str(exc)) from None
    summary = {"amplitude": fit.amplitude, "exponent": fit.exponent, "r2": fit.r2, "n": fit.n,
               "pairs": cfg["pairs"], "focal": cfg["focal"]}
    h = _hashed(cfg, "decay")
    write_json(summary, out / "decay.json", h)
    # per-place Pearson r between log connectivity and log distance
    lx = np.log10(dist[keep])
    ly = np.log10(values[keep])
    kept = [p for p, k in zip(pairs, keep) if k]
    by_place: dict[str, list[int]] = {}
    for n, (a, b) in enumerate(kept):
        by_place.setdefault(a, []).append(n)
        by_place.setdefault(b, []).append(n)
    rows = []
    for place in sorted(by_place):
        idx = by_place[place]
        if len(idx) < cfg["min_n"]:
            continue
        try:
            rows.append((place, pearson_r(lx[idx], ly[idx]), len(idx)))
        except ValueError:
            continue
    write_csv(
        pl.DataFrame(rows, schema={"place": pl.Utf8, "r": pl.Float64, "n": pl.Int64}, orient="row"),
        out / "decay_by_place.csv", h,
    )
    return summary


def cmd_export_geojson(cfg: dict) -> dict:
    out = _out(cfg)
    reg = _registry(cfg)
    h = _hashed(cfg, "export-geojson")
    if cfg["assignment"]:
        df = read_csv(cfg["assignment"], {"place": pl.Utf8})
        if not {"place", "community"} <= set(df.columns):
            raise DataError("assignment file needs columns place, community")
        data = dict(zip(df["place"].to_list(), (int(x) for x in df["community"].to_list())))
        prop, src = "community", cfg["assignment"]
    elif cfg["values"]:
        vcol = cfg["value_col"] or "value"
        df = read_csv(cfg["values"], {"place": pl.Utf8})
        if "place" not in df.columns or vcol not in df.columns:
            raise DataError(f"values file needs columns place, {vcol}")
        data = dict(zip(df["place"].to_list(), df[vcol].to_list()))
        prop, src = "value", cfg["values"]
    else:
        raise ConfigError("export-geojson needs --assignment or --values")
    name = cfg["name"] or (Path(src).stem + ".geojson")
    doc = export_geojson(data, reg, out / name, prop=prop, level=cfg["level"], config=h)
    return {"features": len(doc["features"]), "file": str(out / name)}


_HANDLERS = {
    "ingest": cmd_ingest,
    "pci": cmd_pci,
    "movement": cmd_movement,
    "cluster": cmd_cluster,
    "correlate": cmd_correlate,
    "regress": cmd_regress,
    "decay": cmd_decay,
    "export-geojson": cmd_export_geojson,
}


def main(argv: list[str] | None = None) -> int:
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on bad flags, 0 on --help
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(args.verbose, 2),
        format="placeconn: %(levelname)s: %(message)s",
    )
    try:
        cfg = settings(args)
        summary = _HANDLERS[args.command](cfg)
    except ConfigError as exc:
        print(f"placeconn: config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"placeconn: data error: {exc}", file=sys.stderr)
        return 3
    for key, value in summary.items():
        if not isinstance(value, (dict, list)):
            print(f"{key}: {value}")
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
