"""Synthetic places, presence logs and event files for tests, demos and benchmarks."""
from __future__ import annotations

import datetime as dt
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import polars as pl
import shapely
from shapely.geometry import mapping

from .places import Place, PlaceLevel, PlaceRegistry, haversine_miles

EPOCH = dt.date(1970, 1, 1)


@dataclass
class GridWorld:
    """Rectangular grid of square counties grouped into rectangular regions."""

    registry: PlaceRegistry
    counties: list[Place]
    regions: list[Place]
    region_of: dict[str, str]  # county code -> region code
    cell_deg: float


def grid_world(
    nx: int = 10,
    ny: int = 10,
    block: tuple[int, int] = (5, 5),
    cell_deg: float = 0.5,
    origin: tuple[float, float] = (30.0, -100.0),
    level: PlaceLevel = PlaceLevel.COUNTY,
    region_level: PlaceLevel = PlaceLevel.ADMIN1,
) -> GridWorld:
    """``nx * ny`` square cells; regions are ``block``-sized tiles of cells.

    County codes are ``RRCCCC`` (region number, cell number) so the smallest
    code in a region belongs to its first cell.
    """
    lat0, lon0 = origin
    bx, by = block
    counties, regions = [], []
    region_of = {}
    n_rx = -(-nx // bx)
    cells_by_region: dict[str, list] = {}
    # neighbours share edges exactly
    xs = [lon0 + i * cell_deg for i in range(nx + 1)]
    ys = [lat0 + i * cell_deg for i in range(ny + 1)]
    for iy in range(ny):
        for ix in range(nx):
            r = (iy // by) * n_rx + (ix // bx)
            rcode = f"{r:02d}"
            code = f"{rcode}{iy * nx + ix:04d}"
            x0, x1, y0, y1 = xs[ix], xs[ix + 1], ys[iy], ys[iy + 1]
            geom = shapely.box(x0, y0, x1, y1)
            counties.append(Place(code, level, f"cell {ix},{iy}", ((y0 + y1) / 2, (x0 + x1) / 2), rcode, geom))
            region_of[code] = rcode
            cells_by_region.setdefault(rcode, []).append(geom)
    for rcode, geoms in sorted(cells_by_region.items()):
        geom = shapely.union_all(geoms)
        c = geom.centroid
        regions.append(Place(rcode, region_level, f"region {rcode}", (c.y, c.x), None, geom))
    reg = PlaceRegistry()
    reg.add_places(regions)
    reg.add_places(counties)
    return GridWorld(reg, reg.places(level), regions, region_of, cell_deg)


def registry_geojson(places: list[Place]) -> dict:
    """FeatureCollection in the registry file layout."""
    feats = []
    for p in places:
        props = {
            "code": p.code, "level": p.level.value, "name": p.name,
            "centroid_lat": p.centroid[0], "centroid_lon": p.centroid[1],
        }
        if p.parent_code is not None:
            props["parent_code"] = p.parent_code
        feats.append({
            "type": "Feature",
            "properties": props,
            "geometry": None if p.geometry is None else mapping(p.geometry),
        })
    return {"type": "FeatureCollection", "features": feats}


def write_registry(path: str | Path, places: list[Place]) -> Path:
    path = Path(path)
    path.write_text(json.dumps(registry_geojson(places)), encoding="utf-8")
    return path


def random_presence(
    rng: np.random.Generator,
    n_places: int = 20,
    n_users: int = 1000,
    n_days: int = 90,
    mean_visits: float = 6.0,
    start: dt.date = dt.date(2019, 1, 1),
) -> pl.DataFrame:
    """Random presence tuples with a skewed place popularity.

    Some tuples are drawn twice on purpose; the frame is not deduplicated.
    """
    popularity = rng.pareto(1.5, n_places) + 0.2
    popularity /= popularity.sum()
    visits = rng.poisson(mean_visits, n_users) + 1
    users = np.repeat(np.arange(n_users), visits)
    places = rng.choice(n_places, size=users.size, p=popularity)
    days = rng.integers(0, n_days, users.size)
    codes = np.array([f"P{k:03d}" for k in range(n_places)], dtype=object)
    base = (start - EPOCH).days
    return pl.DataFrame(
        {
            "place": pl.Series(codes[places], dtype=pl.Utf8),
            "user": pl.Series([f"u{u:05d}" for u in users], dtype=pl.Utf8),
            "date": pl.Series(days + base, dtype=pl.Int32).cast(pl.Date),
        }
    )


def _random_points_in(geom, n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Uniform interior points of a box-like polygon (rejection sampling)."""
    minx, miny, maxx, maxy = geom.bounds
    lats, lons = [], []
    need = n
    while need > 0:
        x = rng.uniform(minx, maxx, need * 2 + 4)
        y = rng.uniform(miny, maxy, need * 2 + 4)
        inside = shapely.contains_xy(geom, x, y)
        lons.extend(x[inside][:need])
        lats.extend(y[inside][:need])
        need = n - len(lats)
    return np.array(lats[:n]), np.array(lons[:n])


def _ts_strings(days: np.ndarray, secs: np.ndarray) -> list[str]:
    base = np.datetime64("1970-01-01T00:00:00", "s")
    stamps = base + days.astype("timedelta64[D]") + secs.astype("timedelta64[s]")
    return [s + "Z" for s in np.datetime_as_string(stamps, unit="s")]


@dataclass
class GravityStudy:
    world: GridWorld
    events: pl.DataFrame  # columns of the event schema, ready for NDJSON
    population: dict[str, float]
    exponent: float
    boost: float


def gravity_study(
    rng: np.random.Generator,
    world: GridWorld | None = None,
    exponent: float = 1.2,
    boost: float = 4.0,
    residents_per_pop: float = 15000.0,
    pair_scale: float = 200.0,
    start: dt.date = dt.date(2019, 1, 1),
    n_days: int = 365,
) -> GravityStudy:
    """Events from a gravity model with a same-region boost.

    Each place gets ``residents_per_pop * pop`` resident users seen only at
    home. For each pair, ``Poisson(pair_scale * pop_i * pop_j * (d / d0)**-exponent
    * boost_if_same_region)`` travellers are seen at both places, where ``d0``
    is the smallest centroid distance. So the expected shared-user count
    follows the planted gravity law and the regions are the planted
    communities.
    """
    world = world or grid_world()
    places = world.counties
    n = len(places)
    codes = [p.code for p in places]
    pop = rng.lognormal(0.0, 0.5, n)
    lat = np.array([p.centroid[0] for p in places])
    lon = np.array([p.centroid[1] for p in places])
    d = haversine_miles(lat[:, None], lon[:, None], lat[None, :], lon[None, :])
    iu, ju = np.triu_indices(n, 1)
    dij = d[iu, ju]
    d0 = dij.min()
    same = np.array([world.region_of[codes[a]] == world.region_of[codes[b]] for a, b in zip(iu, ju)])
    lam = pair_scale * pop[iu] * pop[ju] * (dij / d0) ** (-exponent) * np.where(same, boost, 1.0)
    travellers = rng.poisson(lam)

    users, place_idx = [], []
    uid = 0
    residents = np.maximum(1, np.round(residents_per_pop * pop)).astype(np.int64)
    for k in range(n):
        users.append(np.arange(uid, uid + residents[k]))
        place_idx.append(np.full(residents[k], k))
        uid += residents[k]
    for a, b, t in zip(iu, ju, travellers):
        if t == 0:
            continue
        ids = np.arange(uid, uid + t)
        uid += t
        users.extend([ids, ids])
        place_idx.extend([np.full(t, a), np.full(t, b)])
    users = np.concatenate(users)
    place_idx = np.concatenate(place_idx)
    lats = np.empty(users.size)
    lons = np.empty(users.size)
    for k in range(n):
        sel = np.flatnonzero(place_idx == k)
        lats[sel], lons[sel] = _random_points_in(places[k].geometry, sel.size, rng)
    base = (start - EPOCH).days
    days = base + rng.integers(0, n_days, users.size)
    secs = rng.integers(0, 86400, users.size)
    events = pl.DataFrame(
        {
            "user": [f"g{u}" for u in users],
            "ts": _ts_strings(days, secs),
            "lat": np.round(lats, 6),
            "lon": np.round(lons, 6),
            "res": "coord",
            "source": "Twitter for iPhone",
        }
    )
    return GravityStudy(world, events, dict(zip(codes, pop)), exponent, boost)


def write_events(path: str | Path, events: pl.DataFrame) -> Path:
    path = Path(path)
    events.write_ndjson(path)
    return path


def bulk_events(
    rng: np.random.Generator,
    world: GridWorld,
    n_events: int,
    n_users: int,
    places_per_user: int = 4,
    start: dt.date = dt.date(2019, 1, 1),
    n_days: int = 365,
) -> pl.DataFrame:
    """Many coordinate events for throughput runs.

    Each user has a small home range of grid cells near a random anchor and
    posts from random points in them on random days.
    """
    places = world.counties
    n = len(places)
    bounds = np.array([p.geometry.bounds for p in places])  # minx, miny, maxx, maxy
    anchors = rng.integers(0, n, n_users)
    offsets = rng.integers(-3, 4, (n_users, places_per_user))
    ranges = np.clip(anchors[:, None] + offsets, 0, n - 1)
    ev_user = rng.integers(0, n_users, n_events)
    ev_place = ranges[ev_user, rng.integers(0, places_per_user, n_events)]
    b = bounds[ev_place]
    lon = b[:, 0] + rng.uniform(0.001, 0.999, n_events) * (b[:, 2] - b[:, 0])
    lat = b[:, 1] + rng.uniform(0.001, 0.999, n_events) * (b[:, 3] - b[:, 1])
    base = (start - EPOCH).days
    days = base + rng.integers(0, n_days, n_events)
    secs = rng.integers(0, 86400, n_events)
    stamps = (
        np.datetime64("1970-01-01T00:00:00", "s")
        + days.astype("timedelta64[D]")
        + secs.astype("timedelta64[s]")
    )
    user = pl.select(pl.format("u{}", pl.lit(pl.Series(ev_user)).cast(pl.Utf8).str.zfill(7))).to_series()
    return pl.DataFrame(
        {
            "user": user,
            "ts": pl.Series(stamps.astype("datetime64[ms]")).dt.strftime("%Y-%m-%dT%H:%M:%SZ"),
            "lat": np.round(lat, 5),
            "lon": np.round(lon, 5),
            "res": "coord",
            "source": "Twitter for iPhone",
        }
    )


def write_bulk_events(
    path: str | Path,
    rng: np.random.Generator,
    world: GridWorld,
    n_events: int,
    n_users: int,
    slices: int = 10,
) -> Path:
    """Write :func:`bulk_events` output in slices to keep memory flat.

    Each slice draws its own users from the same id range, so a user can
    appear in several slices.
    """
    path = Path(path)
    sizes = [n_events // slices + (k < n_events % slices) for k in range(slices)]
    with open(path, "wb") as fh:
        for size in sizes:
            if size:
                bulk_events(rng, world, size, n_users).write_ndjson(fh)
    return path
