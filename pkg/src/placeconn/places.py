"""Place hierarchy, point-in-polygon assignment and centroid distances."""
from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import shapely
from shapely import STRtree
from shapely.geometry import shape

from .errors import DataError

log = logging.getLogger(__name__)

EARTH_RADIUS_MILES = 3958.8


class PlaceLevel(enum.Enum):
    COUNTRY = "country"
    ADMIN1 = "admin1"
    COUNTY = "county"
    METRO = "metro"
    TRACT = "tract"

    @property
    def rank(self) -> int:
        # county and metro are alternative partitions of the same rank
        return _LEVEL_RANK[self]

    @classmethod
    def parse(cls, value: "str | PlaceLevel") -> "PlaceLevel":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ValueError(f"unknown place level {value!r}") from None


_LEVEL_RANK = {
    PlaceLevel.COUNTRY: 0,
    PlaceLevel.ADMIN1: 1,
    PlaceLevel.COUNTY: 2,
    PlaceLevel.METRO: 2,
    PlaceLevel.TRACT: 3,
}


class SpatialResolution(enum.Enum):
    """Granularity of an event's geotag, coarsest first."""

    COUNTRY = "country"
    ADMIN1 = "admin1"
    CITY = "city"
    NEIGHBORHOOD_POI = "neighborhood_poi"
    COORD = "coord"

    @property
    def rank(self) -> int:
        return _RES_RANK[self]


_RES_RANK = {r: i for i, r in enumerate(SpatialResolution)}


def resolution_admits(res: SpatialResolution | str, level: PlaceLevel | str) -> bool:
    """Whether an event geotagged at ``res`` may be used for PCI at ``level``.

    Country PCI takes every event, admin1 drops country-level geotags,
    county/metro additionally drop admin1 geotags, and tract level only
    takes coordinates and neighborhood/POI geotags.
    """
    if not isinstance(res, SpatialResolution):
        res = SpatialResolution(res)
    return res.rank >= PlaceLevel.parse(level).rank


def haversine_miles(lat1, lon1, lat2, lon2):
    """Great-circle distance in miles; accepts scalars or arrays."""
    p1, p2 = np.radians(lat1), np.radians(lat2)
    dphi = p2 - p1
    dlmb = np.radians(lon2) - np.radians(lon1)
    a = np.sin(dphi / 2) ** 2 + np.cos(p1) * np.cos(p2) * np.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_MILES * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


@dataclass(frozen=True)
class Place:
    code: str
    level: PlaceLevel
    name: str
    centroid: tuple[float, float]  # (lat, lon)
    parent_code: str | None = None
    geometry: object | None = field(default=None, compare=False, repr=False)


def centroid_distance(a: Place, b: Place) -> float:
    """Haversine distance between the two centroids, in miles."""
    if a.centroid == b.centroid:
        return 0.0
    return float(haversine_miles(a.centroid[0], a.centroid[1], b.centroid[0], b.centroid[1]))


class _LevelIndex:
    """Places of one level, sorted by code, plus an STRtree over geometries."""

    def __init__(self, places: list[Place]):
        self.places = sorted(places, key=lambda p: p.code)
        self.codes = [p.code for p in self.places]
        self.by_code = {p.code: i for i, p in enumerate(self.places)}
        with_geom = [i for i, p in enumerate(self.places) if p.geometry is not None]
        self.geom_index = np.array(with_geom, dtype=np.int64)
        self.tree = STRtree([self.places[i].geometry for i in with_geom]) if with_geom else None


class PlaceRegistry:
    """Immutable-after-load multi-level place store.

    Lookups (``assign_point``, ``assign_points``, ``rollup``) are read-only and
    safe to call from several threads at once.
    """

    def __init__(self):
        self._levels: dict[PlaceLevel, _LevelIndex] = {}

    # -- construction ---------------------------------------------------
    def add_places(self, places: list[Place], check_overlap: bool = True) -> None:
        by_level: dict[PlaceLevel, list[Place]] = {}
        for p in places:
            by_level.setdefault(p.level, []).append(p)
        for level, new in by_level.items():
            existing = self._levels[level].places if level in self._levels else []
            seen = {p.code for p in existing}
            for p in new:
                if p.code in seen:
                    raise DataError(f"duplicate place code {p.code!r} at level {level.value}")
                seen.add(p.code)
            idx = _LevelIndex(existing + new)
            if check_overlap:
                _reject_overlaps(idx)
            self._levels[level] = idx

    # -- queries --------------------------------------------------------
    @property
    def levels(self) -> list[PlaceLevel]:
        return sorted(self._levels, key=lambda lv: (lv.rank, lv.value))

    def places(self, level: PlaceLevel | str) -> list[Place]:
        level = PlaceLevel.parse(level)
        return list(self._levels[level].places) if level in self._levels else []

    def codes(self, level: PlaceLevel | str) -> list[str]:
        level = PlaceLevel.parse(level)
        return list(self._levels[level].codes) if level in self._levels else []

    def __len__(self) -> int:
        return sum(len(ix.places) for ix in self._levels.values())

    def get(self, code: str, level: PlaceLevel | str | None = None) -> Place | None:
        """Look a code up at ``level``, or at the finest level holding it."""
        if level is None:
            for lv in reversed(self.levels):
                p = self.get(code, lv)
                if p is not None:
                    return p
            return None
        ix = self._levels.get(PlaceLevel.parse(level))
        if ix is None or code not in ix.by_code:
            return None
        return ix.places[ix.by_code[code]]

    def __getitem__(self, code: str) -> Place:
        p = self.get(code)
        if p is None:
            raise KeyError(code)
        return p

    def parent(self, place: Place) -> Place | None:
        if place.parent_code is None:
            return None
        for lv in reversed(self.levels):
            if lv.rank < place.level.rank:
                p = self.get(place.parent_code, lv)
                if p is not None:
                    return p
        return None

    def rollup(self, code: str, level: PlaceLevel | str) -> str | None:
        """Follow parent links from ``code`` up to ``level``.

        Returns None when the chain breaks or never reaches the level.
        """
        level = PlaceLevel.parse(level)
        ix = self._levels.get(level)
        if ix is None:
            return None
        if code in ix.by_code:
            return code
        p = self.get(code)
        while p is not None and p.level.rank > level.rank:
            p = self.parent(p)
        if p is not None and p.level == level:
            return p.code
        return None

    def assign_point(self, lat: float, lon: float, level: PlaceLevel | str) -> Place | None:
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            raise ValueError(f"coordinates out of range: ({lat}, {lon})")
        level = PlaceLevel.parse(level)
        idx = self.assign_points(np.array([lat]), np.array([lon]), level)[0]
        return None if idx < 0 else self._levels[level].places[idx]

    def assign_points(self, lat, lon, level: PlaceLevel | str) -> np.ndarray:
        """Vectorised point assignment.

        Returns, per point, the index into ``codes(level)`` of the containing
        place, or -1. Points on a shared boundary go to the smallest code.
        Out-of-range coordinates are treated as misses.
        """
        level = PlaceLevel.parse(level)
        lat = np.asarray(lat, dtype=np.float64)
        lon = np.asarray(lon, dtype=np.float64)
        out = np.full(lat.shape, -1, dtype=np.int64)
        ix = self._levels.get(level)
        if ix is None or ix.tree is None or lat.size == 0:
            return out
        ok = (np.abs(lat) <= 90.0) & (np.abs(lon) <= 180.0)
        sel = np.flatnonzero(ok)
        if sel.size == 0:
            return out
        pts = shapely.points(lon[sel], lat[sel])
        pt_i, geom_i = ix.tree.query(pts, predicate="intersects")
        if pt_i.size == 0:
            return out
        place_i = ix.geom_index[geom_i]
        # smallest place index per point == smallest code (places sorted by code)
        best = np.full(sel.size, np.iinfo(np.int64).max, dtype=np.int64)
        np.minimum.at(best, pt_i, place_i)
        hit = best != np.iinfo(np.int64).max
        out[sel[hit]] = best[hit]
        return out


def _reject_overlaps(ix: _LevelIndex) -> None:
    if ix.tree is None or len(ix.geom_index) < 2:
        return
    geoms = ix.tree.geometries
    a, b = ix.tree.query(geoms, predicate="intersects")
    keep = a < b
    a, b = a[keep], b[keep]
    if a.size == 0:
        return
    interior = shapely.relate_pattern(geoms[a], geoms[b], "T********")
    if np.any(interior):
        k = int(np.flatnonzero(interior)[0])
        pa = ix.places[ix.geom_index[a[k]]].code
        pb = ix.places[ix.geom_index[b[k]]].code
        raise DataError(f"overlapping geometries at one level: {pa!r} and {pb!r}")


_REQUIRED = ("code", "name", "centroid_lat", "centroid_lon")


def _feature_to_place(feat: dict, level: PlaceLevel | None, n: int) -> Place:
    props = feat.get("properties") or {}
    for key in _REQUIRED:
        if props.get(key) is None:
            raise DataError(f"feature {n}: missing required property {key!r}")
    flevel = props.get("level")
    if flevel is not None:
        flevel = PlaceLevel.parse(flevel)
        if level is not None and flevel != level:
            raise DataError(
                f"feature {n} ({props['code']}): level {flevel.value!r} does not match {level.value!r}"
            )
    elif level is None:
        raise DataError(f"feature {n}: no level property and no level given")
    lvl = flevel or level
    geom = None
    if feat.get("geometry"):
        try:
            geom = shape(feat["geometry"])
        except Exception as exc:  # shapely raises several types here
            raise DataError(f"feature {n} ({props['code']}): malformed geometry: {exc}") from None
        if geom.geom_type not in ("Polygon", "MultiPolygon") or not geom.is_valid or geom.is_empty:
            raise DataError(f"feature {n} ({props['code']}): malformed geometry")
    lat, lon = float(props["centroid_lat"]), float(props["centroid_lon"])
    if not (-90 <= lat <= 90 and -180 <= lon <= 180):
        raise DataError(f"feature {n} ({props['code']}): centroid out of range")
    if geom is not None and not geom.covers(shapely.Point(lon, lat)):
        log.warning("place %s: centroid lies outside its geometry", props["code"])
    parent = props.get("parent_code")
    return Place(
        code=str(props["code"]),
        level=lvl,
        name=str(props["name"]),
        centroid=(lat, lon),
        parent_code=None if parent in (None, "") else str(parent),
        geometry=geom,
    )


def load_registry(
    path: str | Path,
    level: PlaceLevel | str | None = None,
    registry: PlaceRegistry | None = None,
) -> PlaceRegistry:
    """Load a GeoJSON FeatureCollection of places.

    Pass ``registry`` to add another level to an existing registry (parent
    chains are resolved across everything loaded so far).
    """
    level = None if level is None else PlaceLevel.parse(level)
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{path}: not valid JSON: {exc}") from None
    if doc.get("type") != "FeatureCollection":
        raise DataError(f"{path}: expected a GeoJSON FeatureCollection")
    places = [_feature_to_place(f, level, n) for n, f in enumerate(doc.get("features", []))]
    reg = registry if registry is not None else PlaceRegistry()
    reg.add_places(places)
    log.info("loaded %d places from %s", len(places), path)
    return reg


def distance_matrix_miles(places: list[Place]) -> np.ndarray:
    lat = np.array([p.centroid[0] for p in places])
    lon = np.array([p.centroid[1] for p in places])
    return haversine_miles(lat[:, None], lon[:, None], lat[None, :], lon[None, :])

