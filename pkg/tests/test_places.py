import itertools
import json
import math

import numpy as np
import pytest
import shapely
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import haversine_oracle
from placeconn import DataError, Place, PlaceLevel, PlaceRegistry, SpatialResolution, load_registry
from placeconn.places import centroid_distance, resolution_admits
from placeconn.synth import write_registry

LEVELS = ["country", "admin1", "county", "metro", "tract"]
RESOLUTIONS = ["country", "admin1", "city", "neighborhood_poi", "coord"]

# level -> admitted resolutions, written out by hand
ADMITTED = {
    "country": {"coord", "neighborhood_poi", "city", "admin1", "country"},
    "admin1": {"coord", "neighborhood_poi", "city", "admin1"},
    "county": {"coord", "neighborhood_poi", "city"},
    "metro": {"coord", "neighborhood_poi", "city"},
    "tract": {"coord", "neighborhood_poi"},
}


@pytest.mark.parametrize("res,level", list(itertools.product(RESOLUTIONS, LEVELS)))
def test_admission_matrix(res, level):
    assert resolution_admits(res, level) == (res in ADMITTED[level])


def test_admission_examples():
    assert resolution_admits("admin1", "county") is False
    assert resolution_admits("coord", "tract") is True
    assert resolution_admits(SpatialResolution.COUNTRY, PlaceLevel.COUNTRY) is True


def test_admission_monotone_toward_coarser_levels():
    order = ["tract", "county", "admin1", "country"]
    for res in RESOLUTIONS:
        seen = False
        for level in order:
            ok = resolution_admits(res, level)
            assert ok or not seen
            seen = seen or ok


def test_level_parse_and_rank():
    assert PlaceLevel.parse(" County ") is PlaceLevel.COUNTY
    assert PlaceLevel.COUNTY.rank == PlaceLevel.METRO.rank
    assert PlaceLevel.COUNTRY.rank < PlaceLevel.ADMIN1.rank < PlaceLevel.COUNTY.rank < PlaceLevel.TRACT.rank
    with pytest.raises(ValueError):
        PlaceLevel.parse("zipcode")


def test_point_assignment(two_squares):
    assert two_squares.assign_point(0.5, 0.5, "county").code == "01001"
    assert two_squares.assign_point(0.5, 1.5, "county").code == "01021"
    assert two_squares.assign_point(5.0, 5.0, "county") is None


def test_shared_edge_goes_to_smallest_code(two_squares):
    assert two_squares.assign_point(0.5, 1.0, "county").code == "01001"
    # same answer when the places are loaded in the other order
    reg = PlaceRegistry()
    reg.add_places(list(reversed(two_squares.places("county"))))
    assert reg.assign_point(0.5, 1.0, "county").code == "01001"


def test_assign_point_rejects_bad_coordinates(two_squares):
    with pytest.raises(ValueError):
        two_squares.assign_point(91.0, 0.0, "county")
    with pytest.raises(ValueError):
        two_squares.assign_point(0.0, -180.5, "county")


def test_assign_points_matches_brute_force(world):
    rng = np.random.default_rng(7)
    places = world.registry.places("county")
    lat = rng.uniform(29, 34, 1000)
    lon = rng.uniform(-101, -96, 1000)
    got = world.registry.assign_points(lat, lon, "county")
    codes = world.registry.codes("county")
    for k in range(lat.size):
        pt = shapely.Point(lon[k], lat[k])
        inside = sorted(p.code for p in places if p.geometry.covers(pt))
        if inside:
            assert codes[got[k]] == inside[0]
        else:
            assert got[k] == -1


def test_haversine_equator_degree():
    a = Place("a", PlaceLevel.COUNTY, "a", (0.0, 0.0))
    b = Place("b", PlaceLevel.COUNTY, "b", (0.0, 1.0))
    assert centroid_distance(a, b) == pytest.approx(3958.8 * math.pi / 180, rel=1e-12)
    assert centroid_distance(a, b) == pytest.approx(69.09, abs=0.005)
    assert centroid_distance(a, a) == 0.0


coords = st.tuples(st.floats(-89.9, 89.9), st.floats(-179.9, 179.9))


@settings(max_examples=100, deadline=None)
@given(coords, coords)
def test_distance_symmetric_and_matches_oracle(p, q):
    a = Place("a", PlaceLevel.COUNTY, "a", p)
    b = Place("b", PlaceLevel.COUNTY, "b", q)
    d = centroid_distance(a, b)
    assert d == centroid_distance(b, a)
    assert d >= 0
    assert d == pytest.approx(haversine_oracle(*p, *q), rel=1e-9, abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(coords, coords, coords)
def test_distance_triangle_inequality(p, q, r):
    P, Q, R = (Place(c, PlaceLevel.COUNTY, c, x) for c, x in zip("pqr", (p, q, r)))
    pq, qr, pr = centroid_distance(P, Q), centroid_distance(Q, R), centroid_distance(P, R)
    assert pr <= (pq + qr) * (1 + 1e-9) + 1e-9


def _fc(features):
    return {"type": "FeatureCollection", "features": features}


def _feat(code, box=None, level="county", **extra):
    props = {"code": code, "level": level, "name": f"n{code}", "centroid_lat": 0.5, "centroid_lon": 0.5, **extra}
    geom = None if box is None else shapely.geometry.mapping(shapely.box(*box))
    return {"type": "Feature", "properties": props, "geometry": geom}


def test_load_empty_registry(tmp_path):
    p = tmp_path / "empty.geojson"
    p.write_text(json.dumps(_fc([])))
    reg = load_registry(p, "county")
    assert len(reg) == 0
    assert reg.assign_point(0.5, 0.5, "county") is None


def test_load_two_squares(tmp_path):
    p = tmp_path / "sq.geojson"
    f2 = _feat("B", (1, 0, 2, 1))
    f2["properties"].update(centroid_lon=1.5)
    p.write_text(json.dumps(_fc([_feat("A", (0, 0, 1, 1)), f2])))
    reg = load_registry(p, "county")
    assert len(reg) == 2
    assert reg.assign_point(0.25, 0.25, "county").code == "A"


@pytest.mark.parametrize(
    "features,message",
    [
        ([_feat("A", (0, 0, 1, 1)), _feat("A", (1, 0, 2, 1))], "duplicate"),
        ([{"type": "Feature", "properties": {"code": "A", "level": "county"}, "geometry": None}], "name"),
        ([{**_feat("A"), "geometry": {"type": "Polygon", "coordinates": [[0, 0]]}}], "geometry"),
        ([{**_feat("A"), "geometry": {"type": "Point", "coordinates": [0, 0]}}], "geometry"),
        ([_feat("A", (0, 0, 1, 1)), _feat("B", (0.5, 0, 1.5, 1))], "overlapping"),
        ([_feat("A", (0, 0, 1, 1), level="tract")], "level"),
    ],
)
def test_load_errors(tmp_path, features, message):
    p = tmp_path / "bad.geojson"
    p.write_text(json.dumps(_fc(features)))
    with pytest.raises(DataError, match=message):
        load_registry(p, "county")


def test_centroid_outside_geometry_only_warns(tmp_path, caplog):
    p = tmp_path / "c.geojson"
    f = _feat("A", (0, 0, 1, 1))
    f["properties"]["centroid_lat"] = 5.0
    p.write_text(json.dumps(_fc([f])))
    reg = load_registry(p, "county")
    assert len(reg) == 1
    assert "outside" in caplog.text


def test_rollup_and_parent_chain(tmp_path, world):
    reg = world.registry
    county = world.counties[0]
    assert reg.rollup(county.code, "admin1") == world.region_of[county.code]
    assert reg.rollup(county.code, "county") == county.code
    assert reg.rollup(county.code, "country") is None
    assert reg.parent(county).level is PlaceLevel.ADMIN1
    # the multi-level file layout round-trips
    write_registry(tmp_path / "r.geojson", world.regions)
    write_registry(tmp_path / "c.geojson", world.counties)
    again = load_registry(tmp_path / "r.geojson")
    load_registry(tmp_path / "c.geojson", registry=again)
    assert again.codes("county") == reg.codes("county")
    assert again.rollup(county.code, "admin1") == world.region_of[county.code]


def test_code_only_places(tmp_path):
    p = tmp_path / "nogeom.geojson"
    p.write_text(json.dumps(_fc([_feat("X")])))
    reg = load_registry(p, "county")
    assert reg.get("X").geometry is None
    assert reg.assign_point(0.5, 0.5, "county") is None
