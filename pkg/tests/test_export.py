import datetime as dt
import json

import numpy as np
import polars as pl
import pytest

from placeconn import DataError, Place, PlaceLevel, PlaceRegistry, agglomerate, cut
from placeconn.clustering import DistanceMatrix
from placeconn.export import (
    config_hash,
    export_geojson,
    header_line,
    read_pci,
    read_presence,
    write_csv,
    write_json,
)


def test_geojson_two_places(two_squares, tmp_path):
    D = DistanceMatrix(["01021", "01001"], np.array([[0, 1.0], [1.0, 0]]), 10.0)
    assign = cut(agglomerate(D), 2)
    doc = export_geojson(assign, two_squares, tmp_path / "c.geojson", config={"k": 2})
    assert doc["type"] == "FeatureCollection"
    props = [f["properties"] for f in doc["features"]]
    assert [p["code"] for p in props] == ["01001", "01021"]
    assert [p["community"] for p in props] == [0, 1]
    assert all(f["geometry"]["type"] == "Polygon" for f in doc["features"])
    on_disk = json.loads((tmp_path / "c.geojson").read_text())
    assert on_disk["_meta"] == header_line({"k": 2})[2:]
    assert on_disk["features"] == doc["features"]


def test_geojson_plain_values(two_squares):
    doc = export_geojson({"01001": np.float64(0.25)}, two_squares, prop="r", level="county")
    assert doc["features"][0]["properties"] == {"code": "01001", "name": doc["features"][0]["properties"]["name"], "r": 0.25}


def test_geojson_missing_geometry_names_place():
    reg = PlaceRegistry()
    reg.add_places([Place("X1", PlaceLevel.COUNTY, "x", (0, 0))])
    with pytest.raises(DataError, match="'X1'"):
        export_geojson({"X1": 1}, reg)
    with pytest.raises(DataError, match="'Q9'"):
        export_geojson({"Q9": 1}, reg)


def test_csv_header_and_significant_digits(tmp_path):
    df = pl.DataFrame({"a": ["x", "y"], "v": [1 / 3, 123456789.0], "n": [1, 2]})
    p = write_csv(df, tmp_path / "t.csv", {"level": "county"})
    lines = p.read_text().splitlines()
    assert lines[0] == f"# placeconn 0.1.0 config={config_hash({'level': 'county'})}"
    assert lines[1:] == ["a,v,n", "x,0.333333,1", "y,1.23457e+08,2"]
    assert config_hash({"a": 1, "b": 2}) == config_hash({"b": 2, "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_presence_round_trip(tmp_path):
    df = pl.DataFrame(
        {"place": ["06001", "06003"], "user": ["u1", "u2"], "date": [dt.date(2019, 3, 1), dt.date(2019, 12, 31)]}
    )
    p = write_csv(df, tmp_path / "presence.csv")
    assert read_presence(p).equals(df)
    # leading zeros survive
    assert read_presence(p)["place"].to_list() == ["06001", "06003"]


def test_pci_round_trip_six_digits(tmp_path):
    from placeconn import build_matrix

    shared = pl.DataFrame({"place_i": ["01", "01"], "place_j": ["02", "03"], "shared": [50, 7]})
    counts = pl.DataFrame({"place": ["01", "02", "03"], "users": [100, 1000, 9]})
    m = build_matrix(shared, counts)
    back = read_pci(write_csv(m, tmp_path / "pci.csv"))
    assert back.select("place_i", "place_j", "users_i", "users_j", "shared_users").equals(
        m.select("place_i", "place_j", "users_i", "users_j", "shared_users")
    )
    np.testing.assert_allclose(back["pci"], m["pci"], rtol=5e-6)


def test_empty_and_missing(tmp_path):
    p = tmp_path / "empty.csv"
    p.write_text(header_line() + "\n")
    assert read_pci(p).height == 0
    with pytest.raises(DataError, match="missing"):
        read_pci(tmp_path / "nope.csv")
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y\n1,2\n")
    with pytest.raises(DataError, match="missing columns"):
        read_pci(bad)


def test_json_meta_and_numpy(tmp_path):
    p = write_json({"r": np.float64(0.5), "n": np.int64(3), "v": np.arange(2)}, tmp_path / "o.json")
    doc = json.loads(p.read_text())
    assert doc == {"_meta": header_line()[2:], "r": 0.5, "n": 3, "v": [0, 1]}
