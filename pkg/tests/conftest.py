import json
import sys
from pathlib import Path

import pytest
import shapely

from placeconn.places import Place, PlaceLevel, PlaceRegistry
from placeconn.synth import grid_world

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture(scope="session")
def two_squares():
    """Unit squares "01001" (lon 0..1) and "01021" (lon 1..2) sharing the edge lon=1, parent "01"."""
    state = Place("01", PlaceLevel.ADMIN1, "State 01", (0.5, 1.0), None, shapely.box(0, 0, 2, 1))
    a = Place("01001", PlaceLevel.COUNTY, "A", (0.5, 0.5), "01", shapely.box(0, 0, 1, 1))
    b = Place("01021", PlaceLevel.COUNTY, "B", (0.5, 1.5), "01", shapely.box(1, 0, 2, 1))
    reg = PlaceRegistry()
    reg.add_places([state])
    reg.add_places([a, b])
    return reg


@pytest.fixture(scope="session")
def world():
    return grid_world(6, 6, (3, 3))


def write_lines(path: Path, records) -> Path:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(r if isinstance(r, str) else json.dumps(r))
            fh.write("\n")
    return path


def worked_example_events(path: Path, n_i: int = 100, n_j: int = 1000, shared: int = 50) -> Path:
    """Events giving ``n_i`` users in "01001", ``n_j`` in "01021", ``shared`` in both.

    Another 50 users post only from a bot source, so 1,100 users appear in
    the file when the defaults are used and 1,050 survive the whitelist.
    """
    def ev(u, lon, day, source="Twitter for iPhone"):
        return {"user": u, "ts": f"2019-03-{day:02d}T12:00:00Z", "lat": 0.5, "lon": lon,
                "res": "coord", "source": source}

    recs = []
    for k in range(n_i):
        recs.append(ev(f"i{k}", 0.5, 1 + k % 28))
    for k in range(n_j):
        # the first `shared` users of j are the first `shared` users of i
        u = f"i{k}" if k < shared else f"j{k}"
        recs.append(ev(u, 1.5, 1 + k % 28))
    for k in range(50):
        recs.append(ev(f"bot{k}", 0.5 + k % 2, 3, "TweetMyJOBS"))
    return write_lines(path, recs)
