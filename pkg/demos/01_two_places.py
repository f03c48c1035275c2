"""Two neighbouring counties, 1,100 users, one connectivity number.

Run: python demos/01_two_places.py [outdir]
"""
import json
import sys
from pathlib import Path

import shapely

from placeconn import Place, PlaceLevel, PlaceRegistry, directional_pci, pci
from placeconn.cli import main
from placeconn.export import read_pci
from placeconn.synth import write_registry

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/two_places")
out.mkdir(parents=True, exist_ok=True)

# %% the formula on its own
print("pci(50, 100, 1000) =", round(pci(50, 100, 1000), 3))
print("directional, S_i=1000 S_j=100:", [round(v, 3) for v in directional_pci(50, 1000, 100)])

# %% a registry: one state holding two unit-square counties
reg = PlaceRegistry()
reg.add_places([Place("01", PlaceLevel.ADMIN1, "State", (0.5, 1.0), None, shapely.box(0, 0, 2, 1))])
reg.add_places([
    Place("01001", PlaceLevel.COUNTY, "West", (0.5, 0.5), "01", shapely.box(0, 0, 1, 1)),
    Place("01003", PlaceLevel.COUNTY, "East", (0.5, 1.5), "01", shapely.box(1, 0, 2, 1)),
])
registry = write_registry(out / "places.geojson", reg.places("admin1") + reg.places("county"))

# %% events: 100 users in West, 1000 in East, 50 seen in both, plus 50 bot accounts
def event(user, lon, day, source="Twitter for iPhone"):
    return {"user": user, "ts": f"2019-04-{day:02d}T15:30:00Z", "lat": 0.5, "lon": lon,
            "res": "coord", "source": source}

lines = [event(f"w{k}", 0.4, 1 + k % 30) for k in range(100)]
lines += [event(f"w{k}" if k < 50 else f"e{k}", 1.6, 1 + k % 30) for k in range(1000)]
lines += [event(f"bot{k}", 0.4, 2, "TweetMyJOBS") for k in range(50)]
events = out / "events.ndjson"
events.write_text("".join(json.dumps(x) + "\n" for x in lines))

# %% same pipeline as the command line
main(["ingest", "--registry", str(registry), "--events", str(events), "--level", "county",
      "--whitelist", "builtin", "--out", str(out)])
main(["pci", "--out", str(out)])

row = read_pci(out / "pci.csv").row(0, named=True)
print(row)
# West->East is normalised by East's 1000 users, East->West by West's 100
assert round(row["pci"], 3) == 0.158
