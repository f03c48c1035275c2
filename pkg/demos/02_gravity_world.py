"""A synthetic country where connectivity follows a gravity law.

100 square counties in 4 states. Travellers between two counties are drawn
with mean proportional to pop_i * pop_j * d^-1.2, times 4 when both sit in
the same state. We then ask the pipeline to find the exponent, the state
boundary effect and the states themselves.

Run: python demos/02_gravity_world.py [outdir]    (~30 s)
"""
import json
import sys
from pathlib import Path

import numpy as np
import polars as pl

from placeconn.cli import main
from placeconn.synth import grid_world, gravity_study, write_events, write_registry

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out/gravity")
out.mkdir(parents=True, exist_ok=True)

world = grid_world()  # 10 x 10 cells, 5 x 5 blocks
study = gravity_study(np.random.default_rng(2019), world)
print(f"{study.events.height:,} events, {study.events['user'].n_unique():,} users")

registry = write_registry(out / "places.geojson", world.regions + world.counties)
events = write_events(out / "events.ndjson", study.events)
common = ["--registry", str(registry), "--out", str(out)]


def cli(*args):
    assert main([*map(str, args), *common]) == 0


cli("ingest", "--events", events, "--level", "county")
cli("pci")

# %% distance decay. Pooling all pairs mixes the same-state boost into the
# slope (near pairs are mostly same-state), so fit each side separately.
for pairs in ("cross", "within", "all"):
    cli("decay", "--pairs", pairs)
    fit = json.loads((out / "decay.json").read_text())
    print(f"decay exponent, {pairs:>6} pairs: {fit['exponent']:+.3f}  (planted -1.2, n={fit['n']})")

# %% boundary effect
cli("regress")
print((out / "regression.txt").read_text())

# %% communities at the true k, compared to the planted states
cli("cluster", "--k", "4", "--level", "county")
comm = pl.read_csv(out / "communities_k4.csv", comment_prefix="#", schema_overrides={"place": pl.Utf8})
table = comm.with_columns(state=pl.col("place").replace_strict(world.region_of)).group_by("state", "community").len()
print(table.sort("state"))
print("map:", out / "communities_k4.geojson")
