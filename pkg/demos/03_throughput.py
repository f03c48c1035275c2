"""Ingest + PCI throughput on a 3,000-county grid.

Run: python demos/03_throughput.py [n_events] [threads]   (default 1,000,000 and 1)
The acceptance run uses 10,000,000 events at 1 and 8 threads.
"""
import resource
import sys
import tempfile
import time
from pathlib import Path

import numpy as np

from placeconn import ingest_files
from placeconn.connectivity import pci_from_presence
from placeconn.synth import grid_world, write_bulk_events

n_events = int(sys.argv[1]) if len(sys.argv) > 1 else 1_000_000
threads = int(sys.argv[2]) if len(sys.argv) > 2 else 1

world = grid_world(60, 50, (10, 10), cell_deg=0.1)
tmp = Path(tempfile.mkdtemp())
t = time.perf_counter()
events = write_bulk_events(tmp / "events.ndjson", np.random.default_rng(0), world, n_events, max(1, n_events // 40))
print(f"generated {n_events:,} events in {time.perf_counter() - t:.1f}s ({events.stat().st_size / 1e6:.0f} MB)")

t = time.perf_counter()
presence, report = ingest_files([events], world.registry, "county", threads=threads)
t_ingest = time.perf_counter() - t
t = time.perf_counter()
matrix = pci_from_presence(presence, threads)
t_pci = time.perf_counter() - t

print(f"ingest {t_ingest:.1f}s -> {presence.height:,} tuples")
print(f"pci    {t_pci:.1f}s -> {matrix.height:,} pairs")
print(f"peak RSS {resource.getrusage(resource.RUSAGE_SELF).ru_maxrss / 1024:.0f} MB")
events.unlink()
