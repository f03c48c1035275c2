"""Multi-scale place connectivity from geotagged user events."""
from .analytics import (
    DecayFit, RegressionResult, decay_fit, log10_scaled, ols, pearson_r,
    per_place_correlation, same_region_dummy,
)
from .clustering import Dendrogram, DistanceMatrix, agglomerate, cut, pci_to_distance
from .connectivity import PciRecord, build_matrix, directional_pci, pci
from .errors import ConfigError, DataError
from .ingest import (
    GeoEvent, IngestReport, PresenceTuple, SourceWhitelist, ingest_files, ingest_stream,
    is_human_source, parse_event,
)
from .movement import person_day_movements, symmetrize_flows
from .places import (
    Place, PlaceLevel, PlaceRegistry, SpatialResolution, centroid_distance,
    load_registry, resolution_admits,
)
from .presence import presence_to_days, shared_users, unique_users

__version__ = "0.1.0"
