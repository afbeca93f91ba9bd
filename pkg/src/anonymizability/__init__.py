"""Anonymizability of mobile traffic fingerprints.

How far each user's spatiotemporal fingerprint is from being hidden among
``k - 1`` others, what spatiotemporal generalization buys, and how the
spatial and temporal parts of that distance are dispersed.
"""

from .anonymity import (
    PopulationTooSmall,
    anonymizability,
    count_k_anonymous,
    is_k_anonymous,
    temporal_spatial_ratio,
)
from .distance import (
    SampleDistanceBreakdown,
    fingerprint_distance,
    sample_distance,
    spatial_delta,
    temporal_delta,
)
from .generalization import aggregate, aggregation_sweep
from .ingest import (
    ProjectionSpec,
    RawRecord,
    filter_daily_activity,
    ingest,
    project,
    snap_to_grid,
)
from .model import (
    AnonymizabilityReport,
    Dataset,
    DistanceParams,
    Fingerprint,
    Sample,
    validate_dataset,
)
from .stats import Ecdf, cdf_table, ecdf_inverse, gini, inverse_normal_cdf, tail_weight
from .synth import PopulationSpec, generate, plant_duplicates

__version__ = "0.1.0"

__all__ = [
    "AnonymizabilityReport",
    "Dataset",
    "DistanceParams",
    "Ecdf",
    "Fingerprint",
    "PopulationSpec",
    "PopulationTooSmall",
    "ProjectionSpec",
    "RawRecord",
    "Sample",
    "SampleDistanceBreakdown",
    "aggregate",
    "aggregation_sweep",
    "anonymizability",
    "cdf_table",
    "count_k_anonymous",
    "ecdf_inverse",
    "filter_daily_activity",
    "fingerprint_distance",
    "generate",
    "gini",
    "ingest",
    "inverse_normal_cdf",
    "is_k_anonymous",
    "plant_duplicates",
    "project",
    "sample_distance",
    "snap_to_grid",
    "spatial_delta",
    "tail_weight",
    "temporal_delta",
    "temporal_spatial_ratio",
    "validate_dataset",
]
