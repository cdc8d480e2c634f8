"""qready: a classical, quantum-ready QUBO sampling toolkit.

The sampler core is multi-start tabu search with an optional subQUBO
decomposition loop; around it sit an MQlib-format benchmark harness,
solution-diversity analytics and an asynchronous REST job service.
"""

from .analytics import (
    Dendrogram,
    DistanceMatrix,
    EliteSet,
    PairHistogram,
    distance_matrix,
    diversity_report,
    elite_filter,
    hamming,
    hierarchical_cluster,
    pair_histogram,
    relative_delta_energy,
)
from .decompose import (
    ExhaustiveInnerSampler,
    InnerSampler,
    SubProblem,
    TabuInnerSampler,
    clamp_subproblem,
    select_subset,
    solve_large,
)
from .exceptions import (
    CatalogError,
    DimensionError,
    InnerSamplerError,
    InvalidInstanceError,
    ParseError,
    QreadyError,
    UndefinedRatioError,
)
from .io import CatalogEntry, catalog_lookup, load_catalog, parse_instance, write_instance
from .model import (
    MAXIMIZE,
    MINIMIZE,
    MaxCutGraph,
    QuboInstance,
    as_bits,
    density,
    energy,
    flip_delta,
    from_maxcut,
)
from .tabu import Sample, SamplerParams, SampleSet, sample

__version__ = "0.1.0"

__all__ = [
    "CatalogEntry",
    "CatalogError",
    "Dendrogram",
    "DimensionError",
    "DistanceMatrix",
    "EliteSet",
    "ExhaustiveInnerSampler",
    "InnerSampler",
    "InnerSamplerError",
    "InvalidInstanceError",
    "MAXIMIZE",
    "MINIMIZE",
    "MaxCutGraph",
    "PairHistogram",
    "ParseError",
    "QreadyError",
    "QuboInstance",
    "Sample",
    "SampleSet",
    "SamplerParams",
    "SubProblem",
    "TabuInnerSampler",
    "UndefinedRatioError",
    "as_bits",
    "catalog_lookup",
    "clamp_subproblem",
    "density",
    "distance_matrix",
    "diversity_report",
    "elite_filter",
    "energy",
    "flip_delta",
    "from_maxcut",
    "hamming",
    "hierarchical_cluster",
    "load_catalog",
    "pair_histogram",
    "parse_instance",
    "relative_delta_energy",
    "sample",
    "select_subset",
    "solve_large",
    "write_instance",
]
