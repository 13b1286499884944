"""Topology-driven coreset selection for static feature embeddings.

The pipeline scores every sample at two scales (global manifold density,
local persistence displacement), filters likely mislabels with a
training-free neighborhood purity score, and draws a class-proportional
stratified sample of the survivors.
"""

from .density import DensityConfig, density_scores, kde_scores
from .io import (
    DataError,
    EmbeddingMatrix,
    FormatError,
    LabelVector,
    ScoreVector,
    SelectionResult,
    ShapeError,
    load_embeddings,
    load_scores,
    load_selection,
    perturb_embeddings,
    save_embeddings,
    save_scores,
    save_selection,
)
from .manifold import (
    Embedding2D,
    FuzzyGraph,
    ProjectionConfig,
    cross_entropy_loss,
    fit_ab,
    fuzzy_simplicial_set,
    optimize_layout,
    project,
)
from .mislabel import MislabelConfig, filter_mislabeled, load_aum_scores, nlps_scores
from .neighbors import NeighborGraph, knn_graph, pairwise_distances
from .persistence import (
    PersistenceBar,
    PersistenceDiagram,
    PersistenceOptimConfig,
    PersistencePair,
    SignedMeasure,
    bottleneck_distance,
    hilbert_signed_measure,
    loss_gradient,
    optimize_points,
    persistence_loss,
    persistence_scores,
    rips_persistence,
    save_bars_csv,
)
from .selection import SelectionConfig, largest_remainder, stratified_sample, unified_scores

__version__ = "0.1.0"

__all__ = [
    "DensityConfig",
    "density_scores",
    "kde_scores",
    "DataError",
    "EmbeddingMatrix",
    "FormatError",
    "LabelVector",
    "ScoreVector",
    "SelectionResult",
    "ShapeError",
    "load_embeddings",
    "load_scores",
    "load_selection",
    "perturb_embeddings",
    "save_embeddings",
    "save_scores",
    "save_selection",
    "Embedding2D",
    "FuzzyGraph",
    "ProjectionConfig",
    "cross_entropy_loss",
    "fit_ab",
    "fuzzy_simplicial_set",
    "optimize_layout",
    "project",
    "MislabelConfig",
    "filter_mislabeled",
    "load_aum_scores",
    "nlps_scores",
    "NeighborGraph",
    "knn_graph",
    "pairwise_distances",
    "PersistenceBar",
    "PersistenceDiagram",
    "PersistenceOptimConfig",
    "PersistencePair",
    "SignedMeasure",
    "bottleneck_distance",
    "hilbert_signed_measure",
    "loss_gradient",
    "optimize_points",
    "persistence_loss",
    "persistence_scores",
    "rips_persistence",
    "save_bars_csv",
    "SelectionConfig",
    "largest_remainder",
    "stratified_sample",
    "unified_scores",
    "__version__",
]
