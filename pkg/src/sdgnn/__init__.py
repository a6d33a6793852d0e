"""Parameter-free structural-diversity graph embeddings.

Neighborhoods are partitioned into groups (connected components,
density clusters, or feature clusters), each group is mean-pooled and
concatenated with the center node, and the per-group vectors are fused
dimension-wise. Layer outputs concatenate into the final embedding,
which feeds a small trainable MLP classifier.
"""

from .aggregate import FusionMode, group_mean, jk_concat, layer_forward, sdmp_aggregate
from .classifier import (
    AdamState,
    MLPClassifier,
    MlpParams,
    TrainConfig,
    TrainResult,
    adam_step,
    cross_entropy,
    evaluate,
    mlp_forward,
    train,
)
from .errors import ConfigError, EdgeListParseError, FormatError, SdgnnError, ShapeError
from .experiment import (
    PAPER_RATIOS,
    ExperimentConfig,
    MetricsReport,
    Split,
    make_split,
    run_experiment,
)
from .graph import (
    Graph,
    GroupPartition,
    induced_components,
    load_edge_list,
    precompute_partitions,
    structural_diversity,
)
from .io import DatasetBundle, load_dataset, load_features, load_labels, read_npy, write_npy
from .partition import (
    NOISE,
    Dbscan,
    DbscanParams,
    Dgs,
    FeatureOnly,
    Structural,
    dbscan,
    dbscan_partition,
    dgs_partition,
    feature_only_partition,
)
from .pipeline import LayerPlan, SDGNNEmbedding, build_pipeline, run_plan
from .propagation import NormalizedAdjacency, normalized_adjacency, propagate

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "ConfigError",
    "DatasetBundle",
    "Dbscan",
    "DbscanParams",
    "Dgs",
    "EdgeListParseError",
    "ExperimentConfig",
    "FeatureOnly",
    "FormatError",
    "FusionMode",
    "Graph",
    "GroupPartition",
    "LayerPlan",
    "MLPClassifier",
    "MetricsReport",
    "MlpParams",
    "NOISE",
    "NormalizedAdjacency",
    "PAPER_RATIOS",
    "SDGNNEmbedding",
    "SdgnnError",
    "ShapeError",
    "Split",
    "Structural",
    "TrainConfig",
    "TrainResult",
    "adam_step",
    "build_pipeline",
    "cross_entropy",
    "dbscan",
    "dbscan_partition",
    "dgs_partition",
    "evaluate",
    "feature_only_partition",
    "group_mean",
    "induced_components",
    "jk_concat",
    "layer_forward",
    "load_dataset",
    "load_edge_list",
    "load_features",
    "load_labels",
    "make_split",
    "mlp_forward",
    "normalized_adjacency",
    "precompute_partitions",
    "propagate",
    "read_npy",
    "run_experiment",
    "run_plan",
    "sdmp_aggregate",
    "structural_diversity",
    "train",
    "write_npy",
]
