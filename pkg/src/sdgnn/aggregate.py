"""Group-wise neighborhood aggregation and layer stacking.

One layer update per node: mean-pool features within each neighbor
group, concatenate each group mean behind the center node's own
features, fuse the per-group vectors dimension-wise (max by default,
mean as the alternative), then apply ReLU. A node without neighbors
falls back to concatenating its own features twice. Output
dimensionality doubles at every layer.
"""

from __future__ import annotations

import enum

import numpy as np

from .errors import ConfigError, ShapeError
from .graph import Graph, GroupPartition
from .parallel import ordered_map
from .partition import (
    Dbscan,
    Dgs,
    FeatureOnly,
    StrategyKind,
    Structural,
    dbscan_partition,
    dgs_partition,
    feature_only_partition,
)


class FusionMode(enum.Enum):
    """Dimension-wise combination of the per-group concatenated vectors."""

    MAX = "max"
    MEAN = "mean"

    @staticmethod
    def parse(name) -> "FusionMode":
        if isinstance(name, FusionMode):
            return name
        try:
            return FusionMode(str(name).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown fusion mode {name!r}") from None


def group_mean(feats, group) -> np.ndarray:
    """Arithmetic mean of the feature rows of a non-empty neighbor group."""
    idx = np.asarray(tuple(group), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("group_mean of an empty group")
    return np.asarray(feats, dtype=np.float64)[idx].mean(axis=0)


def sdmp_aggregate(center, partition: GroupPartition, feats,
                   fusion: FusionMode = FusionMode.MAX) -> np.ndarray:
    """One node update: per-group means, concat with center, fuse, ReLU."""
    center = np.asarray(center, dtype=np.float64)
    if center.ndim != 1:
        raise ShapeError(f"center must be 1-D, got shape {center.shape}")
    if partition.size == 0:
        fused = np.concatenate([center, center])
    else:
        feats = np.asarray(feats, dtype=np.float64)
        if feats.shape[1] != center.shape[0]:
            raise ShapeError(
                f"feature dim {feats.shape[1]} != center dim {center.shape[0]}"
            )
        means = np.stack([group_mean(feats, grp) for grp in partition.groups])
        z = np.concatenate(
            [np.broadcast_to(center, means.shape), means], axis=1
        )
        fused = z.max(axis=0) if fusion is FusionMode.MAX else z.mean(axis=0)
    return np.maximum(fused, 0.0)


def _node_partition(g, v, feats, strategy, cache) -> GroupPartition:
    if isinstance(strategy, Structural):
        return cache[v]
    if isinstance(strategy, Dbscan):
        return dbscan_partition(g, v, feats, strategy.params)
    if isinstance(strategy, Dgs):
        return dgs_partition(g, v, feats, cache[v], strategy.iterations)
    if isinstance(strategy, FeatureOnly):
        return feature_only_partition(g, v, feats, strategy.k,
                                      partition_cache=cache)
    raise ConfigError(f"unknown strategy {strategy!r}")


def layer_forward(g: Graph, feats, strategy: StrategyKind,
                  fusion: FusionMode, cache, workers=None) -> np.ndarray:
    """Apply one aggregation layer to every node (synchronous semantics).

    Every node reads the same immutable input matrix; rows are written
    independently, so the result does not depend on scheduling.
    """
    feats = np.asarray(feats, dtype=np.float64)
    if feats.shape[0] != g.num_nodes:
        raise ShapeError(
            f"feature rows {feats.shape[0]} != num_nodes {g.num_nodes}"
        )

    def update(v):
        part = _node_partition(g, v, feats, strategy, cache)
        return sdmp_aggregate(feats[v], part, feats, fusion)

    rows = ordered_map(update, range(g.num_nodes), workers=workers)
    out = np.stack(rows) if rows else np.empty((0, feats.shape[1] * 2))
    assert out.shape[1] == 2 * feats.shape[1]
    if not np.isfinite(out).all():
        raise FloatingPointError("layer produced non-finite values")
    return out


def jk_concat(layer_outputs) -> np.ndarray:
    """Row-wise concatenation of the per-layer node representations."""
    layer_outputs = list(layer_outputs)
    if not layer_outputs:
        raise ValueError("jk_concat needs at least one layer output")
    rows = {m.shape[0] for m in layer_outputs}
    if len(rows) != 1:
        raise ShapeError(f"layer outputs disagree on row count: {sorted(rows)}")
    return np.concatenate(layer_outputs, axis=1)
