"""Parameter-free neighbor-grouping strategies feeding the aggregation rule.

Three strategies are provided on top of the structural component
partition: density clustering (DBSCAN), structure-seeded dynamic
grouping (DGS, 0/1/2 center-update iterations), and feature-driven
pseudo grouping with an id-ordered chunk seeding. Every strategy reads
neighbors in ascending-id order and breaks ties deterministically, so
partitions do not depend on edge input ordering.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ShapeError
from .graph import Graph, GroupPartition, induced_components

NOISE = -1

_counter_lock = threading.Lock()
_distance_evals = 0


def reset_distance_counter():
    global _distance_evals
    with _counter_lock:
        _distance_evals = 0


def distance_evaluations() -> int:
    """Running count of point-to-center distance computations."""
    return _distance_evals


def _count_distances(n):
    global _distance_evals
    with _counter_lock:
        _distance_evals += n


@dataclass(frozen=True)
class DbscanParams:
    eps: float
    min_pts: int = 2

    def __post_init__(self):
        if not self.eps > 0:
            raise ConfigError(f"eps must be > 0, got {self.eps}")
        if self.min_pts < 1:
            raise ConfigError(f"min_pts must be >= 1, got {self.min_pts}")


@dataclass(frozen=True)
class Structural:
    """Connected components of the neighborhood-induced subgraph."""


@dataclass(frozen=True)
class Dbscan:
    """Density clustering on neighbor features; None = per-node adaptive eps."""

    params: DbscanParams | None = None


@dataclass(frozen=True)
class Dgs:
    """Structure-seeded nearest-center grouping with 0..2 update iterations."""

    iterations: int = 0

    def __post_init__(self):
        if self.iterations not in (0, 1, 2):
            raise ConfigError(
                f"dgs iterations must be 0, 1 or 2, got {self.iterations}"
            )


@dataclass(frozen=True)
class FeatureOnly:
    """Pure feature-space grouping; cluster count k, or the structural count."""

    k: int | None = None


StrategyKind = Structural | Dbscan | Dgs | FeatureOnly


def parse_strategy(name: str) -> StrategyKind:
    key = name.strip().lower().replace("-", "").replace("_", "")
    if key == "structural":
        return Structural()
    if key == "dbscan":
        return Dbscan()
    if key in ("dgs", "dgs0"):
        return Dgs(0)
    if key == "dgs1":
        return Dgs(1)
    if key == "dgs2":
        return Dgs(2)
    if key == "featureonly":
        return FeatureOnly()
    raise ConfigError(f"unknown strategy {name!r}")


def _pairwise_distances(points):
    diff = points[:, None, :] - points[None, :, :]
    return np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))


def dbscan(points, params: DbscanParams | None = None, *, eps=None, min_pts=None):
    """Euclidean DBSCAN with canonical, order-independent tie-breaking.

    Core points are determined from the full distance matrix (a point's
    eps-neighborhood includes itself). Core clusters are the connected
    components of the core-core reachability graph, numbered by their
    smallest core index. A border point reachable from several clusters
    joins the cluster of its nearest core point, ties going to the
    smaller core index. Returns one label per point, NOISE (-1) for
    unclustered points.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ShapeError(f"points must be 2-D, got shape {points.shape}")
    if params is not None:
        eps, min_pts = params.eps, params.min_pts
    if min_pts is None:
        min_pts = 2
    if eps is None:
        raise ConfigError("dbscan requires eps")
    if eps < 0:
        raise ConfigError(f"eps must be >= 0, got {eps}")

    n = len(points)
    dist = _pairwise_distances(points)
    within = dist <= eps
    core = within.sum(axis=1) >= min_pts

    labels = np.full(n, NOISE, dtype=np.int64)
    cluster = 0
    for i in range(n):
        if not core[i] or labels[i] != NOISE:
            continue
        stack = [i]
        labels[i] = cluster
        while stack:
            j = stack.pop()
            for k in np.flatnonzero(within[j] & core):
                if labels[k] == NOISE:
                    labels[k] = cluster
                    stack.append(int(k))
        cluster += 1

    core_idx = np.flatnonzero(core)
    for p in np.flatnonzero(~core):
        reachable = core_idx[within[p, core_idx]]
        if len(reachable) == 0:
            continue
        # nearest core wins; ties fall to the smaller core index
        best = reachable[np.argmin(dist[p, reachable])]
        labels[p] = labels[best]
    return labels


def _labels_to_groups(owner, ids, labels) -> GroupPartition:
    buckets: dict[int, list[int]] = {}
    for node, lab in zip(ids, labels):
        if lab == NOISE:
            continue
        buckets.setdefault(int(lab), []).append(int(node))
    return GroupPartition.from_groups(owner, buckets.values())


def _single_group(owner, ids) -> GroupPartition:
    return GroupPartition.from_groups(owner, [list(map(int, ids))])


def _adaptive_eps(points) -> float:
    iu = np.triu_indices(len(points), k=1)
    return float(np.median(_pairwise_distances(points)[iu]))


def dbscan_partition(g: Graph, v: int, feats, params: DbscanParams | None = None
                     ) -> GroupPartition:
    """Group N(v) by density clustering of neighbor features.

    Degenerate cases collapse to plain mean pooling: at most two
    neighbors, or every neighbor labeled noise, yields the single
    all-neighbor group. With some (not all) neighbors labeled noise,
    the noise points are dropped from the partition.
    """
    nbrs = g.neighbors(v)
    if len(nbrs) == 0:
        return GroupPartition(owner=v, groups=())
    if len(nbrs) <= 2:
        return _single_group(v, nbrs)
    points = np.asarray(feats, dtype=np.float64)[nbrs]
    if params is None:
        # adaptive default: eps = median pairwise distance among neighbors
        labels = dbscan(points, eps=_adaptive_eps(points), min_pts=2)
    else:
        labels = dbscan(points, params)
    if np.all(labels == NOISE):
        return _single_group(v, nbrs)
    return _labels_to_groups(v, nbrs, labels)


def _nearest_center_assignment(points, centers):
    """Index of the closest center per point; ties -> lowest center index."""
    diff = points[:, None, :] - centers[None, :, :]
    sq = np.einsum("ijk,ijk->ij", diff, diff)
    _count_distances(sq.size)
    return np.argmin(sq, axis=1)


def _assigned_clusters(assign, num_centers):
    """Member-position lists per center, empty clusters dropped."""
    return [np.flatnonzero(assign == k) for k in range(num_centers)
            if np.any(assign == k)]


def dgs_partition(g: Graph, v: int, prev_feats, seed: GroupPartition,
                  iterations: int = 0) -> GroupPartition:
    """Reassign N(v) to nearest centers seeded by the structural groups.

    The seed partition fixes the cluster count and initial centers
    (per-group feature means). iterations > 0 adds that many
    center-recompute + reassign rounds; empty clusters are dropped
    after each assignment pass.
    """
    if iterations not in (0, 1, 2):
        raise ConfigError(f"iterations must be 0, 1 or 2, got {iterations}")
    nbrs = g.neighbors(v)
    if len(nbrs) == 0:
        return GroupPartition(owner=v, groups=())
    if len(nbrs) <= 2 or seed.size <= 1:
        return _single_group(v, nbrs)

    feats = np.asarray(prev_feats, dtype=np.float64)
    points = feats[nbrs]
    centers = np.stack([feats[list(grp)].mean(axis=0) for grp in seed.groups])
    assign = _nearest_center_assignment(points, centers)
    clusters = _assigned_clusters(assign, len(centers))
    for _ in range(iterations):
        centers = np.stack([points[idx].mean(axis=0) for idx in clusters])
        assign = _nearest_center_assignment(points, centers)
        clusters = _assigned_clusters(assign, len(centers))
    return GroupPartition.from_groups(
        v, [nbrs[idx].tolist() for idx in clusters]
    )


def feature_only_partition(g: Graph, v: int, prev_feats, k: int | None = None,
                           partition_cache=None) -> GroupPartition:
    """Group N(v) by feature distance alone, without structural content.

    The cluster count defaults to the node's structural component count;
    initial centers are the means of K contiguous id-ordered neighbor
    chunks, followed by a single nearest-center assignment pass.
    """
    nbrs = g.neighbors(v)
    if len(nbrs) == 0:
        return GroupPartition(owner=v, groups=())
    if k is None:
        if partition_cache is not None:
            k = partition_cache[v].size
        else:
            k = induced_components(g, v).size
    k = min(int(k), len(nbrs))
    if k <= 1 or len(nbrs) <= 2:
        return _single_group(v, nbrs)

    feats = np.asarray(prev_feats, dtype=np.float64)
    points = feats[nbrs]
    chunks = np.array_split(np.arange(len(nbrs)), k)
    centers = np.stack([points[c].mean(axis=0) for c in chunks])
    assign = _nearest_center_assignment(points, centers)
    clusters = _assigned_clusters(assign, k)
    return GroupPartition.from_groups(
        v, [nbrs[idx].tolist() for idx in clusters]
    )
