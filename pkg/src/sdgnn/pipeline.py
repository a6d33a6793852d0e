"""Variant pipelines: layer plans, embedding runs, and the transformer API.

A pipeline is an optional propagation preprocessing step followed by a
stack of (strategy, fusion) aggregation layers whose outputs are fused
by concatenation across layers (Jumping Knowledge), or by taking the
last layer alone when disabled.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .aggregate import FusionMode, jk_concat, layer_forward
from .errors import ConfigError
from .graph import Graph, precompute_partitions
from .partition import (
    Dbscan,
    DbscanParams,
    Dgs,
    FeatureOnly,
    StrategyKind,
    Structural,
)
from .propagation import normalized_adjacency, propagate
from .validation import check_feature_matrix

VARIANTS = ("dbscan", "dgs0", "dgs1", "dgs2", "featureonly", "sgcn")
ABLATIONS = ("none", "only1", "only2", "nojk")


@dataclass(frozen=True)
class LayerPlan:
    """Ordered aggregation layers plus cross-layer fusion switches."""

    layers: tuple  # of (StrategyKind, FusionMode)
    use_jk: bool = True
    propagation_hops: int | None = None

    def __post_init__(self):
        if not self.layers:
            raise ConfigError("a pipeline needs at least one layer")
        for strategy, fusion in self.layers:
            if not isinstance(strategy, StrategyKind):
                raise ConfigError(f"not a strategy: {strategy!r}")
            if not isinstance(fusion, FusionMode):
                raise ConfigError(f"not a fusion mode: {fusion!r}")

    @property
    def depth(self) -> int:
        return len(self.layers)

    def output_dim(self, input_dim: int) -> int:
        dims = [input_dim * 2 ** (i + 1) for i in range(self.depth)]
        return sum(dims) if self.use_jk else dims[-1]


def build_pipeline(variant: str, depth: int = 2, ablation: str = "none",
                   fusion="max", hops: int = 2,
                   dbscan_params: DbscanParams | None = None,
                   feature_k: int | None = None) -> LayerPlan:
    """Layer plan for a named variant.

    All structure-seeded variants start with a structural layer; the
    feature-only variant never consults the structure. The sgcn variant
    prepends normalized multi-hop propagation of the input features.
    """
    variant = variant.strip().lower().replace("-", "").replace("_", "")
    fusion = FusionMode.parse(fusion)
    if depth < 1 or depth > 6:
        raise ConfigError(f"depth must be within 1..6, got {depth}")
    if ablation not in ABLATIONS:
        raise ConfigError(f"unknown ablation {ablation!r}; use one of {ABLATIONS}")

    propagation_hops = None
    if variant == "dbscan":
        upper: StrategyKind = Dbscan(dbscan_params)
    elif variant in ("dgs0", "dgs1", "dgs2"):
        upper = Dgs(int(variant[-1]))
    elif variant == "featureonly":
        upper = FeatureOnly(feature_k)
    elif variant == "sgcn":
        upper = Structural()
        propagation_hops = hops
    else:
        raise ConfigError(f"unknown variant {variant!r}; use one of {VARIANTS}")

    if variant == "featureonly":
        layers = [(FeatureOnly(feature_k), fusion)] * depth
    else:
        layers = [(Structural(), fusion)] + [(upper, fusion)] * (depth - 1)

    use_jk = True
    if ablation == "only1":
        layers = layers[:1]
    elif ablation == "only2":
        if depth < 2:
            raise ConfigError("only2 requires depth >= 2")
        layers = layers[1:2]
    elif ablation == "nojk":
        use_jk = False
    return LayerPlan(layers=tuple(layers), use_jk=use_jk,
                     propagation_hops=propagation_hops)


def run_plan(g: Graph, feats, plan: LayerPlan, cache=None,
             workers=None) -> np.ndarray:
    """Execute a layer plan over the whole graph and fuse layer outputs."""
    feats = check_feature_matrix(feats, num_rows=g.num_nodes)
    if plan.propagation_hops is not None:
        feats = propagate(normalized_adjacency(g), feats,
                          plan.propagation_hops)
    if cache is None:
        cache = precompute_partitions(g, workers=workers)
    outputs = []
    current = feats
    for strategy, fusion in plan.layers:
        current = layer_forward(g, current, strategy, fusion, cache,
                                workers=workers)
        outputs.append(current)
    return jk_concat(outputs) if plan.use_jk else outputs[-1]


class SDGNNEmbedding(BaseEstimator, TransformerMixin):
    """Parameter-free graph embedding as a sklearn-style transformer.

    fit() binds a graph and precomputes its per-node structural
    partitions; transform() maps a node-feature matrix to the stacked
    aggregation embedding. The transform is deterministic and contains
    no trainable state.
    """

    def __init__(self, variant="dgs0", depth=2, fusion="max",
                 ablation="none", hops=2, eps=None, min_pts=2,
                 feature_k=None, workers=None):
        self.variant = variant
        self.depth = depth
        self.fusion = fusion
        self.ablation = ablation
        self.hops = hops
        self.eps = eps
        self.min_pts = min_pts
        self.feature_k = feature_k
        self.workers = workers

    def _plan(self) -> LayerPlan:
        params = None
        if self.eps is not None:
            params = DbscanParams(eps=self.eps, min_pts=self.min_pts)
        return build_pipeline(
            self.variant, depth=self.depth, ablation=self.ablation,
            fusion=self.fusion, hops=self.hops, dbscan_params=params,
            feature_k=self.feature_k,
        )

    def fit(self, graph: Graph, y=None):
        if not isinstance(graph, Graph):
            raise ConfigError("fit expects a Graph")
        self.plan_ = self._plan()
        self.graph_ = graph
        self.cache_ = precompute_partitions(graph, workers=self.workers)
        return self

    def transform(self, X) -> np.ndarray:
        if not hasattr(self, "graph_"):
            raise NotFittedError("SDGNNEmbedding is not fitted yet")
        return run_plan(self.graph_, X, self.plan_, cache=self.cache_,
                        workers=self.workers)

    def fit_transform(self, graph: Graph, X) -> np.ndarray:
        return self.fit(graph).transform(X)
