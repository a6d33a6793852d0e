"""Benchmark protocol: seeded splits, repeated runs, variant pipelines.

For every training ratio the protocol draws floor(p*n) training nodes,
rounds 10% of the remainder (half up) into a validation set, and tests
on the rest. Each configuration runs several times with per-run seeds;
embeddings are split-independent, so they are computed once per variant
and reused across every (ratio, run) cell.
"""

from __future__ import annotations

import hashlib
import time
from dataclasses import dataclass, field

import numpy as np

from . import propagation
from .classifier import TrainConfig, evaluate, train
from .errors import ConfigError
from .graph import Graph
from .partition import DbscanParams
from .pipeline import ABLATIONS, LayerPlan, build_pipeline, run_plan

PAPER_RATIOS = (0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85)


@dataclass(frozen=True)
class Split:
    train: np.ndarray
    val: np.ndarray
    test: np.ndarray


def make_split(n: int, ratio: float, seed: int) -> Split:
    """Disjoint, exhaustive train/val/test node sets for one run."""
    if not 0.0 < ratio < 1.0:
        raise ConfigError(f"ratio must be in (0, 1), got {ratio}")
    n_train = int(np.floor(ratio * n))
    remainder = n - n_train
    n_val = (remainder + 5) // 10  # 10% of the remainder, rounded half up
    n_test = remainder - n_val
    if n_train == 0 or n_val == 0 or n_test == 0:
        raise ConfigError(
            f"degenerate split for n={n}, ratio={ratio}: "
            f"train={n_train}, val={n_val}, test={n_test}"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return Split(
        train=np.sort(perm[:n_train]),
        val=np.sort(perm[n_train:n_train + n_val]),
        test=np.sort(perm[n_train + n_val:]),
    )


@dataclass
class ExperimentConfig:
    variant: str = "dgs0"
    ratios: tuple = PAPER_RATIOS
    runs: int = 5
    fusion: str = "max"
    ablation: str = "none"
    depth: int = 2
    propagation_hops: int = 2
    base_seed: int = 0
    eps: float | None = None
    min_pts: int = 2
    feature_k: int | None = None
    dataset: str = "unnamed"
    train: TrainConfig = field(default_factory=lambda: TrainConfig(dtype="float32"))
    workers: int | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.ablation not in ABLATIONS:
            raise ConfigError(f"unknown ablation {self.ablation!r}")
        for r in self.ratios:
            if not 0.0 < r < 1.0:
                raise ConfigError(f"ratio {r} outside (0, 1)")

    def plan(self) -> LayerPlan:
        params = None
        if self.eps is not None:
            params = DbscanParams(eps=self.eps, min_pts=self.min_pts)
        return build_pipeline(
            self.variant, depth=self.depth, ablation=self.ablation,
            fusion=self.fusion, hops=self.propagation_hops,
            dbscan_params=params, feature_k=self.feature_k,
        )


@dataclass
class MetricsReport:
    dataset: str
    variant: str
    fusion: str
    depth: int
    ablation: str
    cells: list
    summary: dict
    meta: dict

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "variant": self.variant,
            "fusion": self.fusion,
            "depth": self.depth,
            "ablation": self.ablation,
            "cells": self.cells,
            "summary": self.summary,
            "meta": self.meta,
        }

    def mean_accuracy(self, ratio=None) -> float:
        accs = [c["accuracy"] for c in self.cells
                if ratio is None or c["ratio"] == ratio]
        return float(np.mean(accs))


def run_experiment(g: Graph, feats, labels, cfg: ExperimentConfig) -> MetricsReport:
    """Full protocol for one variant: embed once, then train per cell."""
    labels = np.asarray(labels, dtype=np.int64)
    if len(labels) != g.num_nodes:
        raise ConfigError(
            f"labels cover {len(labels)} nodes, graph has {g.num_nodes}"
        )
    num_classes = int(labels.max()) + 1
    plan = cfg.plan()

    propagate_before = propagation.propagate_call_count()
    t0 = time.perf_counter()
    embeddings = run_plan(g, feats, plan, workers=cfg.workers)
    agg_seconds = time.perf_counter() - t0
    embed_calls = 1
    digest = hashlib.sha256(np.ascontiguousarray(embeddings).tobytes()).hexdigest()

    cells = []
    for ratio in cfg.ratios:
        for run in range(cfg.runs):
            seed = cfg.base_seed + run
            split = make_split(g.num_nodes, ratio, seed)
            train_cfg = TrainConfig(
                lr=cfg.train.lr, weight_decay=cfg.train.weight_decay,
                max_epochs=cfg.train.max_epochs, patience=cfg.train.patience,
                dropout_rate=cfg.train.dropout_rate, seed=seed,
                hidden_dim=cfg.train.hidden_dim, dtype=cfg.train.dtype,
            )
            t1 = time.perf_counter()
            result = train(embeddings, labels, split, train_cfg,
                           num_classes=num_classes)
            train_seconds = time.perf_counter() - t1
            accuracy = evaluate(result.params, embeddings, labels, split.test)
            cells.append({
                "ratio": ratio,
                "run": run,
                "seed": seed,
                "accuracy": accuracy,
                "agg_seconds": agg_seconds,
                "train_seconds": train_seconds,
            })

    summary = {
        str(ratio): float(np.mean([c["accuracy"] for c in cells
                                   if c["ratio"] == ratio]))
        for ratio in cfg.ratios
    }
    meta = {
        "num_nodes": g.num_nodes,
        "num_edges": g.num_edges,
        "num_classes": num_classes,
        "embedding_dim": int(embeddings.shape[1]),
        "embedding_sha256": digest,
        "embed_calls": embed_calls,
        "propagate_calls": propagation.propagate_call_count() - propagate_before,
        "runs": cfg.runs,
        "base_seed": cfg.base_seed,
    }
    return MetricsReport(
        dataset=cfg.dataset, variant=cfg.variant, fusion=cfg.fusion,
        depth=cfg.depth, ablation=cfg.ablation, cells=cells,
        summary=summary, meta=meta,
    )
