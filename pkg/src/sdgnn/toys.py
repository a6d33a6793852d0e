"""Small bundled graphs used by the CLI check command, docs, and tests."""

from __future__ import annotations

import numpy as np

from .graph import Graph


def branching_hub():
    """Hub node 1 whose neighborhood splits into two pairs and a singleton.

    Neighbors 2-3 and 4-5 are internally connected; 6 stands alone.
    Features are scalar per node; node 0 is isolated.
    """
    edges = [(1, 2), (1, 3), (1, 4), (1, 5), (1, 6), (2, 3), (4, 5)]
    g = Graph.from_edges(edges)
    feats = np.array([[0.0], [0.7], [0.2], [0.5], [0.4], [0.6], [0.3]])
    return g, feats


def grouped_outlier():
    """Center 0 with one outlier neighbor inside an otherwise mild branch.

    The branch {1, 2} carries the outlier value 0.8; the two singleton
    branches carry 0.55 and 0.4. Group means are 0.5 / 0.55 / 0.4, so a
    group-level max is dominated by 0.55 rather than by the raw outlier.
    """
    edges = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2)]
    g = Graph.from_edges(edges)
    feats = np.array([[0.9], [0.2], [0.8], [0.55], [0.4]])
    return g, feats


def path_graph(n: int) -> Graph:
    return Graph.from_edges([(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges([(0, i + 1) for i in range(leaves)])


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Erdos-Renyi graph; may contain isolated nodes."""
    rng = np.random.default_rng(seed)
    mask = rng.random((n, n)) < p
    iu = np.triu_indices(n, k=1)
    pairs = [(int(i), int(j)) for i, j in zip(*iu) if mask[i, j]]
    if not pairs:
        pairs = [(0, 1 % max(n, 2))] if n >= 2 else []
    g = Graph.from_edges(pairs, num_nodes=n)
    return g


def synthetic_communities(num_communities=3, size=20, feature_dim=8,
                          p_in=0.3, p_out=0.01, noise=0.35, seed=0):
    """Labeled planted-partition graph with community-informative features."""
    rng = np.random.default_rng(seed)
    n = num_communities * size
    labels = np.repeat(np.arange(num_communities), size)
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            p = p_in if labels[i] == labels[j] else p_out
            if rng.random() < p:
                edges.append((i, j))
    g = Graph.from_edges(edges, num_nodes=n)
    centers = rng.normal(size=(num_communities, feature_dim))
    feats = centers[labels] + noise * rng.normal(size=(n, feature_dim))
    return g, feats, labels
