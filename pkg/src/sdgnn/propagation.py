"""Symmetric normalized multi-hop propagation over the graph.

Adds a self-loop to every node, normalizes the augmented adjacency
symmetrically, and applies it k times to the feature matrix as a
one-time preprocessing step. The k-th power is never materialized;
features are propagated by repeated sparse products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ShapeError
from .graph import Graph

# diagnostics: one propagate() per experiment is the expected pattern
_propagate_calls = 0


def propagate_call_count() -> int:
    return _propagate_calls


def reset_propagate_counter():
    global _propagate_calls
    _propagate_calls = 0


@dataclass(frozen=True)
class NormalizedAdjacency:
    """CSR matrix S with S[u,v] = 1/sqrt(deg(u) * deg(v)) on A+I support.

    Degrees count the self-loop, so isolated nodes get S[v,v] = 1. The
    matrix is symmetric by construction with spectral radius <= 1.
    """

    matrix: sp.csr_matrix

    @property
    def num_nodes(self) -> int:
        return self.matrix.shape[0]

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()


def normalized_adjacency(g: Graph) -> NormalizedAdjacency:
    """Build S = normalize(A + I) from the graph's CSR adjacency."""
    n = g.num_nodes
    adj = sp.csr_matrix(
        (np.ones(len(g.indices)), g.indices, g.indptr), shape=(n, n)
    )
    aug = (adj + sp.identity(n, format="csr")).tocoo()
    deg = g.degrees() + 1
    # exact 1/sqrt(deg_u * deg_v) per entry keeps S bitwise symmetric
    data = 1.0 / np.sqrt((deg[aug.row] * deg[aug.col]).astype(np.float64))
    s = sp.csr_matrix((data, (aug.row, aug.col)), shape=(n, n))
    s.sort_indices()
    return NormalizedAdjacency(matrix=s)


def propagate(s: NormalizedAdjacency, x, k: int = 2) -> np.ndarray:
    """Apply S to the features k times: one sparse product per hop."""
    global _propagate_calls
    if k < 1:
        raise ConfigError(f"propagation hop count must be >= 1, got {k}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != s.num_nodes:
        raise ShapeError(
            f"feature rows {x.shape[0]} != num_nodes {s.num_nodes}"
        )
    _propagate_calls += 1
    out = x
    for _ in range(k):
        out = s.matrix @ out
    return np.ascontiguousarray(out)
