"""Immutable sparse-graph storage and neighborhood structure queries.

A graph is stored as a CSR adjacency with strictly ascending neighbor
lists. The canonical ordering fixes the summation order of every
floating-point reduction downstream, which is what makes
order-invariance testable as bit-exact equality.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import EdgeListParseError
from .parallel import ordered_map

MAX_NODE_ID = 2**32 - 1


@dataclass(frozen=True)
class GroupPartition:
    """Disjoint grouping of one node's neighbor set.

    Groups are canonical: members ascend within each group and groups
    are ordered by their smallest member, so equal partitions compare
    equal as values regardless of how they were produced.
    """

    owner: int
    groups: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_groups(owner, groups) -> "GroupPartition":
        """Canonicalize a collection of non-empty member iterables."""
        canon = sorted(tuple(sorted(g)) for g in groups if len(g) > 0)
        return GroupPartition(owner=owner, groups=tuple(canon))

    @property
    def size(self) -> int:
        return len(self.groups)

    def members(self) -> tuple[int, ...]:
        return tuple(m for g in self.groups for m in g)


class Graph:
    """Undirected simple graph in CSR layout.

    Arrays are frozen after construction; all queries are pure reads
    and safe for unrestricted parallel access.
    """

    def __init__(self, indptr, indices):
        indptr = np.asarray(indptr, dtype=np.int64)
        indices = np.asarray(indices, dtype=np.int64)
        self._indptr = indptr
        self._indices = indices
        self._indptr.flags.writeable = False
        self._indices.flags.writeable = False

    @property
    def num_nodes(self) -> int:
        return len(self._indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self._indices) // 2

    @property
    def indptr(self):
        return self._indptr

    @property
    def indices(self):
        return self._indices

    def degree(self, v) -> int:
        self._check_node(v)
        return int(self._indptr[v + 1] - self._indptr[v])

    def neighbors(self, v) -> np.ndarray:
        """Ascending neighbor ids of v (read-only view)."""
        self._check_node(v)
        return self._indices[self._indptr[v]:self._indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self._indptr)

    def _check_node(self, v):
        if not 0 <= v < self.num_nodes:
            raise IndexError(f"node {v} out of range [0, {self.num_nodes})")

    @staticmethod
    def from_edges(edges, num_nodes=None) -> "Graph":
        """Build from (u, v) pairs; drops duplicates and self-loops."""
        arr = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if num_nodes is None:
            num_nodes = int(arr.max()) + 1 if arr.size else 0
        arr = arr[arr[:, 0] != arr[:, 1]]
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        uniq = np.unique(np.stack([lo, hi], axis=1), axis=0) if arr.size else arr
        # symmetrize, then sort rows (and columns within rows) for CSR
        if uniq.size:
            src = np.concatenate([uniq[:, 0], uniq[:, 1]])
            dst = np.concatenate([uniq[:, 1], uniq[:, 0]])
            order = np.lexsort((dst, src))
            src, dst = src[order], dst[order]
        else:
            src = np.empty(0, dtype=np.int64)
            dst = np.empty(0, dtype=np.int64)
        counts = np.bincount(src, minlength=num_nodes)
        indptr = np.concatenate([[0], np.cumsum(counts)])
        return Graph(indptr, dst)

    def __repr__(self):
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges})"


def load_edge_list(source) -> Graph:
    """Parse a whitespace-delimited "u v" edge list into a Graph.

    Accepts a path, a text stream, or a byte stream. Lines that are
    empty or start with '#' are ignored. Duplicate edges and self-loops
    are dropped; the node count is max id + 1.
    """
    if isinstance(source, (str, bytes)) and not isinstance(source, bytes):
        with open(source, "rb") as fh:
            return load_edge_list(fh)
    if isinstance(source, bytes):
        return load_edge_list(io.BytesIO(source))

    edges = []
    for lineno, raw in enumerate(source, start=1):
        if isinstance(raw, bytes):
            raw = raw.decode("utf-8", errors="replace")
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise EdgeListParseError(
                f"expected two node ids, got {len(parts)} fields", lineno
            )
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListParseError(
                f"non-integer node id in {line!r}", lineno
            ) from None
        if u < 0 or v < 0:
            raise EdgeListParseError("node ids must be non-negative", lineno)
        if u > MAX_NODE_ID or v > MAX_NODE_ID:
            raise EdgeListParseError(
                f"node id exceeds {MAX_NODE_ID}", lineno
            )
        edges.append((u, v))
    if not edges:
        return Graph(np.zeros(1, dtype=np.int64), np.empty(0, dtype=np.int64))
    return Graph.from_edges(edges)


class _UnionFind:
    """Union-find with path compression over 0..n-1."""

    __slots__ = ("parent",)

    def __init__(self, n):
        self.parent = list(range(n))

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def induced_components(g: Graph, v: int) -> GroupPartition:
    """Connected components of the subgraph induced by N(v)."""
    nbrs = g.neighbors(v)
    if len(nbrs) == 0:
        return GroupPartition(owner=v, groups=())
    pos = {int(u): i for i, u in enumerate(nbrs)}
    uf = _UnionFind(len(nbrs))
    for i, u in enumerate(nbrs):
        # edges internal to N(v): intersect u's neighbors with N(v)
        for w in np.intersect1d(g.neighbors(int(u)), nbrs, assume_unique=True):
            j = pos[int(w)]
            if j > i:
                uf.union(i, j)
    buckets: dict[int, list[int]] = {}
    for i, u in enumerate(nbrs):
        buckets.setdefault(uf.find(i), []).append(int(u))
    return GroupPartition.from_groups(v, buckets.values())


def structural_diversity(g: Graph, v: int) -> int:
    """Number of connected components in the neighborhood-induced subgraph."""
    return induced_components(g, v).size


def precompute_partitions(g: Graph, workers=None) -> list[GroupPartition]:
    """Per-node component partitions, computed once and reused by every layer."""
    return ordered_map(lambda v: induced_components(g, v),
                       range(g.num_nodes), workers=workers)
