"""Built-in diagnostic suites behind the `check` CLI subcommand.

Each suite validates one pillar against an independently coded oracle
or a hand-checked expected value. The oracle code here deliberately
avoids the production code paths it is checking.
"""

from __future__ import annotations

import numpy as np

from .aggregate import FusionMode, group_mean, sdmp_aggregate, layer_forward
from .graph import Graph, induced_components, precompute_partitions, load_edge_list
from .partition import NOISE, Dbscan, Dgs, FeatureOnly, Structural, dbscan
from .pipeline import LayerPlan, run_plan
from .propagation import normalized_adjacency, propagate
from .toys import branching_hub, grouped_outlier, random_graph


def bfs_components_oracle(neighbor_sets, members):
    """Connected components of the induced subgraph, by plain BFS."""
    members = sorted(members)
    member_set = set(members)
    seen = set()
    comps = []
    for start in members:
        if start in seen:
            continue
        queue = [start]
        seen.add(start)
        comp = []
        while queue:
            node = queue.pop(0)
            comp.append(node)
            for nxt in neighbor_sets[node]:
                if nxt in member_set and nxt not in seen:
                    seen.add(nxt)
                    queue.append(nxt)
        comps.append(tuple(sorted(comp)))
    return tuple(sorted(comps))


def dbscan_oracle(points, eps, min_pts):
    """Reference density clustering built from set-level definitions."""
    n = len(points)
    dist = np.linalg.norm(points[:, None, :] - points[None, :, :], axis=2)
    neighborhoods = [set(np.flatnonzero(dist[i] <= eps)) for i in range(n)]
    cores = [i for i in range(n) if len(neighborhoods[i]) >= min_pts]
    core_set = set(cores)

    labels = {}
    cid = 0
    for c in cores:
        if c in labels:
            continue
        stack = {c}
        while stack:
            i = stack.pop()
            if i in labels:
                continue
            labels[i] = cid
            stack |= (neighborhoods[i] & core_set) - set(labels)
        cid += 1

    out = np.full(n, NOISE, dtype=np.int64)
    for c, lab in labels.items():
        out[c] = lab
    for p in range(n):
        if p in core_set:
            continue
        reach = sorted(neighborhoods[p] & core_set)
        if not reach:
            continue
        best = min(reach, key=lambda c: (dist[p, c], c))
        out[p] = labels[best]
    return out


def dense_normalized_oracle(g: Graph):
    """Dense D^-1/2 (A+I) D^-1/2 for small graphs."""
    n = g.num_nodes
    a = np.zeros((n, n))
    for v in range(n):
        a[v, g.neighbors(v)] = 1.0
    a += np.eye(n)
    d = a.sum(axis=1)
    scale = np.diag(1.0 / np.sqrt(d))
    return scale @ a @ scale


def _strategies():
    return [Structural(), Dbscan(), Dgs(0), FeatureOnly()]


def check_worked_examples():
    g, feats = branching_hub()
    part = induced_components(g, 1)
    if part.groups != ((2, 3), (4, 5), (6,)):
        return False, f"hub partition mismatch: {part.groups}"
    out = sdmp_aggregate(feats[1], part, feats, FusionMode.MAX)
    if not np.array_equal(out, np.array([0.7, 0.5])):
        return False, f"hub aggregate mismatch: {out}"

    g2, feats2 = grouped_outlier()
    part2 = induced_components(g2, 0)
    means = [group_mean(feats2, grp)[0] for grp in part2.groups]
    fused = sdmp_aggregate(feats2[0], part2, feats2, FusionMode.MAX)
    if means != [0.5, 0.55, 0.4] or fused[1] != 0.55:
        return False, f"outlier example mismatch: means={means}, fused={fused}"
    return True, "worked examples reproduced exactly"


def check_component_oracle(num_graphs=60, seed=0):
    rng = np.random.default_rng(seed)
    for trial in range(num_graphs):
        n = int(rng.integers(2, 21))
        p = float(rng.choice([0.1, 0.3, 0.5]))
        g = random_graph(n, p, seed=trial + 1000)
        nbr_sets = [set(map(int, g.neighbors(v))) for v in range(g.num_nodes)]
        for v in range(g.num_nodes):
            expected = bfs_components_oracle(nbr_sets, nbr_sets[v])
            got = induced_components(g, v).groups
            if got != expected:
                return False, f"graph {trial} node {v}: {got} != {expected}"
    return True, f"components match BFS oracle on {num_graphs} graphs"


def check_dbscan_oracle(num_instances=25, seed=1):
    rng = np.random.default_rng(seed)
    for trial in range(num_instances):
        n = int(rng.integers(3, 40))
        pts = rng.random((n, 2))
        eps, min_pts = 0.3, 3
        ours = dbscan(pts, eps=eps, min_pts=min_pts)
        ref = dbscan_oracle(pts, eps, min_pts)
        if not np.array_equal(ours, ref):
            return False, f"instance {trial}: labels diverge"
    return True, f"dbscan matches reference on {num_instances} instances"


def check_propagation_oracle(num_graphs=20, seed=2):
    rng = np.random.default_rng(seed)
    for trial in range(num_graphs):
        n = int(rng.integers(2, 11))
        g = random_graph(n, 0.4, seed=trial + 2000)
        s = normalized_adjacency(g)
        dense = dense_normalized_oracle(g)
        if np.abs(s.toarray() - dense).max() > 1e-12:
            return False, f"graph {trial}: S mismatch"
        x = rng.random((g.num_nodes, 3))
        ours = propagate(s, x, 2)
        ref = dense @ dense @ x
        if np.abs(ours - ref).max() > 1e-10:
            return False, f"graph {trial}: propagation mismatch"
    return True, f"propagation matches dense oracle on {num_graphs} graphs"


def shuffled_edge_copies(g: Graph, orderings, seed):
    """The same edge set serialized in shuffled orders, then reloaded."""
    rng = np.random.default_rng(seed)
    base = [(int(u), int(v)) for u in range(g.num_nodes)
            for v in g.neighbors(u) if u < v]
    copies = []
    for _ in range(orderings):
        order = rng.permutation(len(base))
        flip = rng.random(len(base)) < 0.5
        lines = []
        for idx, fl in zip(order, flip):
            u, v = base[idx]
            lines.append(f"{v} {u}" if fl else f"{u} {v}")
        copies.append(load_edge_list("\n".join(lines).encode()))
    return copies


def check_permutation_invariance(num_graphs=20, orderings=3, seed=3):
    rng = np.random.default_rng(seed)
    for trial in range(num_graphs):
        n = int(rng.integers(4, 25))
        g = random_graph(n, 0.25, seed=trial + 3000)
        copies = shuffled_edge_copies(g, orderings, seed=trial)
        reference, rest = copies[0], copies[1:]
        feats = np.random.default_rng(trial).random((reference.num_nodes, 4))
        for strategy in _strategies():
            plan = LayerPlan(layers=((Structural(), FusionMode.MAX),
                                     (strategy, FusionMode.MAX)))
            expected = run_plan(reference, feats, plan)
            for copy in rest:
                if copy.num_nodes != reference.num_nodes:
                    return False, f"graph {trial}: node count changed on reload"
                other = run_plan(copy, feats, plan)
                if not np.array_equal(expected, other):
                    return False, (f"graph {trial} strategy "
                                   f"{type(strategy).__name__}: bits diverge")
    return True, f"bit-identical embeddings across orderings on {num_graphs} graphs"


SUITES = [
    ("worked-examples", check_worked_examples),
    ("component-oracle", check_component_oracle),
    ("dbscan-oracle", check_dbscan_oracle),
    ("propagation-oracle", check_propagation_oracle),
    ("permutation-invariance", check_permutation_invariance),
]


def run_all(verbose_print=print):
    """Run every suite; returns True when all pass."""
    all_ok = True
    for name, fn in SUITES:
        ok, message = fn()
        all_ok &= ok
        verbose_print(f"[{'PASS' if ok else 'FAIL'}] {name}: {message}")
    return all_ok
