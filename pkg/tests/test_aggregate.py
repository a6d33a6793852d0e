import numpy as np
import pytest

from sdgnn import (
    FusionMode,
    Graph,
    GroupPartition,
    ShapeError,
    group_mean,
    induced_components,
    jk_concat,
    layer_forward,
    precompute_partitions,
    sdmp_aggregate,
)
from sdgnn.partition import Dgs, Structural

from conftest import er_graph, random_features


def direct_group_update(center, groups, feats, fusion):
    """Independent oracle: literal per-group mean / concat / fuse / relu."""
    if not groups:
        vec = np.concatenate([center, center])
    else:
        rows = []
        for grp in groups:
            total = np.zeros_like(np.asarray(center, dtype=float))
            for u in sorted(grp):
                total = total + feats[u]
            rows.append(np.concatenate([center, total / len(grp)]))
        stacked = np.stack(rows)
        if fusion is FusionMode.MAX:
            vec = stacked.max(axis=0)
        else:
            vec = stacked.sum(axis=0) / len(rows)
    return np.where(vec > 0, vec, 0.0)


class TestGroupMean:
    def test_pair_mean(self, hub_graph):
        _, feats = hub_graph
        assert group_mean(feats, (2, 3)).tolist() == [0.35]

    def test_singleton_passthrough(self, hub_graph):
        _, feats = hub_graph
        assert group_mean(feats, (6,)).tolist() == [0.3]

    def test_identical_vectors(self):
        feats = np.tile([1.5, -2.0], (4, 1))
        assert group_mean(feats, (0, 1, 2, 3)).tolist() == [1.5, -2.0]

    def test_empty_group_rejected(self):
        with pytest.raises(ValueError):
            group_mean(np.zeros((2, 2)), ())


class TestSdmpAggregate:
    def test_hub_worked_example(self, hub_graph):
        g, feats = hub_graph
        part = induced_components(g, 1)
        out = sdmp_aggregate(feats[1], part, feats, FusionMode.MAX)
        assert out.tolist() == [0.7, 0.5]

    def test_outlier_group_consensus(self, outlier_graph):
        g, feats = outlier_graph
        part = induced_components(g, 0)
        means = [group_mean(feats, grp)[0] for grp in part.groups]
        assert means == [0.5, 0.55, 0.4]
        out = sdmp_aggregate(feats[0], part, feats, FusionMode.MAX)
        assert out[1] == 0.55

    def test_single_group_fusion_is_identity(self):
        feats = np.array([[0.2, -1.0], [0.4, 3.0], [0.6, 5.0]])
        part = GroupPartition.from_groups(0, [[1, 2]])
        out = sdmp_aggregate(feats[0], part, feats, FusionMode.MAX)
        expected = np.maximum(
            np.concatenate([feats[0], feats[[1, 2]].mean(axis=0)]), 0.0
        )
        assert np.array_equal(out, expected)

    def test_empty_partition_self_concat(self):
        center = np.array([0.3, -0.2])
        part = GroupPartition(owner=0, groups=())
        out = sdmp_aggregate(center, part, np.zeros((1, 2)), FusionMode.MAX)
        assert out.tolist() == [0.3, 0.0, 0.3, 0.0]

    def test_matches_direct_oracle_on_random_instances(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            m = int(rng.integers(0, 7))
            dim = int(rng.integers(1, 5))
            feats = rng.normal(size=(m + 1, dim))
            ids = list(range(1, m + 1))
            rng.shuffle(ids)
            groups, rest = [], ids
            while rest:
                take = int(rng.integers(1, len(rest) + 1))
                groups.append(rest[:take])
                rest = rest[take:]
            part = GroupPartition.from_groups(0, groups)
            for fusion in FusionMode:
                ours = sdmp_aggregate(feats[0], part, feats, fusion)
                ref = direct_group_update(feats[0], part.groups, feats, fusion)
                assert np.allclose(ours, ref, rtol=0, atol=1e-12)

    def test_output_dim_doubles(self):
        feats = np.ones((3, 5))
        part = GroupPartition.from_groups(0, [[1], [2]])
        assert sdmp_aggregate(feats[0], part, feats, FusionMode.MAX).shape == (10,)

    def test_outputs_nonnegative(self):
        feats = -np.ones((3, 4))
        part = GroupPartition.from_groups(0, [[1, 2]])
        out = sdmp_aggregate(feats[0], part, feats, FusionMode.MAX)
        assert np.all(out >= 0)

    def test_max_dominance(self):
        rng = np.random.default_rng(13)
        feats = rng.normal(size=(6, 3))
        part = GroupPartition.from_groups(0, [[1, 2], [3], [4, 5]])
        z_rows = [
            np.concatenate([feats[0], feats[list(grp)].mean(axis=0)])
            for grp in part.groups
        ]
        fused = sdmp_aggregate(feats[0], part, feats, FusionMode.MAX)
        pre_relu = np.stack(z_rows).max(axis=0)
        for coord, value in enumerate(pre_relu):
            assert any(abs(row[coord] - value) < 1e-15 for row in z_rows)
        assert np.array_equal(fused, np.maximum(pre_relu, 0))

    def test_max_fusion_dominates_mean_fusion(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            feats = rng.normal(size=(5, 3))
            part = GroupPartition.from_groups(0, [[1], [2, 3], [4]])
            hi = sdmp_aggregate(feats[0], part, feats, FusionMode.MAX)
            lo = sdmp_aggregate(feats[0], part, feats, FusionMode.MEAN)
            assert np.all(hi >= lo - 1e-15)

    def test_dimension_mismatch(self):
        part = GroupPartition.from_groups(0, [[1]])
        with pytest.raises(ShapeError):
            sdmp_aggregate(np.ones(3), part, np.ones((2, 2)), FusionMode.MAX)


class TestLayerForward:
    def test_hub_row(self, hub_graph):
        g, feats = hub_graph
        cache = precompute_partitions(g)
        out = layer_forward(g, feats, Structural(), FusionMode.MAX, cache)
        assert out[1].tolist() == [0.7, 0.5]
        assert out.shape == (7, 2)

    def test_isolated_nodes_self_concat(self):
        g = Graph.from_edges([], num_nodes=4)
        feats = np.arange(8.0).reshape(4, 2) - 3.0
        cache = precompute_partitions(g)
        out = layer_forward(g, feats, Structural(), FusionMode.MAX, cache)
        expected = np.maximum(np.hstack([feats, feats]), 0.0)
        assert np.array_equal(out, expected)

    def test_dgs_layer_matches_node_by_node_composition(self):
        from sdgnn import dgs_partition

        for trial in range(5):
            g = er_graph(trial + 40)
            feats = random_features(g, dim=3, seed=trial)
            cache = precompute_partitions(g)
            first = layer_forward(g, feats, Structural(), FusionMode.MAX, cache)
            second = layer_forward(g, first, Dgs(0), FusionMode.MAX, cache)
            for v in range(g.num_nodes):
                part = dgs_partition(g, v, first, cache[v], 0)
                ref = sdmp_aggregate(first[v], part, first, FusionMode.MAX)
                assert np.array_equal(second[v], ref)

    def test_row_count_mismatch(self):
        g = er_graph(3)
        with pytest.raises(ShapeError):
            layer_forward(g, np.ones((g.num_nodes + 1, 2)), Structural(),
                          FusionMode.MAX, precompute_partitions(g))

    def test_parallel_workers_bit_identical(self):
        g = er_graph(12)
        feats = random_features(g, dim=3, seed=5)
        cache = precompute_partitions(g)
        a = layer_forward(g, feats, Structural(), FusionMode.MAX, cache, workers=1)
        b = layer_forward(g, feats, Structural(), FusionMode.MAX, cache, workers=4)
        assert np.array_equal(a, b)


class TestJkConcat:
    def test_single_layer_identity(self):
        mat = np.arange(6.0).reshape(3, 2)
        assert np.array_equal(jk_concat([mat]), mat)

    def test_two_layer_dims(self):
        d = 3
        a = np.zeros((4, 2 * d))
        b = np.zeros((4, 4 * d))
        assert jk_concat([a, b]).shape == (4, 6 * d)

    def test_row_mismatch(self):
        with pytest.raises(ShapeError):
            jk_concat([np.zeros((3, 2)), np.zeros((4, 2))])

    def test_preserves_layer_order(self):
        a = np.full((2, 1), 1.0)
        b = np.full((2, 1), 2.0)
        assert jk_concat([a, b]).tolist() == [[1.0, 2.0], [1.0, 2.0]]
