"""Graph encoding: adjacency, features, normalization, standardization."""

import numpy as np
import pytest

from jamnav.graph import (
    GraphSnapshot,
    Normalizer,
    build_adjacency,
    build_features,
    destandardize_label,
    normalize_adjacency,
    standardize,
    standardize_label,
)
from jamnav.jamfield import JammerField
from jamnav.swarm import UavState


class TestBuildAdjacency:
    def test_just_inside_range(self):
        adj = build_adjacency([(0.0, 0.0), (19.9, 0.0)], [False, False], 20.0)
        assert adj[0, 1] == 1 and adj[1, 0] == 1

    def test_boundary_is_excluded(self):
        adj = build_adjacency([(0.0, 0.0), (20.0, 0.0)], [False, False], 20.0)
        assert adj[0, 1] == 0

    def test_chain_of_three(self):
        pos = [(0.0, 0.0), (0.0, 15.0), (0.0, 45.0)]
        adj = build_adjacency(pos, [False] * 3, 20.0)
        # pairwise-distance oracle: only 0-1 is under 20 m
        expected = np.zeros((3, 3), dtype=int)
        expected[0, 1] = expected[1, 0] = 1
        assert np.array_equal(adj, expected)

    def test_disrupted_nodes_are_isolated(self):
        pos = [(0.0, 0.0), (5.0, 0.0), (10.0, 0.0)]
        adj = build_adjacency(pos, [False, True, False], 20.0)
        assert adj[1].sum() == 0 and adj[:, 1].sum() == 0
        assert adj[0, 2] == 1

    def test_symmetry_and_zero_diagonal_random(self):
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            n = int(rng.integers(1, 9))
            pos = rng.uniform(0, 60, size=(n, 2))
            down = rng.random(n) < 0.2
            adj = build_adjacency(pos, down, 20.0)
            assert np.array_equal(adj, adj.T)
            assert np.all(np.diag(adj) == 0)
            assert set(np.unique(adj)) <= {0, 1}


class TestBuildFeatures:
    def test_stationary_swarm_has_zero_rates(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        swarm = [UavState(i, (10.0 + i, 5.0), (0.0, 0.0)) for i in range(3)]
        feats = build_features(swarm, f)
        assert np.all(feats[:, 5] == 0.0)

    def test_known_row(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        swarm = [UavState(0, (10.0, 0.0), (2.0, 0.0)),
                 UavState(1, (50.0, 0.0), (0.0, 0.0))]
        feats = build_features(swarm, f)
        assert feats[0, :4] == pytest.approx([10.0, 0.0, 2.0, 0.0])
        assert feats[0, 4] == pytest.approx(0.3486784401, rel=1e-12)
        assert feats[0, 5] == pytest.approx(-0.073473880495405, rel=1e-12)

    def test_mirrored_uavs_share_probability(self):
        f = JammerField(30.0, 40.0, k=1.0, decay_a=0.92)
        a = UavState(0, (30.0 + 7.0, 40.0 - 3.0), (1.0, 2.0))
        b = UavState(1, (30.0 - 7.0, 40.0 + 3.0), (-1.0, -2.0))
        feats = build_features([a, b], f)
        assert feats[0, 4] == feats[1, 4]

    def test_disrupted_uav_contributes_zero_rate(self):
        f = JammerField(0.0, 0.0, k=1.0, decay_a=0.9)
        frozen = UavState(0, (8.0, 0.0), (0.0, 0.0), disrupted=True)
        live = UavState(1, (30.0, 0.0), (3.0, 0.0))
        feats = build_features([frozen, live], f)
        assert feats[0, 5] == 0.0
        assert feats[1, 5] != 0.0


class TestNormalizeAdjacency:
    def test_single_node(self):
        assert np.array_equal(normalize_adjacency(np.zeros((1, 1))), np.ones((1, 1)))

    def test_two_connected(self):
        a_hat = normalize_adjacency(np.array([[0, 1], [1, 0]]))
        assert a_hat == pytest.approx(np.full((2, 2), 0.5))

    def test_two_isolated(self):
        a_hat = normalize_adjacency(np.zeros((2, 2)))
        assert np.array_equal(a_hat, np.eye(2))

    def test_structure_random(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            n = int(rng.integers(1, 10))
            pos = rng.uniform(0, 50, size=(n, 2))
            adj = build_adjacency(pos, [False] * n, 20.0)
            a_hat = normalize_adjacency(adj)
            assert np.allclose(a_hat, a_hat.T)
            assert np.all(a_hat >= 0.0)
            assert np.all(np.diag(a_hat) > 0.0)

    def test_permutation_equivariance(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(2, 9))
            pos = rng.uniform(0, 50, size=(n, 2))
            adj = build_adjacency(pos, [False] * n, 20.0)
            perm = rng.permutation(n)
            p_mat = np.eye(n)[perm]
            lhs = normalize_adjacency(p_mat @ adj @ p_mat.T)
            rhs = p_mat @ normalize_adjacency(adj) @ p_mat.T
            assert np.max(np.abs(lhs - rhs)) <= 1e-12


class TestNormalizer:
    def _identity(self):
        return Normalizer(np.zeros(6), np.ones(6), np.zeros(3), np.ones(3))

    def test_identity_transform(self):
        norm = self._identity()
        snap = GraphSnapshot(np.zeros((2, 2)), np.arange(12, dtype=float).reshape(2, 6))
        out = standardize(snap, norm)
        assert np.array_equal(out.features, snap.features)
        assert np.array_equal(destandardize_label((1.0, 2.0, 3.0), norm), [1, 2, 3])

    def test_roundtrip_random_vectors(self):
        rng = np.random.default_rng(21)
        norm = Normalizer(rng.normal(size=6), rng.uniform(0.5, 3, size=6),
                          rng.normal(size=3), rng.uniform(0.5, 3, size=3))
        for _ in range(1000):
            y = rng.normal(scale=50, size=3)
            back = destandardize_label(standardize_label(y, norm), norm)
            assert back == pytest.approx(y, rel=1e-12, abs=1e-12)

    def test_column_equal_to_shift_standardizes_to_zero(self):
        norm = Normalizer(np.full(6, 2.5), np.ones(6), np.zeros(3), np.ones(3))
        snap = GraphSnapshot(np.zeros((3, 3)), np.full((3, 6), 2.5))
        assert np.all(standardize(snap, norm).features == 0.0)

    def test_rejects_nonpositive_scale(self):
        with pytest.raises(ValueError):
            Normalizer(np.zeros(6), np.zeros(6), np.zeros(3), np.ones(3))
        with pytest.raises(ValueError):
            Normalizer(np.zeros(6), np.ones(6), np.zeros(3), -np.ones(3))

    def test_fit_floors_constant_columns(self):
        feats = np.ones((50, 6))
        feats[:, 0] = np.linspace(0, 10, 50)
        labels = np.column_stack([np.linspace(5, 9, 50), np.ones(50), np.ones(50)])
        norm = Normalizer.fit(feats, labels)
        assert np.all(norm.feature_scale > 0)
        assert norm.feature_scale[1] == 1.0  # constant column left unscaled
        assert norm.label_scale[1] == 1.0
        assert norm.feature_scale[0] == pytest.approx(feats[:, 0].std())

    def test_dict_roundtrip(self):
        rng = np.random.default_rng(4)
        norm = Normalizer(rng.normal(size=6), rng.uniform(0.5, 3, size=6),
                          rng.normal(size=3), rng.uniform(0.5, 3, size=3))
        back = Normalizer.from_dict(norm.to_dict())
        assert np.array_equal(back.feature_shift, norm.feature_shift)
        assert np.array_equal(back.label_scale, norm.label_scale)


class TestGraphSnapshot:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            GraphSnapshot(np.zeros((2, 3)), np.zeros((2, 6)))
        with pytest.raises(ValueError):
            GraphSnapshot(np.zeros((2, 2)), np.zeros((3, 6)))
        with pytest.raises(ValueError):
            GraphSnapshot(np.zeros((2, 2)), np.zeros((2, 5)))
