import itertools

import networkx as nx
import numpy as np
import pytest

from conftest import planted_blocks, random_similarity
from corrnet.clustering import (
    EigenSpectrum,
    Partition,
    eigengap_k,
    louvain,
    modularity,
    nsc,
    nsc_sweep,
    spectrum,
)
from corrnet.errors import ValidationError
from corrnet.metrics import ari


def modularity_oracle(w, assignment):
    """Direct double-sum evaluation of the modularity formula."""
    w = np.asarray(w, dtype=float)
    n = w.shape[0]
    s = w.sum() / 2.0
    sw = w.sum(axis=1)
    q = 0.0
    for i in range(n):
        for j in range(n):
            if assignment[i] == assignment[j]:
                q += w[i, j] - sw[i] * sw[j] / (2.0 * s)
    return q / (2.0 * s)


def two_triangles(weight=1.0):
    w = np.zeros((6, 6))
    for a, b in ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)):
        w[a, b] = w[b, a] = weight
    return w


def all_partitions(n):
    """Every set partition of range(n) as canonical label tuples."""
    if n == 0:
        yield ()
        return
    for smaller in all_partitions(n - 1):
        k = max(smaller) + 1 if smaller else 0
        for c in range(k + 1):
            yield smaller + (c,)


class TestPartition:
    def test_from_labels_canonicalizes(self):
        p = Partition.from_labels(["b", "a", "b", "c"])
        assert p.assignment == (0, 1, 0, 2)
        assert p.k == 3

    def test_rejects_non_canonical(self):
        with pytest.raises(ValidationError):
            Partition((1, 0), 2)

    def test_clusters(self):
        p = Partition.from_labels([0, 1, 0, 2])
        assert p.clusters() == [(0, 2), (1,), (3,)]


class TestModularity:
    def test_two_disconnected_cliques(self):
        w = two_triangles(0.7)
        p = Partition.from_labels([0, 0, 0, 1, 1, 1])
        assert modularity(w, p) == pytest.approx(0.5, abs=1e-12)
        assert modularity(w, p) == pytest.approx(modularity_oracle(w, p.assignment), abs=1e-12)

    def test_one_cluster_matches_oracle(self):
        w = two_triangles()
        p = Partition.from_labels([0] * 6)
        assert modularity(w, p) == pytest.approx(modularity_oracle(w, [0] * 6), abs=1e-12)

    def test_singleton_partition_negative(self):
        w = two_triangles()
        p = Partition.from_labels(list(range(6)))
        q = modularity(w, p)
        assert q == pytest.approx(modularity_oracle(w, list(range(6))), abs=1e-12)
        assert q < 0

    def test_relabel_invariance(self):
        rng = np.random.default_rng(1)
        m = rng.random((8, 8))
        w = (m + m.T) / 2
        np.fill_diagonal(w, 0.0)
        labels = [0, 1, 2, 0, 1, 2, 0, 1]
        relabeled = [2, 0, 1, 2, 0, 1, 2, 0]
        assert modularity(w, Partition.from_labels(labels)) == modularity(
            w, Partition.from_labels(relabeled)
        )

    def test_scale_invariance(self):
        w = two_triangles(0.3)
        p = Partition.from_labels([0, 0, 0, 1, 1, 1])
        assert modularity(w, p) == pytest.approx(modularity(w * 4.0, p), abs=1e-12)

    def test_oracle_agreement_random(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            n = int(rng.integers(4, 10))
            m = rng.random((n, n))
            w = (m + m.T) / 2
            np.fill_diagonal(w, 0.0)
            labels = rng.integers(0, 3, size=n)
            p = Partition.from_labels(labels.tolist())
            assert modularity(w, p) == pytest.approx(
                modularity_oracle(w, p.assignment), abs=1e-12
            )

    def test_zero_total_rejected(self):
        with pytest.raises(ValidationError):
            modularity(np.zeros((3, 3)), Partition.from_labels([0, 1, 2]))


class TestLouvain:
    def test_two_disconnected_triangles_any_order(self):
        w = two_triangles()
        for order in ([0, 1, 2, 3, 4, 5], [5, 3, 1, 4, 2, 0], [2, 4, 0, 5, 1, 3]):
            p = louvain(w, vertex_order=order)
            assert p.assignment == (0, 0, 0, 1, 1, 1)

    def test_complete_k5_single_community(self):
        w = np.ones((5, 5)) - np.eye(5)
        p = louvain(w)
        assert p.k == 1
        # exhaustive oracle: no partition of 5 vertices beats one community
        best = max(modularity_oracle(w, labels) for labels in all_partitions(5))
        assert modularity(w, p) == pytest.approx(best, abs=1e-12)

    def test_final_q_not_below_singletons(self):
        for seed in range(8):
            rng = np.random.default_rng(seed)
            n = int(rng.integers(5, 14))
            m = (rng.random((n, n)) < 0.4).astype(float)
            w = np.triu(m, 1)
            w = w + w.T
            if w.sum() == 0:
                continue
            p = louvain(w, seed=seed)
            singleton_q = modularity(w, Partition.from_labels(list(range(n))))
            assert modularity(w, p) >= singleton_q - 1e-12

    def test_no_single_vertex_move_improves(self):
        for seed in range(8):
            rng = np.random.default_rng(100 + seed)
            n = int(rng.integers(6, 14))
            m = rng.random((n, n)) * (rng.random((n, n)) < 0.5)
            w = np.triu(m, 1)
            w = w + w.T
            if w.sum() == 0:
                continue
            p = louvain(w, seed=seed)
            q0 = modularity(w, p)
            labels = list(p.assignment)
            for v in range(n):
                neighbor_comms = {labels[j] for j in np.nonzero(w[v])[0]} - {labels[v]}
                for c in neighbor_comms:
                    moved = labels.copy()
                    moved[v] = c
                    assert modularity_oracle(w, moved) <= q0 + 1e-12

    def test_deterministic_given_order(self):
        w = two_triangles()
        order = [5, 0, 3, 2, 4, 1]
        assert louvain(w, vertex_order=order) == louvain(w, vertex_order=order)

    def test_seed_generates_order(self):
        rng = np.random.default_rng(3)
        m = rng.random((10, 10)) * (rng.random((10, 10)) < 0.4)
        w = np.triu(m, 1)
        w = w + w.T
        assert louvain(w, seed=11) == louvain(w, seed=11)

    def test_rejects_bad_order(self):
        with pytest.raises(ValidationError):
            louvain(two_triangles(), vertex_order=[0, 0, 1, 2, 3, 4])


class TestSpectrum:
    def test_eigenvalues_in_0_2(self):
        for seed in range(5):
            sim = random_similarity(12, seed=seed)
            spec = spectrum(sim.s)
            assert spec.values[0] >= -1e-8
            assert spec.values[-1] <= 2 + 1e-8

    def test_zero_multiplicity_equals_components(self):
        for seed in range(6):
            rng = np.random.default_rng(seed)
            n = 12
            w = (rng.random((n, n)) < 0.25).astype(float)
            w = np.triu(w, 1)
            w = w + w.T
            deg = w.sum(axis=1)
            keep = deg > 0
            if keep.sum() < 2:
                continue
            core = w[np.ix_(np.nonzero(keep)[0], np.nonzero(keep)[0])]
            g = nx.from_numpy_array(core)
            n_components = nx.number_connected_components(g)
            spec = spectrum(core)
            zeros = int(np.sum(np.abs(spec.values) < 1e-9))
            assert zeros == n_components

    def test_generalized_residual(self):
        sim = random_similarity(10, seed=9)
        w = sim.s
        spec = spectrum(w)
        d = w.sum(axis=1)
        laplacian = np.diag(d) - w
        for i in range(w.shape[0]):
            v = spec.vectors[:, i]
            residual = laplacian @ v - spec.values[i] * (d * v)
            assert np.linalg.norm(residual) <= 1e-6 * np.linalg.norm(v)

    def test_rejects_isolated_vertices(self):
        w = np.zeros((3, 3))
        w[0, 1] = w[1, 0] = 1.0
        with pytest.raises(ValidationError, match="zero-degree"):
            spectrum(w)


class TestEigengap:
    def test_dominant_gap(self):
        vals = np.array([0.0, 0.0, 0.0, 0.01, 0.9, 1.0])
        spec = EigenSpectrum(vals, np.eye(6))
        assert eigengap_k(spec, k_min=2) == 4

    def test_uniform_spectrum_ties_to_k_min(self):
        vals = np.arange(8) * 0.125  # exactly representable: every gap ties
        spec = EigenSpectrum(vals, np.eye(8))
        assert eigengap_k(spec, k_min=2) == 2
        assert eigengap_k(spec, k_min=4, k_max=6) == 4

    def test_empty_range_rejected(self):
        spec = EigenSpectrum(np.linspace(0, 1, 5), np.eye(5))
        with pytest.raises(ValidationError):
            eigengap_k(spec, k_min=3, k_max=2)
        with pytest.raises(ValidationError):
            eigengap_k(spec, k_min=2, k_max=5)


class TestNsc:
    def test_two_disconnected_cliques(self):
        w = two_triangles()
        p = nsc(w, 2, seed=0)
        truth = Partition.from_labels([0, 0, 0, 1, 1, 1])
        assert ari(p, truth) == 1.0

    def test_planted_three_blocks(self):
        w, labels = planted_blocks(3, 10, p_in=0.9, p_out=0.05, seed=4)
        p = nsc(w, 3, seed=0)
        assert ari(p, Partition.from_labels(labels.tolist())) >= 0.9

    def test_bit_reproducible(self):
        w, _ = planted_blocks(3, 8, p_in=0.8, p_out=0.1, seed=1)
        assert nsc(w, 3, seed=42) == nsc(w, 3, seed=42)

    def test_k_validation(self):
        w = two_triangles()
        with pytest.raises(ValidationError):
            nsc(w, 1)
        with pytest.raises(ValidationError):
            nsc(w, 7)

    def test_isolated_vertices_become_singletons(self):
        w = np.zeros((8, 8))
        for a, b in ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)):
            w[a, b] = w[b, a] = 1.0
        # vertices 6 and 7 isolated
        p = nsc(w, 2, seed=0)
        assert p.k == 4
        assert p.assignment[6] != p.assignment[7]
        assert {p.assignment[6], p.assignment[7]} & {p.assignment[0], p.assignment[3]} == set()

    def test_at_most_k_clusters_on_connected_input(self):
        for seed in range(4):
            sim = random_similarity(15, seed=seed)
            for k in (2, 4, 6):
                assert nsc(sim.s, k, seed=seed).k <= k

    def test_sweep_matches_individual_calls(self):
        w, _ = planted_blocks(3, 8, p_in=0.85, p_out=0.1, seed=2)
        seeds = {k: 1000 + k for k in (2, 3, 4, 5)}
        swept = nsc_sweep(w, [2, 3, 4, 5], lambda k: seeds[k])
        for k in (2, 3, 4, 5):
            assert swept[k] == nsc(w, k, seed=seeds[k])
