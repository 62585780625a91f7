import itertools
import random

import networkx as nx
import numpy as np
import pytest

from corrnet.errors import ValidationError
from corrnet.graph import (
    Clique,
    Network,
    enumerate_m_cliques,
    is_clique,
    is_planar,
    maximal_cliques,
    read_network_csv,
    write_network_csv,
    write_vertex_table,
)
from corrnet.planarity import _lr_fast, _lr_test, is_planar_edges


def net_from_pairs(n, pairs, weight=0.5):
    return Network(tuple(f"S{i}" for i in range(n)), tuple((u, v, weight) for u, v in pairs))


def nx_planar(n, pairs):
    g = nx.Graph()
    g.add_nodes_from(range(n))
    g.add_edges_from(pairs)
    return nx.check_planarity(g, counterexample=False)[0]


K33 = [(i, j + 3) for i in range(3) for j in range(3)]


class TestNetwork:
    def test_canonicalizes_edges(self):
        net = Network(("A", "B", "C"), ((2, 0, 0.5), (1, 2, 0.25)))
        assert net.edges == ((0, 2, 0.5), (1, 2, 0.25))
        assert net.has_edge(0, 2) and net.has_edge(2, 0)
        assert net.degrees() == [1, 1, 2]

    def test_rejects_self_loop_and_duplicates(self):
        with pytest.raises(ValidationError, match="self-loop"):
            Network(("A", "B"), ((0, 0, 0.5),))
        with pytest.raises(ValidationError, match="duplicate"):
            Network(("A", "B"), ((0, 1, 0.5), (1, 0, 0.5)))

    def test_rejects_bad_weight(self):
        with pytest.raises(ValidationError, match="weight"):
            Network(("A", "B"), ((0, 1, 1.5),))

    def test_adjacency_matrix(self):
        net = net_from_pairs(3, [(0, 1)], weight=0.7)
        binary = net.adjacency_matrix()
        weighted = net.adjacency_matrix(weighted=True)
        assert binary[0, 1] == binary[1, 0] == 1.0
        assert weighted[0, 1] == weighted[1, 0] == 0.7

    def test_drop_edges(self):
        net = net_from_pairs(4, [(0, 1), (1, 2), (2, 3)])
        smaller = net.drop_edges([1])
        assert smaller.index_edges() == [(0, 1), (2, 3)]


class TestIsPlanar:
    def test_k4_planar(self):
        assert is_planar(net_from_pairs(4, itertools.combinations(range(4), 2)))

    def test_k5_not_planar(self):
        assert not is_planar(net_from_pairs(5, itertools.combinations(range(5), 2)))

    def test_k33_not_planar_but_minus_any_edge_is(self):
        assert not is_planar(net_from_pairs(6, K33))
        for e in K33:
            rest = [x for x in K33 if x != e]
            assert is_planar(net_from_pairs(6, rest))
            assert nx_planar(6, rest)

    def test_petersen_not_planar(self):
        g = nx.petersen_graph()
        assert not is_planar(net_from_pairs(10, g.edges()))

    def test_euler_quick_reject(self):
        # 3n-6 = 9 at n=5; 10 edges cannot be planar
        assert not is_planar_edges(5, list(itertools.combinations(range(5), 2)))

    def test_small_graph_table(self):
        # every graph on <= 7 vertices, sampled densely, vs the networkx oracle
        rnd = random.Random(71)
        for n in range(1, 8):
            pairs = list(itertools.combinations(range(n), 2))
            for trial in range(200):
                edges = [e for e in pairs if rnd.random() < rnd.choice((0.2, 0.5, 0.8))]
                assert is_planar_edges(n, edges) == nx_planar(n, edges)

    def test_random_graphs_vs_networkx(self):
        rnd = random.Random(1234)
        for trial in range(600):
            n = rnd.randint(5, 16)
            pairs = list(itertools.combinations(range(n), 2))
            edges = [e for e in pairs if rnd.random() < rnd.choice((0.2, 0.35, 0.5, 0.7))]
            assert is_planar_edges(n, edges) == nx_planar(n, edges)

    def test_subdivision_invariance(self):
        rnd = random.Random(77)
        for trial in range(200):
            n = rnd.randint(5, 10)
            pairs = list(itertools.combinations(range(n), 2))
            edges = [e for e in pairs if rnd.random() < 0.5]
            if not edges:
                continue
            verdict = is_planar_edges(n, edges)
            k = rnd.randrange(len(edges))
            u, v = edges[k]
            subdivided = edges[:k] + edges[k + 1:] + [(u, n), (n, v)]
            assert is_planar_edges(n + 1, subdivided) == verdict

    def test_pure_python_path_agrees(self):
        rnd = random.Random(4444)
        for trial in range(300):
            n = rnd.randint(5, 14)
            pairs = list(itertools.combinations(range(n), 2))
            edges = [e for e in pairs if rnd.random() < 0.45]
            if len(edges) < 9 or len(edges) > 3 * n - 6:
                continue
            assert _lr_test(n, edges) == nx_planar(n, edges)

    @pytest.mark.skipif(_lr_fast is None, reason="numba unavailable")
    def test_fast_path_agrees_with_pure(self):
        rnd = random.Random(5555)
        for trial in range(300):
            n = rnd.randint(5, 14)
            pairs = list(itertools.combinations(range(n), 2))
            edges = [e for e in pairs if rnd.random() < 0.45]
            if len(edges) < 9 or len(edges) > 3 * n - 6:
                continue
            arr = np.asarray(edges, dtype=np.int32)
            fast = bool(_lr_fast(n, np.ascontiguousarray(arr[:, 0]),
                                 np.ascontiguousarray(arr[:, 1])))
            assert fast == _lr_test(n, edges)

    def test_disconnected_graphs(self):
        # two K4s plus isolated vertices: planar; K5 plus K4: not
        two_k4 = list(itertools.combinations(range(4), 2)) + [
            (u + 4, v + 4) for u, v in itertools.combinations(range(4), 2)
        ]
        assert is_planar_edges(10, two_k4)
        k5_k4 = list(itertools.combinations(range(5), 2)) + [
            (u + 5, v + 5) for u, v in itertools.combinations(range(4), 2)
        ]
        assert not is_planar_edges(9, k5_k4)


def brute_force_maximal_cliques(n, adj):
    cliques = []
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            if all(b in adj[a] for a, b in itertools.combinations(subset, 2)):
                if not any(all(w in adj[v] or w == v for v in subset) and w not in subset
                           for w in range(n)):
                    # maximal iff no outside vertex adjacent to all members
                    outside = [w for w in range(n) if w not in subset
                               and all(w in adj[v] for v in subset)]
                    if not outside:
                        cliques.append(tuple(subset))
    return sorted(set(cliques))


class TestMaximalCliques:
    def test_triangle(self):
        cliques = maximal_cliques(net_from_pairs(3, [(0, 1), (1, 2), (0, 2)]))
        assert [c.members for c in cliques] == [(0, 1, 2)]
        assert cliques[0].maximal

    def test_path(self):
        cliques = maximal_cliques(net_from_pairs(3, [(0, 1), (1, 2)]))
        assert [c.members for c in cliques] == [(0, 1), (1, 2)]

    def test_min_size_filter_keeps_singletons_by_default(self):
        net = net_from_pairs(4, [(0, 1)])  # vertices 2, 3 isolated
        all_cliques = maximal_cliques(net)
        assert [c.members for c in all_cliques] == [(0, 1), (2,), (3,)]
        assert maximal_cliques(net, min_size=3) == []

    def test_against_exhaustive_enumeration(self):
        rnd = random.Random(10)
        for trial in range(30):
            n = rnd.randint(4, 10)
            pairs = [e for e in itertools.combinations(range(n), 2) if rnd.random() < 0.5]
            net = net_from_pairs(n, pairs)
            adj = [set(net.neighbors(v)) for v in range(n)]
            expected = brute_force_maximal_cliques(n, adj)
            got = [c.members for c in maximal_cliques(net)]
            assert got == expected
            for c in maximal_cliques(net):
                assert is_clique(net, c.members)

    def test_lexicographic_order(self):
        net = net_from_pairs(5, [(0, 1), (0, 2), (1, 2), (3, 4)])
        assert [c.members for c in maximal_cliques(net)] == [(0, 1, 2), (3, 4)]


class TestEnumerateMCliques:
    def test_k4_triangles(self):
        net = net_from_pairs(4, itertools.combinations(range(4), 2))
        tris = enumerate_m_cliques(net, 3)
        assert [c.members for c in tris] == [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)]
        assert not any(c.maximal for c in tris)  # all contained in K4

    def test_k4_four_clique(self):
        net = net_from_pairs(4, itertools.combinations(range(4), 2))
        fours = enumerate_m_cliques(net, 4)
        assert [c.members for c in fours] == [(0, 1, 2, 3)]
        assert fours[0].maximal

    def test_matches_brute_force(self):
        rnd = random.Random(22)
        for trial in range(20):
            n = rnd.randint(4, 9)
            pairs = [e for e in itertools.combinations(range(n), 2) if rnd.random() < 0.6]
            net = net_from_pairs(n, pairs)
            for m in (2, 3, 4):
                expected = sorted(
                    subset
                    for subset in itertools.combinations(range(n), m)
                    if all(net.has_edge(a, b) for a, b in itertools.combinations(subset, 2))
                )
                assert [c.members for c in enumerate_m_cliques(net, m)] == expected

    def test_size_validation(self):
        with pytest.raises(ValidationError):
            enumerate_m_cliques(net_from_pairs(3, [(0, 1)]), 1)


class TestCliqueType:
    def test_members_sorted(self):
        assert Clique((3, 1, 2), False).members == (1, 2, 3)

    def test_rejects_duplicates(self):
        with pytest.raises(ValidationError):
            Clique((1, 1), False)


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        net = Network(("A", "B", "C"), ((0, 1, 0.25), (1, 2, 0.75)), ("X", "Y", "X"))
        write_network_csv(net, tmp_path / "edges.csv")
        write_vertex_table(net, tmp_path / "vertices.csv")
        loaded = read_network_csv(tmp_path / "edges.csv", tmp_path / "vertices.csv")
        assert loaded == net
