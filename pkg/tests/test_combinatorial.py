from collections import Counter

import numpy as np
import pytest

from commembed.combinatorial import CNM, LabelPropagation, Louvain, cnm, lpa, louvain, make_partitioner, modularity
from commembed.graph import Graph, Partition

from conftest import complete_graph, random_graph, two_cliques, two_triangles
from oracles import modularity_double_sum

# frozen from oracles.modularity_double_sum on the triangle with {0,1}|{2}
TRIANGLE_AB_C = -0.2222222222222222


def _valid(part: Partition, n: int):
    assert part.num_nodes == n
    assert sorted(set(part.labels.tolist())) == list(range(part.num_communities))


def test_single_community_zero(karate):
    g, _ = karate
    assert modularity(g, np.zeros(g.num_nodes, dtype=int)) == 0.0


def test_triangle():
    g = complete_graph(3)
    assert modularity_double_sum(g.adjacency().toarray(), [0, 0, 1]) == pytest.approx(TRIANGLE_AB_C, abs=1e-15)
    assert modularity(g, [0, 0, 1]) == pytest.approx(-2 / 9, abs=1e-12)


def test_karate_truth_vs_oracle(karate):
    g, cover = karate
    labels = cover.to_partition().labels
    assert modularity(g, labels) == pytest.approx(modularity_double_sum(g.adjacency().toarray(), labels), abs=1e-12)


def test_singleton_closed_form(karate):
    g, _ = karate
    k = g.degrees.astype(float)
    expected = -np.sum(k ** 2) / (2 * g.num_edges) ** 2
    assert modularity(g, np.arange(g.num_nodes)) == pytest.approx(expected, abs=1e-15)


def test_random_oracle_equivalence():
    rng = np.random.default_rng(0)
    checked = 0
    for _ in range(50):
        g = random_graph(rng, 20, 0.25)
        if g.num_edges == 0:
            continue
        adj = g.adjacency().toarray()
        for _ in range(50):
            labels = rng.integers(0, rng.integers(1, 6), size=20)
            assert abs(modularity(g, labels) - modularity_double_sum(adj, labels)) <= 1e-12
            checked += 1
    assert checked >= 2000


def test_weighted_modularity():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)], weights=[2.0, 0.5, 3.0])
    labels = [0, 0, 1, 1]
    assert modularity(g, labels) == pytest.approx(modularity_double_sum(g.adjacency().toarray(), labels), abs=1e-12)


def test_partial_partition_rejected():
    with pytest.raises(ValueError):
        modularity(complete_graph(4), [0, 0, 1])


def test_cnm_small_cases():
    assert cnm(two_triangles()).num_communities == 2
    assert cnm(Graph.from_edges(2, [(0, 1)])).num_communities == 1


def test_cnm_monotone_and_valid(karate):
    g, _ = karate
    part = cnm(g)
    _valid(part, 34)
    assert modularity(g, part) > modularity(g, np.arange(34))
    assert part.num_communities in (3, 4, 5)
    assert cnm(g) == part  # deterministic


def test_louvain_cases():
    for seed in range(10):
        assert louvain(two_cliques(5), seed=seed).num_communities == 2
        assert louvain(complete_graph(8), seed=seed).num_communities == 1


def test_louvain_quality(karate):
    g, _ = karate
    q0 = modularity(g, np.arange(34))
    for seed in range(5):
        part = louvain(g, seed=seed)
        _valid(part, 34)
        assert modularity(g, part) >= q0
        assert modularity(g, part) > 0.38


def test_lpa_cases():
    for seed in range(5):
        part, converged = lpa(complete_graph(7), seed=seed)
        assert converged and part.num_communities == 1
    ks = [lpa(two_triangles(), seed=s)[0].num_communities for s in range(100)]
    assert sum(k == 2 for k in ks) >= 90


def test_lpa_cap_flag():
    part, converged = lpa(two_cliques(6), seed=0, max_sweeps=1)
    _valid(part, 12)
    assert converged in (True, False)


def test_disconnected_inputs():
    g = Graph.from_edges(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    for part in (cnm(g), louvain(g, seed=1), lpa(g, seed=1)[0]):
        _valid(part, 7)
        assert part.labels[6] not in part.labels[:6]


def test_estimators(karate):
    g, _ = karate
    est = CNM().fit(g)
    assert est.n_communities_ == est.partition_.num_communities
    assert est.modularity_ == pytest.approx(modularity(g, est.labels_))
    assert Louvain(seed=3).get_params() == {"seed": 3, "tol": 1e-9}
    lp = LabelPropagation(seed=1).fit(g)
    assert hasattr(lp, "converged_")
    assert np.array_equal(make_partitioner("lpa", 1).fit(g).labels_, lp.labels_)
    with pytest.raises(ValueError):
        make_partitioner("infomap")


def test_modal_counts_reported(karate):
    g, _ = karate
    lv = Counter(louvain(g, seed=s).num_communities for s in range(20))
    assert lv.most_common(1)[0][0] == 4
