import numpy as np
import pytest

from commembed.graph import Graph
from commembed.spectral import (ConvergenceError, leading_eigenpair, merw_reweight,
                                merw_reweight_components, merw_transition_matrix)
from commembed.walks import WalkParams, transition_distribution

from conftest import complete_graph, cycle_graph, path_graph, random_graph, star_graph
from oracles import dense_leading_eigenpair

MERW = WalkParams(mode="merw-pq")


def _merw_row(graph, eig, u):
    nbrs, probs = transition_distribution(graph, None, u, MERW, eig)
    return dict(zip(nbrs.tolist(), probs.tolist()))


def test_k4():
    eig = leading_eigenpair(complete_graph(4))
    assert eig.lam == pytest.approx(3.0, abs=1e-9)
    assert np.allclose(eig.psi, 0.5)


def test_path3():
    eig = leading_eigenpair(path_graph(3))
    assert eig.lam == pytest.approx(np.sqrt(2), abs=1e-9)
    assert np.allclose(eig.psi / eig.psi[0], [1, np.sqrt(2), 1])
    assert eig.shifted  # path is bipartite


def test_c6():
    eig = leading_eigenpair(cycle_graph(6))
    assert eig.lam == pytest.approx(2.0, abs=1e-9)
    assert np.allclose(eig.psi, 1 / np.sqrt(6))


def test_residual_and_positivity(karate):
    g, _ = karate
    eig = leading_eigenpair(g)
    adj = g.adjacency().toarray()
    assert np.linalg.norm(adj @ eig.psi - eig.lam * eig.psi) <= 1e-10
    assert np.all(eig.psi > 0)
    lam, psi = dense_leading_eigenpair(adj)
    assert eig.lam == pytest.approx(lam, abs=1e-9)
    assert np.allclose(eig.psi, psi, atol=1e-8)


def test_errors():
    g = Graph.from_edges(4, [(0, 1), (2, 3)])
    with pytest.raises(ValueError, match="disconnected"):
        leading_eigenpair(g)
    with pytest.raises(ConvergenceError) as exc:
        leading_eigenpair(random_graph(np.random.default_rng(1), 30, 0.3), max_iter=2)
    assert exc.value.residual > 0
    eig = leading_eigenpair(path_graph(3))
    with pytest.raises(ValueError, match="entries"):
        merw_reweight(path_graph(4), eig)


def test_merw_c4_is_urw():
    g = cycle_graph(4)
    eig = leading_eigenpair(g)
    for u in range(4):
        assert all(p == pytest.approx(0.5, abs=1e-12) for p in _merw_row(g, eig, u).values())


def test_merw_path3():
    g = path_graph(3)
    eig = leading_eigenpair(g)
    assert _merw_row(g, eig, 0)[1] == pytest.approx(1.0, abs=1e-12)
    row = _merw_row(g, eig, 1)
    assert row[0] == pytest.approx(0.5, abs=1e-12) and row[2] == pytest.approx(0.5, abs=1e-12)


def test_merw_star():
    g = star_graph(3)
    eig = leading_eigenpair(g)
    assert eig.lam == pytest.approx(np.sqrt(3), abs=1e-9)
    assert eig.psi[0] / eig.psi[1] == pytest.approx(np.sqrt(3), abs=1e-9)
    assert all(p == pytest.approx(1 / 3, abs=1e-12) for p in _merw_row(g, eig, 0).values())
    assert _merw_row(g, eig, 2)[0] == pytest.approx(1.0, abs=1e-12)


def test_reweighted_graph_matches_transition_matrix(karate):
    g, _ = karate
    eig = leading_eigenpair(g)
    w = merw_reweight(g, eig).adjacency().toarray()
    p_weights = w / w.sum(axis=1, keepdims=True)
    assert np.allclose(p_weights, merw_transition_matrix(g, eig).toarray(), atol=1e-12)


def test_components():
    g = Graph.from_edges(7, [(0, 1), (1, 2), (3, 4), (4, 5), (5, 3)])
    rw = merw_reweight_components(g)
    assert rw.edge_weight(0, 1) > 0 and rw.edge_weight(3, 4) > 0
    # triangle is regular: all its weights equal 1/3
    assert rw.edge_weight(3, 4) == pytest.approx(1 / 3)
