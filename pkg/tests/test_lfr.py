import numpy as np
import pytest

from commembed.graph import graph_stats
from commembed.lfr import LfrError, LfrParams, _match, degree_sequence, generate_lfr, mixing, size_sequence


def _check(graph, cover, n):
    assert graph.num_nodes == n
    assert cover.is_disjoint
    assert cover.sizes.sum() == n
    assert np.all(graph.degrees > 0)
    for u in range(n):
        nb = graph.neighbors(u)
        assert u not in nb and len(set(nb.tolist())) == len(nb)


@pytest.fixture(scope="module")
def lfr03():
    return generate_lfr(LfrParams(n=1000, mu=0.3, seed=0))


def test_lfr1000_statistics(lfr03):
    g, cover = lfr03
    _check(g, cover, 1000)
    s = graph_stats(g, cover)
    assert 6.5 <= s.k_avg <= 9.5
    assert 30 <= s.c_num <= 55
    assert 5 <= s.c_min <= s.c_avg <= s.c_max <= 100
    assert s.k_max <= 51


def test_mu_zero_has_no_inter_edges():
    g, cover = generate_lfr(LfrParams(n=500, mu=0.0, seed=1))
    _check(g, cover, 500)
    assert mixing(g, cover.to_partition().labels) == 0.0


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_mu_04_mixing(seed):
    g, cover = generate_lfr(LfrParams(n=1000, mu=0.4, seed=seed))
    assert abs(mixing(g, cover.to_partition().labels) - 0.4) <= 0.05


def test_deterministic(lfr03):
    g, cover = generate_lfr(LfrParams(n=1000, mu=0.3, seed=0))
    assert g == lfr03[0]
    assert [c.tolist() for c in cover.communities] == [c.tolist() for c in lfr03[1].communities]


def test_infeasible_parameters():
    with pytest.raises(LfrError, match="c_max"):
        LfrParams(n=100, mu=0.1, k_max=40, c_max=20)
    with pytest.raises(LfrError, match="mu"):
        LfrParams(mu=1.5)
    with pytest.raises(LfrError, match="k_max"):
        LfrParams(n=40, k_max=50)
    with pytest.raises(LfrError, match="c_min"):
        LfrParams(c_min=50, c_max=10)


def test_sequences():
    rng = np.random.default_rng(0)
    k = degree_sequence(rng, 20000, 2.0, 8.0, 50)
    assert k.min() >= 1 and k.max() <= 50
    assert abs(k.mean() - 8.0) < 0.3
    sizes = size_sequence(rng, 1000, 1.0, 5, 100, 36)
    assert sizes.sum() == 1000 and sizes.min() >= 5 and sizes.max() >= 36


def test_rewiring_cap_error():
    # node 0 wants four distinct partners but only two other nodes exist
    with pytest.raises(LfrError, match="rewiring failed"):
        _match(np.random.default_rng(0), np.array([0, 0, 0, 0, 1, 2]), lambda u, v: True, set(), 50)
