import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commembed.embed import SgnsParams, SkipGram, build_pairs, sgns_loss_grad, train
from commembed.graph import Partition
from commembed.walks import WalkCorpus, WalkParams, generate_corpus

from conftest import two_cliques
from oracles import sgns_loss


def _pairs(walks, ws, partition=None, alpha=0.8):
    return [(p.center, p.context, p.weight) for p in build_pairs(np.array(walks), ws, partition, alpha)]


def test_window_mechanics():
    assert _pairs([[0, 1, 2]], 1) == [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 1.0), (2, 1, 1.0)]


def test_alpha_weights():
    part = Partition.from_labels([0, 0, 1])
    got = _pairs([[0, 1, 2]], 1, part, 0.8)
    assert [(u, v) for u, v, _ in got] == [(0, 1), (1, 0), (1, 2), (2, 1)]
    assert [w for *_, w in got] == pytest.approx([0.8, 0.8, 0.2, 0.2])


def test_alpha_one_drops_cross_pairs():
    part = Partition.from_labels([0, 0, 1])
    assert _pairs([[0, 1, 2]], 1, part, 1.0) == [(0, 1, 1.0), (1, 0, 1.0)]


def test_partition_must_cover_corpus():
    with pytest.raises(ValueError):
        _pairs([[0, 1, 5]], 1, Partition.from_labels([0, 0, 1]))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(0.0, 1.0), st.integers(1, 4))
def test_weight_function_property(seed, alpha, ws):
    rng = np.random.default_rng(seed)
    walks = rng.integers(0, 8, size=(3, 6))
    labels = rng.integers(0, 3, size=8)
    part = Partition.from_labels(labels)
    lab = part.labels
    expected = []
    for walk in walks.tolist():
        for i, u in enumerate(walk):
            for j in range(max(0, i - ws), min(len(walk), i + ws + 1)):
                v = walk[j]
                if i != j and u != v:
                    w = alpha if lab[u] == lab[v] else 1 - alpha
                    if w > 0:
                        expected.append((u, v, w))
    assert _pairs(walks, ws, part, alpha) == expected
    assert all(w == 1.0 for *_, w in _pairs(walks, ws))


def test_loss_at_zero():
    u = np.zeros(4)
    assert sgns_loss_grad(u, u, 1, 1.0)[0] == pytest.approx(math.log(2))
    assert sgns_loss_grad(u, u, 0, 1.0)[0] == pytest.approx(math.log(2))


def test_loss_matches_oracle_and_rejects_nan():
    rng = np.random.default_rng(2)
    for _ in range(50):
        u, v = rng.normal(size=8), rng.normal(size=8)
        label, w = int(rng.integers(2)), float(rng.random())
        assert sgns_loss_grad(u, v, label, w)[0] == pytest.approx(sgns_loss(u, v, label, w), rel=1e-12)
    with pytest.raises(ValueError):
        sgns_loss_grad(np.array([np.nan, 0.0]), np.zeros(2), 1)
    with pytest.raises(ValueError):
        sgns_loss_grad(np.zeros(2), np.zeros(3), 1)


def _rel_err(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-12)


def finite_difference_check(rng, h=1e-5):
    u, v = rng.normal(size=8), rng.normal(size=8)
    label, w = int(rng.integers(2)), float(rng.uniform(0.05, 1.0))
    _, gu, gv = sgns_loss_grad(u, v, label, w)
    num_u, num_v = np.empty(8), np.empty(8)
    for i in range(8):
        e = np.zeros(8)
        e[i] = h
        num_u[i] = (sgns_loss(u + e, v, label, w) - sgns_loss(u - e, v, label, w)) / (2 * h)
        num_v[i] = (sgns_loss(u, v + e, label, w) - sgns_loss(u, v - e, label, w)) / (2 * h)
    return max(_rel_err(gu, num_u), _rel_err(gv, num_v))


def test_gradient_finite_differences():
    rng = np.random.default_rng(11)
    assert max(finite_difference_check(rng) for _ in range(100)) < 1e-4


@pytest.fixture(scope="module")
def clique_corpus():
    g = two_cliques(6, bridge=False)
    return g, generate_corpus(g, WalkParams(walk_len=20, walks_per_node=20, seed=1))


def _separation(vectors):
    x = vectors / np.linalg.norm(vectors, axis=1, keepdims=True)
    sim = x @ x.T
    same = np.equal.outer(np.arange(12) < 6, np.arange(12) < 6)
    off = ~np.eye(12, dtype=bool)
    return sim[same & off].mean() - sim[~same].mean()


SMALL = SgnsParams(dim=16, window=3, epochs=5, seed=0)


def test_train_shape_and_determinism(clique_corpus):
    _, corpus = clique_corpus
    a = train(corpus, SMALL)
    b = train(corpus, SMALL)
    assert a.in_vectors.shape == (12, 16)
    assert np.all(np.isfinite(a.in_vectors)) and np.all(np.isfinite(a.out_vectors))
    assert a.in_vectors.tobytes() == b.in_vectors.tobytes()


def test_two_cliques_separate(clique_corpus):
    _, corpus = clique_corpus
    assert _separation(train(corpus, SMALL).in_vectors) > 0


def test_loss_mostly_decreasing(clique_corpus):
    _, corpus = clique_corpus
    losses = train(corpus, SgnsParams(dim=16, window=3, epochs=11, seed=4)).epoch_losses
    drops = sum(b <= a for a, b in zip(losses, losses[1:]))
    assert drops >= 0.8 * (len(losses) - 1)


def test_oracle_partition_separates_at_least_as_well(clique_corpus):
    _, corpus = clique_corpus
    truth = Partition.from_labels([0] * 6 + [1] * 6)
    plain, oracle = [], []
    for seed in range(10):
        params = SgnsParams(dim=16, window=3, epochs=5, seed=seed)
        plain.append(_separation(train(corpus, params).in_vectors))
        oracle.append(_separation(train(corpus, params, partition=truth).in_vectors))
    assert np.median(oracle) >= np.median(plain)


def test_divergence_names_epoch(clique_corpus):
    _, corpus = clique_corpus
    with pytest.raises(FloatingPointError, match="epoch 0"):
        train(corpus, SgnsParams(dim=4, window=2, epochs=2, lr=1e200))


def test_train_errors():
    with pytest.raises(ValueError):
        train(WalkCorpus(np.zeros((0, 3), dtype=np.int64), 3))
    with pytest.raises(ValueError):
        train(WalkCorpus(np.array([[0, 5]]), 3))
    with pytest.raises(ValueError):
        SgnsParams(alpha=1.5)


def test_parallel_mode_runs(clique_corpus):
    _, corpus = clique_corpus
    emb = train(corpus, SMALL, workers=2)
    assert np.all(np.isfinite(emb.in_vectors))


def test_skipgram_estimator(clique_corpus):
    g, corpus = clique_corpus
    sg = SkipGram(dim=8, window=2, epochs=1, seed=3)
    x = sg.fit_transform(corpus)
    assert x.shape == (12, 8)
    assert np.array_equal(sg.transform([0, 1]), x[:2])
    text = sg.embedding_.dumps(g)
    assert text.splitlines()[0] == "12 8"
    assert len(text.splitlines()[1].split()) == 9
