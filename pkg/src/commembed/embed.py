"""Skip-gram with negative sampling over walk corpora.

With a partition, positive (center, context) pairs are weighted by ``alpha``
when both nodes share a community and ``1 - alpha`` otherwise; negative
samples always carry weight 1. Without a partition every positive pair has
weight 1, which is the plain node2vec objective.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np
from numba import njit, prange
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._rng import seed_to_u64, stream_state, uniform
from .graph import Graph, Partition
from .validation import check_partition
from .walks import WalkCorpus


@dataclass(frozen=True)
class TrainingPair:
    center: int
    context: int
    weight: float


@dataclass(frozen=True)
class SgnsParams:
    dim: int = 128
    window: int = 10
    negatives: int = 5
    epochs: int = 5
    lr: float = 0.025
    alpha: float = 0.8
    seed: int = 0
    min_lr_ratio: float = 1e-4
    chunk_walks: int = 512

    def __post_init__(self):
        if self.dim < 1 or self.window < 1 or self.negatives < 1 or self.epochs < 1:
            raise ValueError("dim, window, negatives and epochs must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if not self.lr > 0:
            raise ValueError("lr must be positive")


@dataclass(frozen=True, eq=False)
class Embedding:
    in_vectors: np.ndarray
    out_vectors: np.ndarray
    epoch_losses: tuple[float, ...] = ()

    @property
    def num_nodes(self) -> int:
        return self.in_vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.in_vectors.shape[1]

    def dumps(self, graph: Graph | None = None) -> str:
        """word2vec text format: ``"n d"`` header, then ``id v1 ... vd`` per node."""
        ids = graph.node_ids if graph is not None else np.arange(self.num_nodes)
        lines = [f"{self.num_nodes} {self.dim}"]
        for i, row in zip(ids.tolist(), self.in_vectors):
            lines.append(f"{i} " + " ".join(f"{x:.6f}" for x in row))
        return "\n".join(lines) + "\n"


def pair_weight(label_u: int, label_v: int, alpha: float) -> float:
    return alpha if label_u == label_v else 1.0 - alpha


def build_pairs(corpus: WalkCorpus | np.ndarray, ws: int, partition: Partition | None = None,
                alpha: float = 0.8) -> Iterator[TrainingPair]:
    """Yield every windowed (center, context) pair of the corpus with its weight.

    Pairs of identical nodes are skipped, as are pairs whose weight is 0
    (cross-community pairs when ``alpha == 1``).
    """
    walks = corpus.walks if isinstance(corpus, WalkCorpus) else np.asarray(corpus)
    labels = None
    if partition is not None:
        labels = check_partition(partition).labels
        if walks.size and walks.max() >= len(labels):
            raise ValueError("corpus contains nodes outside the partition")
    for walk in walks.tolist():
        n = len(walk)
        for i, u in enumerate(walk):
            for j in range(max(0, i - ws), min(n, i + ws + 1)):
                v = walk[j]
                if j == i or v == u:
                    continue
                w = 1.0 if labels is None else pair_weight(labels[u], labels[v], alpha)
                if w > 0:
                    yield TrainingPair(u, v, w)


def _log_sigmoid(x: float) -> float:
    return -math.log1p(math.exp(-x)) if x >= 0 else x - math.log1p(math.exp(x))


def sgns_loss_grad(center: np.ndarray, context: np.ndarray, label: int, weight: float = 1.0):
    """Weighted logistic loss of one (center, context) example and its gradients.

    ``loss = -weight * [label * log s(u.v) + (1 - label) * log s(-u.v)]``.
    Returns ``(loss, d loss / d center, d loss / d context)``.
    """
    u = np.asarray(center, dtype=np.float64)
    v = np.asarray(context, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError("vectors must have equal length")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v)) and math.isfinite(weight)):
        raise ValueError("non-finite input")
    if label not in (0, 1):
        raise ValueError("label must be 0 or 1")
    s = float(u @ v)
    loss = -weight * (_log_sigmoid(s) if label == 1 else _log_sigmoid(-s))
    g = weight * (1.0 / (1.0 + math.exp(-s)) - label)
    return loss, g * v, g * u


@njit(cache=True)
def _nb_log_sigmoid(x):
    if x >= 0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


@njit(cache=True)
def _count_pairs(walks, order, ws, labels, use_labels, alpha):
    total = 0
    L = walks.shape[1]
    for t in range(order.shape[0]):
        walk = walks[order[t]]
        for i in range(L):
            u = walk[i]
            for j in range(max(0, i - ws), min(L, i + ws + 1)):
                v = walk[j]
                if j == i or v == u:
                    continue
                if use_labels and labels[u] != labels[v] and alpha >= 1.0:
                    continue
                total += 1
    return total


@njit(cache=True)
def _fill_pairs(walks, order, ws, labels, use_labels, alpha, centers, contexts, weights):
    k = 0
    L = walks.shape[1]
    for t in range(order.shape[0]):
        walk = walks[order[t]]
        for i in range(L):
            u = walk[i]
            for j in range(max(0, i - ws), min(L, i + ws + 1)):
                v = walk[j]
                if j == i or v == u:
                    continue
                w = 1.0
                if use_labels:
                    if labels[u] == labels[v]:
                        w = alpha
                    else:
                        w = 1.0 - alpha
                        if w <= 0.0:
                            continue
                centers[k] = u
                contexts[k] = v
                weights[k] = w
                k += 1


@njit(cache=True)
def _sgd_block(in_v, out_v, centers, contexts, weights, lo, hi, neg_cdf, n_neg,
               lr0, lr_min, done, total, state):
    d = in_v.shape[1]
    grad = np.empty(d)
    loss = 0.0
    for t in range(lo, hi):
        lr = lr0 - (lr0 - lr_min) * (done + t - lo) / total
        if lr < lr_min:
            lr = lr_min
        c = centers[t]
        o = contexts[t]
        w = weights[t]
        for a in range(d):
            grad[a] = 0.0
        s = 0.0
        for a in range(d):
            s += in_v[c, a] * out_v[o, a]
        loss -= w * _nb_log_sigmoid(s)
        g = w * (1.0 / (1.0 + math.exp(-s)) - 1.0)
        for a in range(d):
            grad[a] += g * out_v[o, a]
            out_v[o, a] -= lr * g * in_v[c, a]
        for _ in range(n_neg):
            r = uniform(state)
            nn = np.searchsorted(neg_cdf, r, side="right")
            if nn >= neg_cdf.shape[0]:
                nn = neg_cdf.shape[0] - 1
            if nn == o:
                continue
            s = 0.0
            for a in range(d):
                s += in_v[c, a] * out_v[nn, a]
            loss -= _nb_log_sigmoid(-s)
            g = 1.0 / (1.0 + math.exp(-s))
            for a in range(d):
                grad[a] += g * out_v[nn, a]
                out_v[nn, a] -= lr * g * in_v[c, a]
        for a in range(d):
            in_v[c, a] -= lr * grad[a]
    return loss


@njit(cache=True)
def _sgd_serial(in_v, out_v, centers, contexts, weights, neg_cdf, n_neg, lr0, lr_min, done, total,
                seed, epoch, chunk):
    state = stream_state(seed, epoch, chunk)
    return _sgd_block(in_v, out_v, centers, contexts, weights, 0, centers.shape[0], neg_cdf, n_neg,
                      lr0, lr_min, done, total, state)


@njit(cache=True, parallel=True)
def _sgd_parallel(in_v, out_v, centers, contexts, weights, neg_cdf, n_neg, lr0, lr_min, done, total,
                  seed, epoch, chunk, n_blocks):
    # lock-free: blocks race on shared rows, lost updates are tolerated
    m = centers.shape[0]
    losses = np.zeros(n_blocks)
    for b in prange(n_blocks):
        lo = b * m // n_blocks
        hi = (b + 1) * m // n_blocks
        state = stream_state(seed, epoch * 1000003 + chunk, b + 1)
        losses[b] = _sgd_block(in_v, out_v, centers, contexts, weights, lo, hi, neg_cdf, n_neg,
                               lr0, lr_min, done + lo, total, state)
    return losses.sum()


def negative_cdf(counts: np.ndarray, power: float = 0.75) -> np.ndarray:
    weights = counts.astype(np.float64) ** power
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def train(corpus: WalkCorpus, params: SgnsParams = SgnsParams(), partition: Partition | None = None,
          num_nodes: int | None = None, workers: int = 1) -> Embedding:
    """Fit node vectors by SGD over shuffled training pairs.

    Each epoch visits the walks in a fresh random order, ``chunk_walks`` at a
    time; the pairs of a chunk are shuffled before their updates. The step
    size decays linearly from ``lr`` to ``lr * min_lr_ratio`` across all
    epochs. ``workers > 1`` runs lock-free parallel updates, which are only
    statistically reproducible.

    Raises
    ------
    FloatingPointError
        When parameters become non-finite; the message names the epoch.
    """
    walks = np.ascontiguousarray(corpus.walks)
    if walks.size == 0:
        raise ValueError("empty corpus")
    n = num_nodes if num_nodes is not None else corpus.num_nodes
    if walks.min() < 0 or walks.max() >= n:
        raise ValueError("corpus node id out of range")
    use_labels = partition is not None
    if use_labels:
        labels = check_partition(partition, n).labels
    else:
        labels = np.zeros(n, dtype=np.int64)

    rng = np.random.default_rng(params.seed)
    d = params.dim
    in_v = (rng.random((n, d)) - 0.5) / d
    out_v = np.zeros((n, d))
    neg_cdf = negative_cdf(np.bincount(walks.ravel(), minlength=n))

    all_walks = np.arange(len(walks))
    per_epoch = _count_pairs(walks, all_walks, params.window, labels, use_labels, params.alpha)
    total = max(per_epoch * params.epochs, 1)
    lr_min = params.lr * params.min_lr_ratio
    seed = seed_to_u64(params.seed)
    done = 0
    losses = []
    for epoch in range(params.epochs):
        order = rng.permutation(len(walks))
        epoch_loss = 0.0
        for chunk, start in enumerate(range(0, len(walks), params.chunk_walks)):
            sel = order[start:start + params.chunk_walks]
            m = _count_pairs(walks, sel, params.window, labels, use_labels, params.alpha)
            if m == 0:
                continue
            centers = np.empty(m, dtype=np.int64)
            contexts = np.empty(m, dtype=np.int64)
            weights = np.empty(m)
            _fill_pairs(walks, sel, params.window, labels, use_labels, params.alpha, centers, contexts, weights)
            perm = rng.permutation(m)
            centers, contexts, weights = centers[perm], contexts[perm], weights[perm]
            if workers > 1:
                epoch_loss += _sgd_parallel(in_v, out_v, centers, contexts, weights, neg_cdf, params.negatives,
                                            params.lr, lr_min, done, total, seed, epoch, chunk, workers)
            else:
                epoch_loss += _sgd_serial(in_v, out_v, centers, contexts, weights, neg_cdf, params.negatives,
                                          params.lr, lr_min, done, total, seed, epoch, chunk)
            done += m
        if not (np.all(np.isfinite(in_v)) and np.all(np.isfinite(out_v)) and math.isfinite(epoch_loss)):
            raise FloatingPointError(f"training diverged in epoch {epoch}")
        losses.append(epoch_loss)
    return Embedding(in_v, out_v, tuple(losses))


class SkipGram(TransformerMixin, BaseEstimator, auto_wrap_output_keys=None):
    """Estimator wrapper around :func:`train`.

    ``fit(corpus, partition=None)`` learns ``embedding_``; ``transform``
    returns the node vectors (optionally a subset of rows).
    """

    def __init__(self, dim=128, window=10, negatives=5, epochs=5, lr=0.025, alpha=0.8,
                 seed=0, workers=1):
        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.epochs = epochs
        self.lr = lr
        self.alpha = alpha
        self.seed = seed
        self.workers = workers

    def sgns_params(self) -> SgnsParams:
        return SgnsParams(dim=self.dim, window=self.window, negatives=self.negatives, epochs=self.epochs,
                          lr=self.lr, alpha=self.alpha, seed=self.seed)

    def fit(self, corpus, partition=None, num_nodes=None):
        if not isinstance(corpus, WalkCorpus):
            walks = np.asarray(corpus)
            corpus = WalkCorpus(walks, int(walks.max()) + 1 if num_nodes is None else num_nodes)
        self.embedding_ = train(corpus, self.sgns_params(), partition, num_nodes, self.workers)
        return self

    def transform(self, nodes=None):
        check_is_fitted(self, "embedding_")
        vectors = self.embedding_.in_vectors
        return vectors if nodes is None else vectors[np.asarray(nodes)]

    def fit_transform(self, corpus, partition=None, num_nodes=None):
        return self.fit(corpus, partition, num_nodes).transform()
