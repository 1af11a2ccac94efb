"""End-to-end community detection: partition seed -> walks -> SGNS -> K-means."""
from __future__ import annotations

import logging

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .cluster import kmeans
from .combinatorial import make_partitioner
from .embed import SgnsParams, train
from .graph import GroundTruthCover, Partition, _compact
from .validation import check_cover, check_graph, check_partition
from .walks import WalkParams, generate_corpus

logger = logging.getLogger(__name__)

# method -> (walk mode, uses partition weights)
METHODS = {
    "n2v": ("pq", False),
    "cn2v": ("pq", True),
    "mn2v": ("merw-pq", False),
    "mcn2v": ("merw-pq", True),
}
SOURCES = ("cnm", "louvain", "lpa", "file", "oracle")


def oracle_partition(cover: GroundTruthCover) -> tuple[Partition, int]:
    """Disjoint labels from ground truth plus the ground-truth community count.

    Overlapping nodes keep their smallest community id; uncovered nodes get
    singleton labels so they never count as same-community with anyone.
    """
    labels = np.full(cover.num_nodes, -1, dtype=np.int64)
    for cid in range(cover.num_communities - 1, -1, -1):
        labels[cover.communities[cid]] = cid
    free = np.flatnonzero(labels < 0)
    labels[free] = cover.num_communities + np.arange(len(free))
    return Partition(_compact(labels)), cover.num_communities


class CommunityEmbedding(ClusterMixin, BaseEstimator):
    """Community detection by clustering node2vec-style embeddings.

    Parameters
    ----------
    method : {"n2v", "cn2v", "mn2v", "mcn2v"}
        ``c`` weights skip-gram pairs by a seed partition, ``m`` reweights
        the walk with the maximal-entropy eigenvector.
    partition_source : {"cnm", "louvain", "lpa", "file", "oracle"}
        Where the seed partition comes from. Its community count is the K
        handed to K-means. ``"file"`` reads ``partition``; ``"oracle"`` uses
        the ground truth passed as ``y`` to :meth:`fit`.
    seed : int
        Drives the partitioner, walks, SGD and K-means.

    Attributes
    ----------
    labels_ : ndarray
        Predicted community of every node.
    source_partition_ : Partition
    n_clusters_ : int
    embedding_ : Embedding
    """

    def __init__(self, method="mcn2v", partition_source="lpa", partition=None, p=1.0, q=1.0,
                 walk_len=80, walks_per_node=10, dim=128, window=10, negatives=5, epochs=5,
                 lr=0.025, alpha=0.8, restarts=10, normalize="none", seed=0, workers=1):
        self.method = method
        self.partition_source = partition_source
        self.partition = partition
        self.p = p
        self.q = q
        self.walk_len = walk_len
        self.walks_per_node = walks_per_node
        self.dim = dim
        self.window = window
        self.negatives = negatives
        self.epochs = epochs
        self.lr = lr
        self.alpha = alpha
        self.restarts = restarts
        self.normalize = normalize
        self.seed = seed
        self.workers = workers

    def _source(self, graph, y) -> tuple[Partition, int]:
        src = self.partition_source
        if src == "oracle":
            if y is None:
                raise ValueError("partition_source='oracle' needs the ground truth as y")
            return oracle_partition(check_cover(y, graph.num_nodes))
        if src == "file":
            if self.partition is None:
                raise ValueError("partition_source='file' needs the partition parameter")
            part = check_partition(self.partition, graph.num_nodes)
            return part, part.num_communities
        part = make_partitioner(src, self.seed).fit(graph).partition_
        return part, part.num_communities

    def fit(self, graph, y=None):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {sorted(METHODS)}, got {self.method!r}")
        if self.partition_source not in SOURCES:
            raise ValueError(f"partition_source must be one of {SOURCES}, got {self.partition_source!r}")
        graph = check_graph(graph)
        mode, weighted = METHODS[self.method]
        source, k = self._source(graph, y)
        self.source_partition_ = source
        self.n_clusters_ = k
        walk = WalkParams(p=self.p, q=self.q, walk_len=self.walk_len,
                          walks_per_node=self.walks_per_node, mode=mode, seed=self.seed)
        corpus = generate_corpus(graph, walk, parallel=self.workers > 1)
        sgns = SgnsParams(dim=self.dim, window=self.window, negatives=self.negatives, epochs=self.epochs,
                          lr=self.lr, alpha=self.alpha, seed=self.seed)
        self.embedding_ = train(corpus, sgns, source if weighted else None, graph.num_nodes, self.workers)
        result = kmeans(self.embedding_.in_vectors, k, seed=self.seed, restarts=self.restarts,
                        normalize=self.normalize)
        self.partition_ = Partition.from_labels(result.labels)
        self.labels_ = self.partition_.labels
        logger.debug("%s/%s: K=%d", self.method, self.partition_source, k)
        return self

    def fit_predict(self, graph, y=None):
        return self.fit(graph, y).labels_

    # transductive: both take node indices of the fitted graph, not new samples
    def predict(self, nodes=None):
        check_is_fitted(self, "labels_")
        return self.labels_ if nodes is None else self.labels_[np.asarray(nodes)]

    def transform(self, nodes=None):
        check_is_fitted(self, "embedding_")
        vectors = self.embedding_.in_vectors
        return vectors if nodes is None else vectors[np.asarray(nodes)]
