"""Random-walk corpora: uniform, node2vec p-q biased, and MERW-reweighted p-q walks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, prange
from sklearn.base import BaseEstimator

from ._rng import seed_to_u64, stream_state, uniform
from .graph import Graph
from .spectral import EigenPair, leading_eigenpair, merw_reweight, merw_reweight_components

MODES = ("uniform", "pq", "merw-pq")


@dataclass(frozen=True)
class WalkParams:
    p: float = 1.0
    q: float = 1.0
    walk_len: int = 80
    walks_per_node: int = 10
    mode: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (self.p > 0 and self.q > 0):
            raise ValueError("p and q must be positive")
        if self.walk_len < 2:
            raise ValueError("walk_len must be at least 2")
        if self.walks_per_node < 1:
            raise ValueError("walks_per_node must be at least 1")


@dataclass(frozen=True, eq=False)
class WalkCorpus:
    """Walks as a ``(num_walks, walk_len)`` integer array of internal node ids."""

    walks: np.ndarray
    num_nodes: int

    def __len__(self) -> int:
        return len(self.walks)

    def __iter__(self):
        return iter(self.walks)

    @property
    def walk_len(self) -> int:
        return self.walks.shape[1]

    def counts(self) -> np.ndarray:
        return np.bincount(self.walks.ravel(), minlength=self.num_nodes)

    def dumps(self, graph: Graph | None = None) -> str:
        """One walk per line, space separated original ids."""
        ids = graph.node_ids if graph is not None else np.arange(self.num_nodes)
        return "".join(" ".join(map(str, ids[w].tolist())) + "\n" for w in self.walks)


def _bias(graph: Graph, prev: int, x: int, p: float, q: float) -> float:
    if x == prev:
        return 1.0 / p
    if graph.has_edge(prev, x):
        return 1.0
    return 1.0 / q


def transition_distribution(graph: Graph, prev: int | None, curr: int, params: WalkParams,
                            eig: EigenPair | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Neighbors of ``curr`` and the exact probability of stepping to each."""
    nbrs = graph.neighbors(curr)
    if len(nbrs) == 0:
        raise ValueError(f"node {curr} has no neighbors")
    if params.mode == "uniform":
        return nbrs, np.full(len(nbrs), 1.0 / len(nbrs))
    if params.mode == "merw-pq":
        if eig is None:
            raise ValueError("merw-pq mode needs an eigenpair")
        w = eig.psi[curr] * eig.psi[nbrs]
    else:
        w = graph.neighbor_weights(curr).astype(np.float64)
    if prev is not None:
        if not graph.has_edge(prev, curr):
            raise ValueError(f"previous node {prev} is not adjacent to {curr}")
        w = w * np.array([_bias(graph, prev, int(x), params.p, params.q) for x in nbrs])
    return nbrs, w / w.sum()


def transition_prob(graph: Graph, prev: int | None, curr: int, nxt: int, params: WalkParams,
                    eig: EigenPair | None = None) -> float:
    """Probability that the walker at ``curr`` (arriving from ``prev``) moves to ``nxt``.

    ``uniform`` ignores ``prev`` and weights. ``pq`` multiplies the edge weight
    by 1/p (return to ``prev``), 1 (``nxt`` adjacent to ``prev``) or 1/q
    (moving away). ``merw-pq`` applies the same bias to the weights
    ``psi(curr) * psi(nxt)``. ``prev=None`` means the first step, where no bias
    applies.
    """
    nbrs, probs = transition_distribution(graph, prev, curr, params, eig)
    i = int(np.searchsorted(nbrs, nxt))
    if i >= len(nbrs) or nbrs[i] != nxt:
        raise ValueError(f"node {nxt} is not adjacent to {curr}")
    return float(probs[i])


@njit(cache=True, inline="always")
def _is_neighbor(indptr, indices, u, x):
    lo = indptr[u]
    hi = indptr[u + 1]
    while lo < hi:
        mid = (lo + hi) >> 1
        if indices[mid] < x:
            lo = mid + 1
        else:
            hi = mid
    return lo < indptr[u + 1] and indices[lo] == x


@njit(cache=True)
def _one_walk(indptr, indices, weights, biased, inv_p, inv_q, start, out, state, scratch):
    out[0] = start
    prev = -1
    cur = start
    for step in range(1, out.shape[0]):
        lo = indptr[cur]
        deg = indptr[cur + 1] - lo
        if not biased:
            nxt = indices[lo + int(uniform(state) * deg)]
        else:
            total = 0.0
            for k in range(deg):
                x = indices[lo + k]
                w = weights[lo + k]
                if prev >= 0:
                    if x == prev:
                        w *= inv_p
                    elif not _is_neighbor(indptr, indices, prev, x):
                        w *= inv_q
                total += w
                scratch[k] = total
            r = uniform(state) * total
            k = 0
            while k < deg - 1 and scratch[k] <= r:
                k += 1
            nxt = indices[lo + k]
        out[step] = nxt
        prev = cur
        cur = nxt


@njit(cache=True)
def _walks_serial(indptr, indices, weights, biased, inv_p, inv_q, walk_len, walks_per_node, seed, max_deg):
    n = indptr.shape[0] - 1
    out = np.empty((n * walks_per_node, walk_len), dtype=np.int32)
    scratch = np.empty(max(max_deg, 1))
    for r in range(walks_per_node):
        for v in range(n):
            state = stream_state(seed, v, r)
            _one_walk(indptr, indices, weights, biased, inv_p, inv_q, v, out[r * n + v], state, scratch)
    return out


@njit(cache=True, parallel=True)
def _walks_parallel(indptr, indices, weights, biased, inv_p, inv_q, walk_len, walks_per_node, seed, max_deg):
    n = indptr.shape[0] - 1
    out = np.empty((n * walks_per_node, walk_len), dtype=np.int32)
    for i in prange(n * walks_per_node):
        r = i // n
        v = i - r * n
        scratch = np.empty(max(max_deg, 1))
        state = stream_state(seed, v, r)
        _one_walk(indptr, indices, weights, biased, inv_p, inv_q, v, out[i], state, scratch)
    return out


def generate_corpus(graph: Graph, params: WalkParams, eig: EigenPair | None = None,
                    parallel: bool = False) -> WalkCorpus:
    """Start ``walks_per_node`` walks from every node.

    Each walk has its own random stream keyed by ``(seed, start, index)``, so
    the corpus is the same with or without ``parallel``.

    ``merw-pq`` reweights edges with the dominant eigenvector (computed here
    when ``eig`` is not supplied; per connected component if the graph is
    disconnected) and then runs the p-q walker on the new weights.
    """
    if graph.num_nodes == 0:
        raise ValueError("empty graph")
    isolated = np.flatnonzero(graph.degrees == 0)
    if len(isolated):
        raise ValueError(f"graph has {len(isolated)} isolated nodes (e.g. {int(isolated[0])}); walks cannot start there")
    if params.mode == "merw-pq":
        if eig is not None:
            graph = merw_reweight(graph, eig)
        elif graph.is_connected():
            graph = merw_reweight(graph, leading_eigenpair(graph))
        else:
            graph = merw_reweight_components(graph)
    biased = params.mode != "uniform"
    weights = graph.weights if graph.weights is not None else np.ones(len(graph.indices))
    kernel = _walks_parallel if parallel else _walks_serial
    walks = kernel(graph.indptr, graph.indices, weights, biased, 1.0 / params.p, 1.0 / params.q,
                   params.walk_len, params.walks_per_node, seed_to_u64(params.seed),
                   int(graph.degrees.max()))
    return WalkCorpus(walks, graph.num_nodes)


class RandomWalker(BaseEstimator):
    """Estimator wrapper around :func:`generate_corpus`.

    ``fit(graph)`` stores the corpus in ``corpus_``; ``fit_transform``
    returns the walk array.
    """

    def __init__(self, mode="uniform", p=1.0, q=1.0, walk_len=80, walks_per_node=10,
                 seed=0, parallel=False):
        self.mode = mode
        self.p = p
        self.q = q
        self.walk_len = walk_len
        self.walks_per_node = walks_per_node
        self.seed = seed
        self.parallel = parallel

    def walk_params(self) -> WalkParams:
        return WalkParams(p=self.p, q=self.q, walk_len=self.walk_len,
                          walks_per_node=self.walks_per_node, mode=self.mode, seed=self.seed)

    def fit(self, graph, y=None):
        from .validation import check_graph

        graph = check_graph(graph)
        self.corpus_ = generate_corpus(graph, self.walk_params(), parallel=self.parallel)
        return self

    def fit_transform(self, graph, y=None):
        return self.fit(graph).corpus_.walks
