"""Modularity and the combinatorial partitioners (CNM, Louvain, label propagation)."""
from __future__ import annotations

import heapq
import logging

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .graph import Graph, Partition, _compact
from .validation import check_graph, check_partition

logger = logging.getLogger(__name__)


def modularity(graph: Graph, partition) -> float:
    """Newman modularity from per-community aggregates.

    ``Q = sum_c [ w_in(c) / W - (S(c) / 2W)^2 ]`` where ``w_in`` is the edge
    weight inside ``c``, ``S`` the summed node strength, ``W`` the total edge
    weight. Equal to the pairwise double sum since the graph has no
    self-loops.
    """
    partition = check_partition(partition, graph.num_nodes)
    labels = partition.labels
    total = graph.edge_weights().sum()
    if total == 0:
        return 0.0
    k = partition.num_communities
    edges = graph.edges()
    same = labels[edges[:, 0]] == labels[edges[:, 1]]
    w_in = np.bincount(labels[edges[same, 0]], weights=graph.edge_weights()[same], minlength=k)
    strength = np.bincount(labels, weights=graph.strength(), minlength=k)
    return float(np.sum(w_in / total - (strength / (2.0 * total)) ** 2))


def _csr_lists(graph: Graph):
    indptr = graph.indptr.tolist()
    indices = graph.indices.tolist()
    weights = graph.weights.tolist() if graph.weights is not None else [1.0] * len(indices)
    return indptr, indices, weights


def cnm(graph: Graph) -> Partition:
    """Clauset-Newman-Moore greedy agglomeration.

    Starting from singletons, repeatedly merges the adjacent pair of
    communities with the largest modularity gain until no gain is positive.
    Gains are compared as ``2W e_ij - S_i S_j`` (exact for integer weights);
    ties go to the lexicographically smallest community pair. The surviving
    community keeps the smaller id.
    """
    n = graph.num_nodes
    if n == 0:
        raise ValueError("empty graph")
    indptr, indices, weights = _csr_lists(graph)
    two_w = float(sum(weights))  # CSR lists each edge twice
    strength = graph.strength().tolist()
    between: list[dict[int, float] | None] = [dict() for _ in range(n)]
    for u in range(n):
        row = between[u]
        for e in range(indptr[u], indptr[u + 1]):
            row[indices[e]] = row.get(indices[e], 0.0) + weights[e]

    def gain(i: int, j: int) -> float:
        return two_w * between[i][j] - strength[i] * strength[j]

    heap = [(-gain(i, j), i, j) for i in range(n) for j in between[i] if i < j]
    heapq.heapify(heap)
    members = [[v] for v in range(n)]
    merges = 0
    while heap:
        neg, i, j = heapq.heappop(heap)
        if between[i] is None or between[j] is None or j not in between[i] or -neg != gain(i, j):
            continue
        if -neg <= 0:
            break
        # absorb j into i (i < j)
        row_i, row_j = between[i], between[j]
        del row_i[j]
        del row_j[i]
        for x, w in row_j.items():
            row_i[x] = row_i.get(x, 0.0) + w
            row_x = between[x]
            row_x[i] = row_x.get(i, 0.0) + w
            del row_x[j]
        between[j] = None
        strength[i] += strength[j]
        members[i].extend(members[j])
        members[j] = []
        merges += 1
        for x in row_i:
            a, b = (i, x) if i < x else (x, i)
            heapq.heappush(heap, (-gain(a, b), a, b))
    labels = np.empty(n, dtype=np.int64)
    for cid, group in enumerate(g for g in members if g):
        labels[group] = cid
    logger.debug("cnm: %d merges", merges)
    return Partition(_compact(labels))


def _louvain_level(indptr, indices, weights, self_w, order_rng, tol):
    """One local-moving phase on a (possibly aggregated) graph."""
    n = len(indptr) - 1
    k = [sum(weights[indptr[u]:indptr[u + 1]]) + 2.0 * self_w[u] for u in range(n)]
    m = sum(k) / 2.0
    comm = list(range(n))
    tot = list(k)
    moved_any = False
    while True:
        improvement = 0.0
        moves = 0
        for u in order_rng.permutation(n).tolist():
            cu = comm[u]
            links: dict[int, float] = {}
            for e in range(indptr[u], indptr[u + 1]):
                c = comm[indices[e]]
                links[c] = links.get(c, 0.0) + weights[e]
            ku = k[u]
            tot[cu] -= ku
            base = links.get(cu, 0.0) - tot[cu] * ku / (2.0 * m)
            best, best_gain = cu, base
            for c, w in links.items():
                g = w - tot[c] * ku / (2.0 * m)
                if g > best_gain:
                    best, best_gain = c, g
            tot[best] += ku
            if best != cu:
                comm[u] = best
                moves += 1
                improvement += (best_gain - base) / m
        if moves:
            moved_any = True
        if moves == 0 or improvement < tol:
            break
    return comm, moved_any


def louvain(graph: Graph, seed: int = 0, tol: float = 1e-9) -> Partition:
    """Louvain: local moving to a modularity fixpoint, then coarsening, repeated.

    Node visiting order is shuffled with ``seed`` each sweep. A sweep whose
    total modularity gain is below ``tol`` ends the local-moving phase.
    """
    n = graph.num_nodes
    if n == 0:
        raise ValueError("empty graph")
    rng = np.random.default_rng(seed)
    indptr, indices, weights = _csr_lists(graph)
    self_w = [0.0] * n
    node_comm = np.arange(n)
    while True:
        comm, moved = _louvain_level(indptr, indices, weights, self_w, rng, tol)
        if not moved:
            break
        comm = _compact(np.asarray(comm)).tolist()
        node_comm = np.asarray(comm)[node_comm]
        k = max(comm) + 1
        agg: list[dict[int, float]] = [dict() for _ in range(k)]
        new_self = [0.0] * k
        for u in range(len(indptr) - 1):
            cu = comm[u]
            new_self[cu] += self_w[u]
            for e in range(indptr[u], indptr[u + 1]):
                cv = comm[indices[e]]
                if cv == cu:
                    new_self[cu] += weights[e] / 2.0
                else:
                    agg[cu][cv] = agg[cu].get(cv, 0.0) + weights[e]
        if k == len(indptr) - 1:
            break
        indptr, indices, weights = [0], [], []
        for row in agg:
            for cv in sorted(row):
                indices.append(cv)
                weights.append(row[cv])
            indptr.append(len(indices))
        self_w = new_self
    return Partition(_compact(node_comm))


def lpa(graph: Graph, seed: int = 0, max_sweeps: int = 1000) -> tuple[Partition, bool]:
    """Asynchronous label propagation.

    Each sweep visits nodes in a fresh random order. A node whose label is not
    among those carrying the most neighbor weight switches to one of them,
    chosen uniformly at random. Stops after a sweep without changes, i.e. once
    every node holds a majority label. Returns the partition and whether that
    happened within ``max_sweeps``.
    """
    n = graph.num_nodes
    if n == 0:
        raise ValueError("empty graph")
    rng = np.random.default_rng(seed)
    indptr, indices, weights = _csr_lists(graph)
    labels = list(range(n))

    def majority(u: int) -> list[int]:
        counts: dict[int, float] = {}
        for e in range(indptr[u], indptr[u + 1]):
            lab = labels[indices[e]]
            counts[lab] = counts.get(lab, 0.0) + weights[e]
        if not counts:
            return [labels[u]]
        top = max(counts.values())
        return [lab for lab, c in counts.items() if c == top]

    converged = False
    for _ in range(max_sweeps):
        changed = False
        for u in rng.permutation(n).tolist():
            best = majority(u)
            if labels[u] not in best:
                labels[u] = best[0] if len(best) == 1 else best[int(rng.integers(len(best)))]
                changed = True
        if not changed:
            converged = True
            break
    if not converged:
        logger.warning("label propagation hit the %d-sweep cap", max_sweeps)
    return Partition(_compact(np.asarray(labels))), converged


class _GraphPartitioner(ClusterMixin, BaseEstimator):
    def _partition(self, graph: Graph) -> Partition:
        raise NotImplementedError

    def fit(self, graph, y=None):
        graph = check_graph(graph)
        self.partition_ = self._partition(graph)
        self.labels_ = self.partition_.labels
        self.n_communities_ = self.partition_.num_communities
        self.modularity_ = modularity(graph, self.partition_)
        return self


class CNM(_GraphPartitioner):
    """Greedy modularity agglomeration (deterministic; no parameters)."""

    def _partition(self, graph):
        return cnm(graph)


class Louvain(_GraphPartitioner):
    def __init__(self, seed=0, tol=1e-9):
        self.seed = seed
        self.tol = tol

    def _partition(self, graph):
        return louvain(graph, seed=self.seed, tol=self.tol)


class LabelPropagation(_GraphPartitioner):
    def __init__(self, seed=0, max_sweeps=1000):
        self.seed = seed
        self.max_sweeps = max_sweeps

    def _partition(self, graph):
        partition, self.converged_ = lpa(graph, seed=self.seed, max_sweeps=self.max_sweeps)
        return partition


PARTITIONERS = {"cnm": CNM, "louvain": Louvain, "lpa": LabelPropagation}


def make_partitioner(name: str, seed: int = 0) -> _GraphPartitioner:
    try:
        cls = PARTITIONERS[name]
    except KeyError:
        raise ValueError(f"unknown partitioner {name!r}; choose from {sorted(PARTITIONERS)}") from None
    return cls() if cls is CNM else cls(seed=seed)
