"""Graph, partition and ground-truth data model plus text-format I/O.

Graphs are stored in compressed sparse row form with sorted neighbor lists.
Node ids are remapped to ``0..n-1``; the original ids are kept in
``Graph.node_ids`` so results can be written back in the caller's id space.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

logger = logging.getLogger(__name__)


class GraphFormatError(ValueError):
    """Raised when an edge-list or community file cannot be parsed."""


@dataclass(frozen=True)
class LoadReport:
    self_loops: int = 0
    duplicate_edges: int = 0
    skipped_lines: int = 0


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph in CSR form.

    Parameters
    ----------
    indptr, indices : ndarray
        CSR structure. ``indices[indptr[u]:indptr[u+1]]`` are the sorted
        neighbors of ``u``; every undirected edge appears twice.
    weights : ndarray, optional
        Positive weight per CSR entry, symmetric. ``None`` means all 1.0.
    node_ids : ndarray, optional
        Original id of each internal node. Defaults to ``arange(n)``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray | None = None
    node_ids: np.ndarray | None = None
    load_report: LoadReport = field(default_factory=LoadReport)

    def __post_init__(self):
        for arr in (self.indptr, self.indices, self.weights, self.node_ids):
            if arr is not None:
                arr.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges: Iterable[tuple[int, int]] | np.ndarray,
        weights: Sequence[float] | np.ndarray | None = None,
        node_ids: Sequence[int] | np.ndarray | None = None,
        load_report: LoadReport | None = None,
    ) -> "Graph":
        """Build a graph from an undirected edge list over ``0..num_nodes-1``.

        Self-loops are dropped and duplicate edges merged (first weight wins).
        """
        edges = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges,
                           dtype=np.int64).reshape(-1, 2)
        if num_nodes < 0:
            raise ValueError("num_nodes must be non-negative")
        if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
            raise ValueError("edge endpoint out of range")
        w = None
        if weights is not None:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != (len(edges),):
                raise ValueError("weights must have one entry per edge")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise ValueError("edge weights must be finite and strictly positive")

        keep = edges[:, 0] != edges[:, 1]
        n_loops = int((~keep).sum())
        edges = edges[keep]
        if w is not None:
            w = w[keep]
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        key = lo * max(num_nodes, 1) + hi
        _, first = np.unique(key, return_index=True)
        first.sort()
        n_dup = len(edges) - len(first)
        lo, hi = lo[first], hi[first]
        if w is not None:
            w = w[first]

        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        indptr = np.cumsum(indptr)
        data = None
        if w is not None:
            data = np.concatenate([w, w])[order]

        ids = np.arange(num_nodes, dtype=np.int64) if node_ids is None else np.asarray(node_ids, dtype=np.int64)
        if ids.shape != (num_nodes,):
            raise ValueError("node_ids must have one entry per node")
        if load_report is None:
            load_report = LoadReport(self_loops=n_loops, duplicate_edges=n_dup)
        return cls(indptr, cols.astype(np.int32), data, ids, load_report)

    @classmethod
    def from_scipy(cls, matrix, node_ids=None) -> "Graph":
        coo = sp.triu(sp.coo_matrix(matrix), k=1).tocoo()
        weights = None if np.all(coo.data == 1) else coo.data
        return cls.from_edges(matrix.shape[0], np.column_stack([coo.row, coo.col]), weights, node_ids)

    @property
    def num_nodes(self) -> int:
        return len(self.indptr) - 1

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u]:self.indptr[u + 1]]

    def neighbor_weights(self, u: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.indptr[u + 1] - self.indptr[u])
        return self.weights[self.indptr[u]:self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        nbrs = self.neighbors(u)
        i = np.searchsorted(nbrs, v)
        return bool(i < len(nbrs) and nbrs[i] == v)

    def edge_weight(self, u: int, v: int) -> float:
        nbrs = self.neighbors(u)
        i = int(np.searchsorted(nbrs, v))
        if i >= len(nbrs) or nbrs[i] != v:
            raise KeyError(f"no edge ({u}, {v})")
        return 1.0 if self.weights is None else float(self.weights[self.indptr[u] + i])

    def strength(self) -> np.ndarray:
        """Weighted degree of every node (plain degree when unweighted)."""
        if self.weights is None:
            return self.degrees.astype(np.float64)
        rows = np.repeat(np.arange(self.num_nodes), self.degrees)
        return np.bincount(rows, weights=self.weights, minlength=self.num_nodes)

    def edges(self) -> np.ndarray:
        """Each undirected edge once as ``(u, v)`` with ``u < v``."""
        rows = np.repeat(np.arange(self.num_nodes), self.degrees)
        mask = rows < self.indices
        return np.column_stack([rows[mask], self.indices[mask]])

    def edge_weights(self) -> np.ndarray:
        """Weights aligned with :meth:`edges`."""
        if self.weights is None:
            return np.ones(self.num_edges)
        rows = np.repeat(np.arange(self.num_nodes), self.degrees)
        return self.weights[rows < self.indices]

    def adjacency(self, weighted: bool = True) -> sp.csr_matrix:
        data = self.weights if (weighted and self.weights is not None) else np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.num_nodes, self.num_nodes))

    def with_weights(self, weights: np.ndarray) -> "Graph":
        """Copy of this graph carrying per-CSR-entry ``weights``."""
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != self.indices.shape:
            raise ValueError("weights must align with the CSR indices")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise ValueError("edge weights must be finite and strictly positive")
        return Graph(self.indptr.copy(), self.indices.copy(), weights, self.node_ids.copy(), self.load_report)

    def subgraph(self, nodes: np.ndarray) -> "Graph":
        nodes = np.asarray(nodes, dtype=np.int64)
        sub = self.adjacency()[nodes][:, nodes]
        return Graph.from_scipy(sub, node_ids=self.node_ids[nodes])

    def connected_components(self) -> np.ndarray:
        """Component label per node, numbered by smallest member."""
        from scipy.sparse.csgraph import connected_components

        _, labels = connected_components(self.adjacency(weighted=False), directed=False)
        return _compact(labels)

    def is_connected(self) -> bool:
        return self.num_nodes > 0 and int(self.connected_components().max()) == 0

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        same = (
            np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.node_ids, other.node_ids)
        )
        if not same or (self.weights is None) != (other.weights is None):
            return False
        return self.weights is None or np.array_equal(self.weights, other.weights)

    __hash__ = None

    def __repr__(self) -> str:
        return f"Graph(num_nodes={self.num_nodes}, num_edges={self.num_edges}, weighted={self.is_weighted})"


def _compact(labels: np.ndarray) -> np.ndarray:
    """Relabel to ``0..K-1`` in order of first appearance."""
    labels = np.asarray(labels)
    _, first, inverse = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(first))
    return rank[inverse.reshape(-1)]


@dataclass(frozen=True, eq=False)
class Partition:
    """Disjoint node -> community assignment with contiguous ids ``0..K-1``."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValueError("labels must be one-dimensional")
        if labels.size:
            if not np.issubdtype(labels.dtype, np.integer) or labels.min() < 0:
                raise ValueError("labels must be non-negative integers")
            present = np.unique(labels)
            if present[-1] != len(present) - 1:
                labels = _compact(labels)
        labels = labels.astype(np.int64, copy=True)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Compact arbitrary hashable labels to ``0..K-1`` by first appearance."""
        labels = list(labels) if not isinstance(labels, np.ndarray) else labels
        if len(labels) == 0:
            return cls(np.zeros(0, dtype=np.int64))
        mapping: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels.tolist() if isinstance(labels, np.ndarray) else labels):
            out[i] = mapping.setdefault(lab, len(mapping))
        return cls(out)

    @classmethod
    def from_communities(cls, communities: Sequence[Iterable[int]], num_nodes: int) -> "Partition":
        labels = np.full(num_nodes, -1, dtype=np.int64)
        for cid, members in enumerate(communities):
            for v in members:
                if labels[v] != -1:
                    raise ValueError(f"node {v} appears in more than one community")
                labels[v] = cid
        if np.any(labels < 0):
            missing = np.flatnonzero(labels < 0)[:5].tolist()
            raise ValueError(f"partition does not cover nodes {missing}")
        return cls(_compact(labels))

    @property
    def num_nodes(self) -> int:
        return len(self.labels)

    @property
    def num_communities(self) -> int:
        return int(self.labels.max()) + 1 if self.labels.size else 0

    @property
    def communities(self) -> list[np.ndarray]:
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(self.labels[order], np.arange(self.num_communities + 1))
        return [order[bounds[i]:bounds[i + 1]] for i in range(self.num_communities)]

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.num_communities)

    def to_cover(self) -> "GroundTruthCover":
        return GroundTruthCover([c.tolist() for c in self.communities], self.num_nodes)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Partition):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    __hash__ = None

    def __len__(self) -> int:
        return self.num_nodes

    def __repr__(self) -> str:
        return f"Partition(num_nodes={self.num_nodes}, num_communities={self.num_communities})"


class GroundTruthCover:
    """Possibly overlapping community cover over ``num_nodes`` nodes.

    Nodes that belong to no community are allowed (e.g. SNAP top-5000 covers).
    """

    def __init__(self, communities: Sequence[Iterable[int]], num_nodes: int | None = None):
        comms = [np.unique(np.asarray(list(c), dtype=np.int64)) for c in communities]
        if any(len(c) == 0 for c in comms):
            raise ValueError("communities must be non-empty")
        top = max((int(c[-1]) for c in comms), default=-1)
        if num_nodes is None:
            num_nodes = top + 1
        if top >= num_nodes or any(c[0] < 0 for c in comms):
            raise ValueError(f"community member id out of range for {num_nodes} nodes")
        self.communities = comms
        self.num_nodes = num_nodes

    @property
    def num_communities(self) -> int:
        return len(self.communities)

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.communities], dtype=np.int64)

    @property
    def membership_counts(self) -> np.ndarray:
        counts = np.zeros(self.num_nodes, dtype=np.int64)
        for c in self.communities:
            counts[c] += 1
        return counts

    @property
    def memberships(self) -> list[set[int]]:
        out: list[set[int]] = [set() for _ in range(self.num_nodes)]
        for cid, c in enumerate(self.communities):
            for v in c.tolist():
                out[v].add(cid)
        return out

    @property
    def covered_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.membership_counts > 0)

    @property
    def is_disjoint(self) -> bool:
        return bool(np.all(self.membership_counts <= 1))

    @property
    def overlapping_nodes(self) -> np.ndarray:
        return np.flatnonzero(self.membership_counts > 1)

    def to_partition(self) -> Partition:
        """Disjoint view: each node keeps its smallest community id.

        Every node must be covered.
        """
        labels = np.full(self.num_nodes, -1, dtype=np.int64)
        for cid in range(len(self.communities) - 1, -1, -1):
            labels[self.communities[cid]] = cid
        if np.any(labels < 0):
            raise ValueError("cover leaves some nodes unassigned")
        if not self.is_disjoint:
            logger.warning("cover has %d overlapping nodes; keeping smallest community id",
                           len(self.overlapping_nodes))
        return Partition(_compact(labels))

    def restrict(self, nodes: np.ndarray) -> "GroundTruthCover":
        """Cover re-indexed onto ``nodes`` (position i <- node nodes[i])."""
        index = np.full(self.num_nodes, -1, dtype=np.int64)
        index[nodes] = np.arange(len(nodes))
        comms = [index[c][index[c] >= 0] for c in self.communities]
        return GroundTruthCover([c for c in comms if len(c)], len(nodes))

    def __repr__(self) -> str:
        return (f"GroundTruthCover(num_nodes={self.num_nodes}, "
                f"num_communities={self.num_communities}, disjoint={self.is_disjoint})")


@dataclass(frozen=True)
class GraphStats:
    num_nodes: int
    num_edges: int
    k_max: int
    k_avg: float
    c_num: int | None = None
    c_max: int | None = None
    c_min: int | None = None
    c_avg: float | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def parse_edge_list(text: str) -> Graph:
    """Parse a whitespace-separated ``u v`` edge list.

    Lines starting with ``#`` or ``%`` are comments. Extra columns (e.g. a
    weight) are ignored. Node ids are compacted to ``0..n-1`` in order of
    first appearance; ``Graph.node_ids`` maps back.
    """
    id_map: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        parts = line.split()
        if len(parts) < 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: node ids must be integers, got {line!r}") from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"line {lineno}: node ids must be non-negative")
        pairs.append((id_map.setdefault(u, len(id_map)), id_map.setdefault(v, len(id_map))))
    if not pairs:
        raise GraphFormatError("edge list is empty")
    node_ids = np.fromiter(id_map.keys(), dtype=np.int64, count=len(id_map))
    graph = Graph.from_edges(len(id_map), np.array(pairs), node_ids=node_ids)
    report = graph.load_report
    if report.self_loops or report.duplicate_edges:
        logger.warning("edge list cleaned: %d self-loops dropped, %d duplicate edges merged",
                       report.self_loops, report.duplicate_edges)
    return graph


def serialize_edge_list(graph: Graph, preserve_order: bool = True) -> str:
    """Inverse of :func:`parse_edge_list`.

    With ``preserve_order`` lines are ordered so that re-parsing assigns the
    same internal ids. A node that cannot be introduced through one of its
    edges is then emitted as a self-loop line, which the parser drops (and
    counts) while keeping the node. Without it, each edge is written once and
    only isolated nodes get a self-loop line; original ids still round-trip.
    """
    ids = graph.node_ids.tolist()
    n = graph.num_nodes
    if not preserve_order:
        lines = [f"{ids[u]} {ids[v]}" for u, v in graph.edges().tolist()]
        lines += [f"{ids[k]} {ids[k]}" for k in np.flatnonzero(graph.degrees == 0).tolist()]
        return "\n".join(lines) + "\n"
    seen = np.zeros(n, dtype=bool)
    used: set[tuple[int, int]] = set()
    lines: list[str] = []
    for k in range(n):
        if seen[k]:
            continue
        nbrs = graph.neighbors(k)
        prior = nbrs[seen[nbrs]]
        if len(prior):
            x = int(prior[0])
            lines.append(f"{ids[x]} {ids[k]}")
            used.add((min(x, k), max(x, k)))
        elif k + 1 < n and not seen[k + 1] and graph.has_edge(k, k + 1):
            lines.append(f"{ids[k]} {ids[k + 1]}")
            used.add((k, k + 1))
            seen[k + 1] = True
        else:
            lines.append(f"{ids[k]} {ids[k]}")
        seen[k] = True
    for u, v in graph.edges().tolist():
        if (u, v) not in used:
            lines.append(f"{ids[u]} {ids[v]}")
    return "\n".join(lines) + "\n"


def parse_community_file(text: str, graph: Graph | None = None) -> GroundTruthCover:
    """Parse a SNAP ``cmty`` file: one community per line, ids separated by whitespace.

    When ``graph`` is given, ids are interpreted as original ids and mapped to
    the graph's internal ids.
    """
    lookup = None
    if graph is not None:
        lookup = {int(orig): i for i, orig in enumerate(graph.node_ids.tolist())}
    communities: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if not line:
            logger.warning("line %d: empty community skipped", lineno)
            continue
        try:
            ids = [int(tok) for tok in line.split()]
        except ValueError:
            raise GraphFormatError(f"line {lineno}: community members must be integers") from None
        if lookup is not None:
            try:
                ids = [lookup[i] for i in ids]
            except KeyError as exc:
                raise GraphFormatError(f"line {lineno}: node {exc.args[0]} not in graph") from None
        communities.append(ids)
    cover = GroundTruthCover(communities, None if graph is None else graph.num_nodes)
    if not cover.is_disjoint:
        logger.info("community file is overlapping (%d nodes in several communities)",
                    len(cover.overlapping_nodes))
    return cover


def serialize_communities(communities: Sequence[Iterable[int]], graph: Graph | None = None) -> str:
    """One community per line, using the graph's original ids when given."""
    ids = graph.node_ids if graph is not None else None
    lines = []
    for members in communities:
        members = np.asarray(list(members) if not isinstance(members, np.ndarray) else members)
        out = ids[members] if ids is not None else members
        lines.append(" ".join(str(int(v)) for v in out))
    return "\n".join(lines) + "\n"


def graph_stats(graph: Graph, cover: GroundTruthCover | Partition | None = None) -> GraphStats:
    degrees = graph.degrees
    n = graph.num_nodes
    base = dict(
        num_nodes=n,
        num_edges=graph.num_edges,
        k_max=int(degrees.max()) if n else 0,
        k_avg=2.0 * graph.num_edges / n if n else 0.0,
    )
    if cover is None:
        return GraphStats(**base)
    if isinstance(cover, Partition):
        cover = cover.to_cover()
    if cover.num_nodes > n:
        raise ValueError("cover refers to nodes outside the graph")
    sizes = cover.sizes
    return GraphStats(
        **base,
        c_num=len(sizes),
        c_max=int(sizes.max()),
        c_min=int(sizes.min()),
        c_avg=float(sizes.mean()),
    )
