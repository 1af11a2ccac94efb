"""Input coercion shared by the estimators."""
from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.utils import check_array

from .graph import Graph, GroundTruthCover, Partition


def check_graph(graph) -> Graph:
    """Accept a :class:`Graph`, a networkx graph, or a square (sparse) adjacency matrix."""
    if isinstance(graph, Graph):
        return graph
    if sp.issparse(graph):
        if graph.shape[0] != graph.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {graph.shape}")
        sym = graph - graph.T
        if sym.nnz and abs(sym).max() > 0:
            raise ValueError("adjacency matrix must be symmetric")
        return Graph.from_scipy(graph)
    if hasattr(graph, "nodes") and hasattr(graph, "edges"):
        if graph.is_directed() or graph.is_multigraph():
            raise ValueError("only undirected simple graphs are supported")
        nodes = list(graph.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        edges = np.array([(index[u], index[v]) for u, v in graph.edges()], dtype=np.int64).reshape(-1, 2)
        ids = nodes if all(isinstance(v, (int, np.integer)) for v in nodes) else None
        return Graph.from_edges(len(nodes), edges, node_ids=ids)
    arr = np.asarray(graph)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        if not np.allclose(arr, arr.T):
            raise ValueError("adjacency matrix must be symmetric")
        return Graph.from_scipy(sp.csr_matrix(arr))
    raise TypeError(f"cannot interpret {type(graph).__name__} as a graph")


def check_partition(partition, num_nodes: int | None = None) -> Partition:
    """Coerce labels / a Partition / a disjoint cover to a :class:`Partition`."""
    if isinstance(partition, GroundTruthCover):
        partition = partition.to_partition()
    elif not isinstance(partition, Partition):
        partition = Partition.from_labels(np.asarray(partition).ravel())
    if num_nodes is not None and partition.num_nodes != num_nodes:
        raise ValueError(f"partition covers {partition.num_nodes} nodes, expected {num_nodes}")
    return partition


def check_cover(cover, num_nodes: int | None = None) -> GroundTruthCover:
    if isinstance(cover, GroundTruthCover):
        out = cover
    else:
        out = check_partition(cover).to_cover()
    if num_nodes is not None and out.num_nodes != num_nodes:
        raise ValueError(f"cover spans {out.num_nodes} nodes, expected {num_nodes}")
    return out


def check_vectors(X) -> np.ndarray:
    return check_array(X, dtype=np.float64, ensure_min_samples=1)
