"""Leading eigenpair of the adjacency matrix and maximal-entropy edge weights."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .graph import Graph

logger = logging.getLogger(__name__)


class ConvergenceError(RuntimeError):
    def __init__(self, message: str, residual: float):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class EigenPair:
    """Dominant eigenvalue ``lam`` and unit, strictly positive eigenvector ``psi``."""

    lam: float
    psi: np.ndarray
    iterations: int = 0
    residual: float = 0.0
    shifted: bool = False


def is_bipartite(graph: Graph) -> bool:
    color = np.full(graph.num_nodes, -1, dtype=np.int8)
    for root in range(graph.num_nodes):
        if color[root] >= 0:
            continue
        color[root] = 0
        stack = [root]
        while stack:
            u = stack.pop()
            for v in graph.neighbors(u).tolist():
                if color[v] < 0:
                    color[v] = 1 - color[u]
                    stack.append(v)
                elif color[v] == color[u]:
                    return False
    return True


def leading_eigenpair(graph: Graph, tol: float = 1e-10, max_iter: int = 100_000,
                      weighted: bool = False) -> EigenPair:
    """Power iteration for the Perron eigenpair of the adjacency matrix.

    Starts from the all-ones vector. On bipartite graphs the spectrum is
    symmetric (``-lam`` is also an eigenvalue) so ``A + I`` is iterated
    instead and the shift removed from the reported eigenvalue.

    Raises
    ------
    ValueError
        If the graph is empty or disconnected.
    ConvergenceError
        If ``||A psi - lam psi||_2 > tol`` after ``max_iter`` steps.
    """
    n = graph.num_nodes
    if n == 0:
        raise ValueError("empty graph")
    if not graph.is_connected():
        raise ValueError("graph is disconnected; compute the eigenpair per component")
    adj = graph.adjacency(weighted=weighted)
    if graph.num_edges == 0:
        return EigenPair(0.0, np.ones(1), 0, 0.0, False)

    shifted = is_bipartite(graph)
    op = adj + sp.identity(n, format="csr") if shifted else adj
    x = np.ones(n) / np.sqrt(n)
    residual = np.inf
    for it in range(1, max_iter + 1):
        y = op @ x
        y /= np.linalg.norm(y)
        x = y
        # residual is checked against A, not the shifted operator
        ax = adj @ x
        lam = float(x @ ax)
        residual = float(np.linalg.norm(ax - lam * x))
        if residual <= tol:
            break
    else:
        raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", residual)
    if shifted:
        logger.debug("bipartite graph: iterated A + I")
    if np.any(x <= 0):
        raise ConvergenceError("eigenvector is not strictly positive", residual)
    return EigenPair(lam, x, it, residual, shifted)


def merw_weights(graph: Graph, eig: EigenPair) -> np.ndarray:
    """Per-CSR-entry weights ``psi(u) * psi(v)``."""
    if len(eig.psi) != graph.num_nodes:
        raise ValueError(f"eigenpair has {len(eig.psi)} entries for a graph of {graph.num_nodes} nodes")
    rows = np.repeat(np.arange(graph.num_nodes), graph.degrees)
    return eig.psi[rows] * eig.psi[graph.indices]


def merw_reweight(graph: Graph, eig: EigenPair) -> Graph:
    """Copy of ``graph`` with edge weight ``psi(u) * psi(v)``.

    Normalising these weights over the neighbors of ``u`` gives
    ``psi(v) / (lam * psi(u))`` because ``sum_{x ~ u} psi(x) = lam * psi(u)``,
    i.e. exactly the maximal-entropy transition matrix.
    """
    return graph.with_weights(merw_weights(graph, eig))


def merw_reweight_components(graph: Graph, tol: float = 1e-10, max_iter: int = 100_000) -> Graph:
    """MERW weights for a possibly disconnected graph, one eigenpair per component.

    Isolated nodes carry no edges and are left untouched.
    """
    comp = graph.connected_components()
    weights = np.empty(len(graph.indices))
    rows = np.repeat(np.arange(graph.num_nodes), graph.degrees)
    for c in range(int(comp.max()) + 1):
        nodes = np.flatnonzero(comp == c)
        if len(nodes) < 2:
            continue
        eig = leading_eigenpair(graph.subgraph(nodes), tol=tol, max_iter=max_iter)
        psi = np.zeros(graph.num_nodes)
        psi[nodes] = eig.psi
        mask = comp[rows] == c
        weights[mask] = psi[rows[mask]] * psi[graph.indices[mask]]
    return graph.with_weights(weights)


def merw_transition_matrix(graph: Graph, eig: EigenPair) -> sp.csr_matrix:
    """Dense-free MERW stochastic matrix ``A_uv psi_v / (lam psi_u)``."""
    rows = np.repeat(np.arange(graph.num_nodes), graph.degrees)
    data = eig.psi[graph.indices] / (eig.lam * eig.psi[rows])
    return sp.csr_matrix((data, graph.indices, graph.indptr), shape=(graph.num_nodes,) * 2)
