"""LFR-style benchmark graphs with planted disjoint communities.

Degrees and community sizes follow truncated power laws. Every node splits
its degree into ``round((1 - mu) k)`` internal stubs and the rest external
stubs; both stub sets are matched by a configuration model whose bad pairs
(self-loops, multi-edges, external pairs inside one community) are repaired
by random edge swaps.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import networkx as nx
import numpy as np
from scipy.optimize import brentq

from .graph import Graph, GroundTruthCover

logger = logging.getLogger(__name__)


class LfrError(ValueError):
    """Infeasible parameters or a matching that could not be repaired."""


@dataclass(frozen=True)
class LfrParams:
    n: int = 1000
    mu: float = 0.3
    tau1: float = 2.0
    tau2: float = 1.0
    k_avg: float = 8.0
    k_max: int = 50
    c_min: int = 5
    c_max: int = 100
    seed: int = 0

    def __post_init__(self):
        if self.n < 2:
            raise LfrError("n must be at least 2")
        if not 0.0 <= self.mu <= 1.0:
            raise LfrError("mu must lie in [0, 1]")
        if self.tau1 <= 1.0:
            raise LfrError("tau1 must exceed 1")
        if self.tau2 < 0.0:
            raise LfrError("tau2 must be non-negative")
        if not self.k_max < self.n:
            raise LfrError("k_max must be smaller than n")
        if not 1.0 <= self.k_avg <= self.k_max:
            raise LfrError("k_avg must lie in [1, k_max]")
        if not 1 <= self.c_min <= self.c_max <= self.n:
            raise LfrError("need 1 <= c_min <= c_max <= n")
        if self.c_max < round((1.0 - self.mu) * self.k_max) + 1:
            raise LfrError(f"c_max={self.c_max} cannot hold a node with internal degree "
                           f"{round((1.0 - self.mu) * self.k_max)} (c_max >= max internal degree + 1)")


def _powerlaw_mean(x0: float, x1: float, tau: float) -> float:
    # mean of the continuous density ~ x^-tau on [x0, x1]
    if abs(tau - 1.0) < 1e-12:
        return (x1 - x0) / np.log(x1 / x0)
    if abs(tau - 2.0) < 1e-12:
        return np.log(x1 / x0) / (1.0 / x0 - 1.0 / x1)
    a, b = 1.0 - tau, 2.0 - tau
    return (a / b) * (x1 ** b - x0 ** b) / (x1 ** a - x0 ** a)


def _powerlaw_sample(rng, size: int, x0: float, x1: float, tau: float) -> np.ndarray:
    u = rng.random(size)
    if abs(tau - 1.0) < 1e-12:
        return x0 * (x1 / x0) ** u
    a = 1.0 - tau
    return (x0 ** a + u * (x1 ** a - x0 ** a)) ** (1.0 / a)


def degree_sequence(rng, n: int, tau: float, k_avg: float, k_max: int) -> np.ndarray:
    """Rounded continuous power law on ``[k_min, k_max]`` with ``k_min`` fitted to ``k_avg``."""
    if k_avg >= k_max:
        return np.full(n, k_max, dtype=np.int64)
    lo = 0.5 + 1e-9
    if _powerlaw_mean(lo, k_max + 0.5, tau) > k_avg:
        raise LfrError(f"k_avg={k_avg} is below what exponent {tau} allows with k_max={k_max}")
    x0 = brentq(lambda x: _powerlaw_mean(x, k_max + 0.5, tau) - k_avg, lo, k_max + 0.5 - 1e-9)
    k = np.rint(_powerlaw_sample(rng, n, x0, k_max + 0.5, tau)).astype(np.int64)
    return np.clip(k, 1, k_max)


def size_sequence(rng, n: int, tau: float, c_min: int, c_max: int, need: int) -> np.ndarray:
    """Discrete power-law community sizes summing exactly to ``n``.

    Overshoot is removed one member at a time from random communities still
    above ``c_min``. At least one community must reach ``need`` members.
    """
    support = np.arange(c_min, c_max + 1)
    prob = support.astype(np.float64) ** -tau
    prob /= prob.sum()
    for _ in range(1000):
        sizes: list[int] = []
        total = 0
        while total < n:
            s = int(rng.choice(support, p=prob))
            sizes.append(s)
            total += s
        sizes_arr = np.array(sizes, dtype=np.int64)
        excess = total - n
        while excess > 0:
            slack = np.flatnonzero(sizes_arr > c_min)
            if len(slack) == 0:
                sizes_arr = None
                break
            sizes_arr[rng.choice(slack)] -= 1
            excess -= 1
        if sizes_arr is not None and sizes_arr.max() >= need:
            return sizes_arr
    raise LfrError(f"could not draw community sizes in [{c_min}, {c_max}] summing to {n} "
                   f"with one community of at least {need} nodes")


def _assign(rng, k_in: np.ndarray, sizes: np.ndarray) -> np.ndarray:
    """Place nodes (largest internal degree first) into communities with room and enough members."""
    comm = np.empty(len(k_in), dtype=np.int64)
    free = sizes.copy()
    for v in np.argsort(-k_in, kind="stable"):
        ok = np.flatnonzero((free > 0) & (sizes > k_in[v]))
        if len(ok) == 0:
            raise LfrError(f"no community can host a node with internal degree {k_in[v]}")
        c = ok[rng.choice(len(ok), p=free[ok] / free[ok].sum())]
        comm[v] = c
        free[c] -= 1
    return comm


def _match(rng, stubs: np.ndarray, valid, taken: set, cap: int) -> list[tuple[int, int]]:
    """Configuration-model pairing of ``stubs`` with swap repair of invalid pairs.

    ``valid(u, v)`` rejects pairs on top of the simple-graph checks; ``taken``
    holds edges that already exist (updated in place).
    """
    stubs = rng.permutation(stubs)
    good: list[tuple[int, int]] = []
    bad: list[tuple[int, int]] = []

    def ok(u, v):
        return u != v and (min(u, v), max(u, v)) not in taken and valid(u, v)

    for i in range(0, len(stubs), 2):
        u, v = int(stubs[i]), int(stubs[i + 1])
        if ok(u, v):
            taken.add((min(u, v), max(u, v)))
            good.append((u, v))
        else:
            bad.append((u, v))
    attempts = 0
    while bad:
        if attempts >= cap or not good:
            raise LfrError(f"rewiring failed: {len(bad)} invalid stub pairs left after {attempts} swaps")
        attempts += 1
        i = int(rng.integers(len(bad)))
        c, d = bad[i]
        j = int(rng.integers(len(good)))
        a, b = good[j]
        if rng.random() < 0.5:
            a, b = b, a
        # replace (a,b) + (c,d) with (a,c) + (b,d)
        taken.discard((min(a, b), max(a, b)))
        if ok(a, c) and ok(b, d) and (min(a, c), max(a, c)) != (min(b, d), max(b, d)):
            taken.add((min(a, c), max(a, c)))
            taken.add((min(b, d), max(b, d)))
            good[j] = (a, c)
            good.append((b, d))
            bad[i] = bad[-1]
            bad.pop()
        else:
            taken.add((min(a, b), max(a, b)))
    return good


def _realize_internal(rng, members: np.ndarray, degrees: np.ndarray, taken: set) -> list[tuple[int, int]]:
    """Internal edges of one community with exactly the requested degrees.

    Dense communities can leave the swap repair stuck (a hub whose remaining
    non-neighbors share no edge), so a failed matching falls back to a
    Havel-Hakimi graph randomised by degree-preserving double-edge swaps.
    """
    stubs = np.repeat(members, degrees)
    if len(stubs) == 0:
        return []
    trial = set(taken)
    try:
        edges = _match(rng, stubs, lambda u, v: True, trial, 100 * (len(stubs) // 2))
    except LfrError:
        degrees = degrees.copy()
        trimmed = 0
        while not nx.is_graphical(degrees.tolist()):
            # shave the two largest demands (keeps the stub total even)
            top = np.argsort(-degrees, kind="stable")[:2]
            degrees[top] -= 1
            trimmed += 2
        if trimmed:
            logger.warning("community of %d nodes: internal degrees not graphical, %d stubs dropped",
                           len(members), trimmed)
        g = nx.havel_hakimi_graph(degrees.tolist())
        m = g.number_of_edges()
        if m >= 2:
            try:
                nx.double_edge_swap(g, nswap=m, max_tries=100 * m, seed=int(rng.integers(2**31)))
            except nx.NetworkXException:
                pass  # swaps only randomise; a rigid graph stays as built
        edges = [(int(members[a]), int(members[b])) for a, b in g.edges()]
        logger.debug("community of %d nodes realised by Havel-Hakimi fallback", len(members))
    for u, v in edges:
        taken.add((min(u, v), max(u, v)))
    return edges


def _fix_parity(rng, stubs: np.ndarray, members: np.ndarray, limit: np.ndarray) -> None:
    # an odd stub total cannot be paired; grow one random node that still has room
    if stubs[members].sum() % 2 == 0:
        return
    room = members[stubs[members] < limit[members]]
    if len(room) == 0:
        raise LfrError("cannot fix stub parity: every node is at its degree limit")
    stubs[rng.choice(room)] += 1


def generate_lfr(params: LfrParams) -> tuple[Graph, GroundTruthCover]:
    """Generate an LFR-style benchmark graph and its planted communities."""
    rng = np.random.default_rng(params.seed)
    n, mu = params.n, params.mu
    k = degree_sequence(rng, n, params.tau1, params.k_avg, params.k_max)
    k_in = np.rint((1.0 - mu) * k).astype(np.int64)
    sizes = size_sequence(rng, n, params.tau2, params.c_min, params.c_max, int(k_in.max()) + 1)
    k_out = k - k_in
    base_in = k_in
    # a random placement can crowd several hubs into one small community;
    # redraw until every community's internal degrees are graphical
    for attempt in range(50):
        comm = _assign(rng, base_in, sizes)
        k_in = base_in.copy()
        members = [np.flatnonzero(comm == c) for c in range(len(sizes))]
        for c, m in enumerate(members):
            _fix_parity(rng, k_in, m, np.full(n, sizes[c] - 1))
        if all(nx.is_graphical(k_in[m].tolist()) for m in members):
            break
    logger.debug("community placement accepted after %d draws", attempt + 1)
    if mu > 0:
        _fix_parity(rng, k_out, np.arange(n), n - sizes[comm])

    taken: set = set()
    edges: list[tuple[int, int]] = []
    for m in members:
        edges += _realize_internal(rng, m, k_in[m], taken)
    stubs = np.repeat(np.arange(n), k_out)
    if len(stubs):
        edges += _match(rng, stubs, lambda u, v: comm[u] != comm[v], taken, 100 * max(len(stubs) // 2, 1))

    graph = Graph.from_edges(n, np.array(edges, dtype=np.int64).reshape(-1, 2))
    cover = GroundTruthCover(members, n)
    logger.info("LFR n=%d mu=%.2f: %d edges, %d communities", n, mu, graph.num_edges, len(members))
    return graph, cover


def mixing(graph: Graph, labels: np.ndarray) -> float:
    """Mean over non-isolated nodes of the fraction of edges leaving the node's community."""
    labels = np.asarray(labels)
    rows = np.repeat(np.arange(graph.num_nodes), graph.degrees)
    cross = np.bincount(rows, weights=labels[rows] != labels[graph.indices], minlength=graph.num_nodes)
    deg = graph.degrees
    mask = deg > 0
    return float((cross[mask] / deg[mask]).mean())
