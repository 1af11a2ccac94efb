"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package's own algorithms; inputs are plain Python
lists / dense numpy arrays.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


def modularity_double_sum(adj: np.ndarray, labels) -> float:
    """Q = 1/2m sum_vw [A_vw - k_v k_w / 2m] delta(c_v, c_w), looping over all node pairs."""
    n = len(labels)
    k = adj.sum(axis=1)
    two_m = k.sum()
    total = 0.0
    for v in range(n):
        for w in range(n):
            if labels[v] == labels[w]:
                total += adj[v, w] - k[v] * k[w] / two_m
    return total / two_m


def contingency_nmi(a, b, norm: str) -> float:
    """NMI from an explicit C x P table of set intersections."""
    n = len(a)
    ca = [set(i for i in range(n) if a[i] == x) for x in sorted(set(a))]
    cb = [set(i for i in range(n) if b[i] == y) for y in sorted(set(b))]

    def h(parts):
        return -sum(len(p) / n * math.log(len(p) / n) for p in parts)

    mi = 0.0
    for x in ca:
        for y in cb:
            nxy = len(x & y)
            if nxy:
                mi += nxy / n * math.log(n * nxy / (len(x) * len(y)))
    ha, hb = h(ca), h(cb)
    if ha == 0 and hb == 0:
        return 1.0
    denom = max(ha, hb) if norm == "max" else math.sqrt(ha * hb)
    return 0.0 if denom == 0 else mi / denom


def omega_all_pairs(cover_a: list[set], cover_b: list[set], n: int) -> float:
    """Omega index by enumerating every unordered node pair."""
    def shared(cover, u, v):
        return sum(1 for c in cover if u in c and v in c)

    pairs = list(itertools.combinations(range(n), 2))
    m = len(pairs)
    ta = [shared(cover_a, u, v) for u, v in pairs]
    tb = [shared(cover_b, u, v) for u, v in pairs]
    obs = sum(x == y for x, y in zip(ta, tb)) / m
    top = max(ta + tb)
    exp = sum(ta.count(j) * tb.count(j) for j in range(top + 1)) / (m * m)
    if exp == 1:
        return 1.0
    return (obs - exp) / (1 - exp)


def best_match_f1(cover_a: list[set], cover_b: list[set]) -> float:
    def f1(x, y):
        inter = len(x & y)
        if inter == 0:
            return 0.0
        prec, rec = inter / len(y), inter / len(x)
        return 2 * prec * rec / (prec + rec)

    fa = sum(max(f1(x, y) for y in cover_b) for x in cover_a) / len(cover_a)
    fb = sum(max(f1(y, x) for x in cover_a) for y in cover_b) / len(cover_b)
    return 0.5 * (fa + fb)


def labels_to_sets(labels) -> list[set]:
    groups: dict = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, set()).add(i)
    return list(groups.values())


def dense_leading_eigenpair(adj: np.ndarray):
    vals, vecs = np.linalg.eigh(adj)
    psi = vecs[:, -1]
    psi = psi if psi.sum() > 0 else -psi
    return vals[-1], psi / np.linalg.norm(psi)


def merw_matrix_dense(adj: np.ndarray) -> np.ndarray:
    """P_uv = A_uv psi_v / (lam psi_u) from a dense eigendecomposition."""
    lam, psi = dense_leading_eigenpair(adj)
    return adj * psi[None, :] / (lam * psi[:, None])


def random_regular_adj(rng, n: int, k: int) -> np.ndarray:
    """Random k-regular simple graph by repeated configuration-model sampling."""
    while True:
        stubs = rng.permutation(np.repeat(np.arange(n), k))
        pairs = stubs.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        key = np.sort(pairs, axis=1)
        if len(np.unique(key, axis=0)) != len(key):
            continue
        adj = np.zeros((n, n))
        adj[key[:, 0], key[:, 1]] = 1
        adj[key[:, 1], key[:, 0]] = 1
        return adj


def is_connected_dense(adj: np.ndarray) -> bool:
    n = len(adj)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in np.flatnonzero(adj[u]):
            if v not in seen:
                seen.add(int(v))
                stack.append(int(v))
    return len(seen) == n


def sgns_loss(u: np.ndarray, v: np.ndarray, label: int, weight: float) -> float:
    s = float(u @ v)
    log_sig = -math.log1p(math.exp(-s)) if s >= 0 else s - math.log1p(math.exp(s))
    log_sig_neg = -math.log1p(math.exp(s)) if s <= 0 else -s - math.log1p(math.exp(-s))
    return -weight * (label * log_sig + (1 - label) * log_sig_neg)
