"""K-means with k-means++ seeding over node vectors."""
from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .graph import Partition
from .validation import check_vectors

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


def _mix(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def row_keys(X: np.ndarray) -> np.ndarray:
    """64-bit content hash of every row; identical rows share a key."""
    X = np.ascontiguousarray(X, dtype=np.float64)
    return np.array([int.from_bytes(hashlib.blake2b(row.tobytes(), digest_size=8).digest(), "little")
                     for row in X], dtype=np.uint64)


def _draw(keys: np.ndarray, *stream: int) -> np.ndarray:
    """Uniform (0, 1) draw per row for the given stream, independent of row order."""
    with np.errstate(over="ignore"):
        z = keys.copy()
        for s in stream:
            z = _mix(z ^ (_mix(np.uint64(s & 0xFFFFFFFFFFFFFFFF) + _GOLDEN)))
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) / 9007199254740992.0


def _sq_dist(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    d = (X * X).sum(1)[:, None] - 2.0 * X @ C.T + (C * C).sum(1)[None, :]
    return np.maximum(d, 0.0)


def kmeans_plusplus(X: np.ndarray, k: int, keys: np.ndarray, seed: int, restart: int) -> np.ndarray:
    """D^2 seeding as an exponential race: pick ``argmin E_i / D_i^2`` with ``E_i ~ Exp(1)``.

    The minimiser is distributed exactly as D^2 sampling, and since the
    exponentials are keyed by row content the choice does not depend on row
    order.
    """
    idx = [int(np.argmax(_draw(keys, seed, restart, 0)))]
    closest = _sq_dist(X, X[idx])[:, 0]
    for r in range(1, k):
        e = -np.log(_draw(keys, seed, restart, r))
        with np.errstate(divide="ignore"):
            score = np.where(closest > 0, e / closest, np.inf)
        if np.all(np.isinf(score)):
            # fewer distinct points than k; any repeat is as good as another
            i = int(np.argmin(e))
        else:
            i = int(np.argmin(score))
        idx.append(i)
        closest = np.minimum(closest, _sq_dist(X, X[i:i + 1])[:, 0])
    return X[idx].copy()


@dataclass(frozen=True)
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    wcss: float
    n_iter: int
    history: tuple[float, ...]
    restart: int


def _lloyd(X, centers, keys, max_iter, tol):
    k = len(centers)
    history = []
    labels = np.argmin(_sq_dist(X, centers), axis=1)
    it = 0
    for it in range(1, max_iter + 1):
        new = np.empty_like(centers)
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j]:
                new[j] = X[labels == j].mean(axis=0)
            else:
                new[j] = centers[j]
        # reseed empty clusters with the point farthest from its own centroid
        for j in np.flatnonzero(counts == 0):
            cost = ((X - new[labels]) ** 2).sum(1)
            far = np.flatnonzero(cost == cost.max())
            i = int(far[np.argmax(keys[far])])
            if cost[i] == 0:
                break
            old = labels[i]
            new[j] = X[i]
            labels[i] = j
            counts[old] -= 1
            counts[j] = 1
            if counts[old]:
                new[old] = X[labels == old].mean(axis=0)
        shift = np.sqrt(((new - centers) ** 2).sum(1)).max()
        centers = new
        history.append(float(((X - centers[labels]) ** 2).sum()))
        new_labels = np.argmin(_sq_dist(X, centers), axis=1)
        # never move a point unless it strictly improves (keeps WCSS monotone under float noise)
        d_new = ((X - centers[new_labels]) ** 2).sum(1)
        d_old = ((X - centers[labels]) ** 2).sum(1)
        labels = np.where(d_new < d_old, new_labels, labels)
        if shift < tol:
            break
    wcss = float(((X - centers[labels]) ** 2).sum())
    history.append(wcss)
    return labels, centers, wcss, it, history


def kmeans(X, k: int, max_iter: int = 300, tol: float = 1e-6, seed: int = 0, restarts: int = 10,
           normalize: str = "none") -> KMeansResult:
    """Best-of-``restarts`` Lloyd iterations from k-means++ seeds.

    Labels are the centroid indices, so permuting the rows of ``X`` permutes
    the labels identically. Ties in WCSS go to the lowest restart index.
    """
    X = check_vectors(X)
    n = len(X)
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in [1, {n}], got {k}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if normalize == "l2":
        norms = np.linalg.norm(X, axis=1, keepdims=True)
        X = X / np.where(norms > 0, norms, 1.0)
    elif normalize != "none":
        raise ValueError("normalize must be 'none' or 'l2'")
    keys = row_keys(X)
    # work in content-hash order so float sums do not depend on input order
    order = np.argsort(keys, kind="stable")
    Xs, ks = X[order], keys[order]
    best = None
    for r in range(restarts):
        centers = kmeans_plusplus(Xs, k, ks, seed, r)
        labels, centers, wcss, n_iter, history = _lloyd(Xs, centers, ks, max_iter, tol)
        if best is None or wcss < best[2]:
            best = (labels, centers, wcss, n_iter, tuple(history), r)
    labels = np.empty(n, dtype=np.int64)
    labels[order] = best[0]
    return KMeansResult(labels, *best[1:])


def kmeans_partition(X, k: int, **kwargs) -> Partition:
    """K-means labels as a :class:`Partition` (ids compacted in centroid order)."""
    labels = kmeans(X, k, **kwargs).labels
    _, compact = np.unique(labels, return_inverse=True)
    return Partition(compact.astype(np.int64))


class KMeans(ClusterMixin, BaseEstimator):
    def __init__(self, n_clusters=8, max_iter=300, tol=1e-6, restarts=10, seed=0, normalize="none"):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.tol = tol
        self.restarts = restarts
        self.seed = seed
        self.normalize = normalize

    def fit(self, X, y=None):
        res = kmeans(X, self.n_clusters, max_iter=self.max_iter, tol=self.tol, seed=self.seed,
                     restarts=self.restarts, normalize=self.normalize)
        self.labels_ = res.labels
        self.cluster_centers_ = res.centers
        self.inertia_ = res.wcss
        self.n_iter_ = res.n_iter
        self.wcss_history_ = res.history
        return self

    def predict(self, X):
        check_is_fitted(self, "cluster_centers_")
        X = check_vectors(X)
        if self.normalize == "l2":
            norms = np.linalg.norm(X, axis=1, keepdims=True)
            X = X / np.where(norms > 0, norms, 1.0)
        return np.argmin(_sq_dist(X, self.cluster_centers_), axis=1)
