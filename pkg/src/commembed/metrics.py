"""Clustering agreement between a predicted partition and ground truth."""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass

import numpy as np
import scipy.sparse as sp

from .graph import GroundTruthCover, Partition
from .validation import check_cover, check_partition

logger = logging.getLogger(__name__)

NORMS = ("max", "geometric", "arithmetic")


@dataclass(frozen=True)
class EvalScores:
    nmi: float
    nmi_sqrt: float
    omega: float
    f1: float

    def as_dict(self) -> dict:
        return asdict(self)


def _as_partition(x) -> Partition:
    if isinstance(x, GroundTruthCover):
        if not x.is_disjoint:
            logger.warning("NMI on an overlapping cover: each node keeps its smallest community id")
        return x.to_partition()
    return check_partition(x)


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    return float(-(p * np.log(p)).sum())


def nmi(truth, pred, norm: str = "max") -> float:
    """Normalised mutual information of two disjoint partitions.

    ``norm="max"`` divides by ``max(H_truth, H_pred)``; ``"geometric"`` by
    ``sqrt(H_truth * H_pred)`` (the sqrt-NMI variant); ``"arithmetic"`` by
    their mean. Two single-cluster partitions score 1.
    """
    if norm not in NORMS:
        raise ValueError(f"norm must be one of {NORMS}")
    a = _as_partition(truth).labels
    b = _as_partition(pred).labels
    if len(a) != len(b):
        raise ValueError(f"partitions cover different node sets ({len(a)} vs {len(b)} nodes)")
    n = len(a)
    if n == 0:
        raise ValueError("empty partitions")
    pairs, joint = np.unique(np.stack([a, b]), axis=1, return_counts=True)
    ca = np.bincount(a)
    cb = np.bincount(b)
    # one-to-one contingency table: the partitions are equal up to relabelling
    if len(joint) == len(ca) == len(cb):
        return 1.0
    ha, hb = _entropy(ca, n), _entropy(cb, n)
    pij = joint / n
    mi = float(np.sum(pij * np.log(pij / (ca[pairs[0]] / n * (cb[pairs[1]] / n)))))
    mi = max(mi, 0.0)
    if norm == "max":
        denom = max(ha, hb)
    elif norm == "geometric":
        denom = np.sqrt(ha * hb)
    else:
        denom = 0.5 * (ha + hb)
    if denom == 0:
        return 0.0
    return float(min(mi / denom, 1.0))


def _membership(cover: GroundTruthCover) -> sp.csr_matrix:
    rows = np.concatenate([c for c in cover.communities]) if cover.communities else np.zeros(0, dtype=np.int64)
    cols = np.repeat(np.arange(cover.num_communities), cover.sizes)
    return sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(cover.num_nodes, cover.num_communities))


def _comembership(cover: GroundTruthCover) -> tuple[np.ndarray, np.ndarray]:
    """Keys ``i * n + j`` (i < j) of node pairs sharing >= 1 community, with the shared count."""
    B = _membership(cover)
    C = sp.triu(B @ B.T, k=1).tocoo()
    keys = C.row.astype(np.int64) * cover.num_nodes + C.col
    order = np.argsort(keys)
    return keys[order], np.rint(C.data[order]).astype(np.int64)


def omega(truth, pred) -> float:
    """Omega index: chance-adjusted agreement of pairwise co-membership counts.

    ``Obs`` is the fraction of node pairs that share the same number of
    communities on both sides and ``Exp = sum_j t_j s_j / M^2`` with ``t_j``,
    ``s_j`` the number of pairs sharing ``j`` communities on each side.
    """
    t = check_cover(truth)
    s = check_cover(pred)
    if t.num_nodes != s.num_nodes:
        raise ValueError(f"covers span different node sets ({t.num_nodes} vs {s.num_nodes} nodes)")
    n = t.num_nodes
    M = n * (n - 1) // 2
    if M == 0:
        return 1.0
    tk, tv = _comembership(t)
    sk, sv = _comembership(s)
    common, ti, si = np.intersect1d(tk, sk, assume_unique=True, return_indices=True)
    agree_pos = int(np.sum(tv[ti] == sv[si]))
    agree_zero = M - (len(tk) + len(sk) - len(common))
    obs = (agree_pos + agree_zero) / M
    top = int(max(tv.max(initial=0), sv.max(initial=0)))
    th = np.bincount(tv, minlength=top + 1).astype(np.float64)
    sh = np.bincount(sv, minlength=top + 1).astype(np.float64)
    th[0] = M - len(tv)
    sh[0] = M - len(sv)
    exp = float(np.dot(th, sh)) / (float(M) * M)
    if exp == 1.0:
        return 1.0 if obs == 1.0 else 0.0
    return float((obs - exp) / (1.0 - exp))


def _directional_f1(inter: np.ndarray, size_x: np.ndarray, size_y: np.ndarray) -> float:
    f1 = 2.0 * inter / (size_x[:, None] + size_y[None, :])
    return float(f1.max(axis=1).mean())


def mean_f1(truth, pred) -> float:
    """Average of the two best-match F1 directions (truth->pred, pred->truth)."""
    t = check_cover(truth)
    s = check_cover(pred)
    if t.num_nodes != s.num_nodes:
        raise ValueError(f"covers span different node sets ({t.num_nodes} vs {s.num_nodes} nodes)")
    if t.num_communities == 0 or s.num_communities == 0:
        raise ValueError("both sides need at least one community")
    inter = (_membership(t).T @ _membership(s)).toarray()
    return 0.5 * (_directional_f1(inter, t.sizes, s.sizes) + _directional_f1(inter.T, s.sizes, t.sizes))


def evaluate(truth, pred) -> EvalScores:
    """All four scores. Nodes outside every ground-truth community are ignored."""
    cover = check_cover(truth)
    pred = check_partition(pred, cover.num_nodes)
    covered = cover.covered_nodes
    if len(covered) < cover.num_nodes:
        cover = cover.restrict(covered)
        pred = Partition.from_labels(pred.labels[covered])
    return EvalScores(
        nmi=nmi(cover, pred, "max"),
        nmi_sqrt=nmi(cover, pred, "geometric"),
        omega=omega(cover, pred),
        f1=mean_f1(cover, pred),
    )
