"""External clustering metrics: ACC, NMI, Purity, ARI, pairwise F-score
and Precision. All are computed from one contingency table and are
invariant under relabeling of either partition."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import LengthMismatch


@dataclass(frozen=True)
class ContingencyTable:
    """counts[i, j] = number of samples in predicted cluster i and true class j."""

    counts: np.ndarray
    n: int

    @property
    def pred_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def true_sizes(self) -> np.ndarray:
        return self.counts.sum(axis=0)


def contingency(pred, truth) -> ContingencyTable:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.size != truth.size:
        raise LengthMismatch(
            f"pred has {pred.size} labels, truth has {truth.size}"
        )
    if pred.size == 0:
        raise LengthMismatch("empty label vectors")
    _, pi = np.unique(pred, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    cp, ct = pi.max() + 1, ti.max() + 1
    counts = np.zeros((cp, ct), dtype=np.int64)
    np.add.at(counts, (pi, ti), 1)
    return ContingencyTable(counts=counts, n=pred.size)


def accuracy(pred, truth) -> float:
    """Best cluster-to-class matching rate, via optimal assignment on a
    square zero-padded contingency table."""
    ct = contingency(pred, truth)
    side = max(ct.counts.shape)
    padded = np.zeros((side, side), dtype=np.int64)
    padded[: ct.counts.shape[0], : ct.counts.shape[1]] = ct.counts
    rows, cols = linear_sum_assignment(-padded)
    return int(padded[rows, cols].sum()) / ct.n


def nmi(pred, truth) -> float:
    """Mutual information normalized by sqrt(H(pred) * H(truth)), natural
    logs. Both entropies zero means both partitions are the trivial single
    cluster, which are identical, so the score is 1."""
    ct = contingency(pred, truth)
    n = ct.n
    p_pred = ct.pred_sizes / n
    p_true = ct.true_sizes / n
    h_pred = -np.sum(p_pred * np.log(p_pred))
    h_true = -np.sum(p_true * np.log(p_true))
    if h_pred == 0.0 and h_true == 0.0:
        return 1.0
    if h_pred == 0.0 or h_true == 0.0:
        return 0.0
    nz = ct.counts > 0
    nij = ct.counts[nz].astype(np.float64)
    outer = np.outer(ct.pred_sizes, ct.true_sizes)[nz].astype(np.float64)
    mi = float(np.sum((nij / n) * np.log(n * nij / outer)))
    return float(min(max(mi / np.sqrt(h_pred * h_true), 0.0), 1.0))


def purity(pred, truth) -> float:
    """Fraction of samples in the majority class of their predicted cluster."""
    ct = contingency(pred, truth)
    return int(ct.counts.max(axis=1).sum()) / ct.n


def _comb2(x) -> int:
    x = int(x)
    return x * (x - 1) // 2


def pair_counts(ct: ContingencyTable) -> tuple[int, int, int, int]:
    """(TP, pairs co-clustered in pred, pairs co-clustered in truth, all pairs)."""
    tp = int(sum(_comb2(v) for v in ct.counts.ravel()))
    pred_pairs = int(sum(_comb2(v) for v in ct.pred_sizes))
    true_pairs = int(sum(_comb2(v) for v in ct.true_sizes))
    return tp, pred_pairs, true_pairs, _comb2(ct.n)


def ari(pred, truth) -> float:
    """Adjusted Rand index from contingency-table pair counts."""
    ct = contingency(pred, truth)
    tp, pred_pairs, true_pairs, total = pair_counts(ct)
    if pred_pairs == true_pairs and (pred_pairs == 0 or pred_pairs == total):
        # both partitions trivial in the same way, hence identical
        return 1.0
    expected = pred_pairs * true_pairs / total
    max_index = (pred_pairs + true_pairs) / 2
    return (tp - expected) / (max_index - expected)


def pairwise_f_precision(pred, truth) -> tuple[float, float]:
    """(F-score, precision) over unordered sample pairs; 0/0 counts as 0."""
    ct = contingency(pred, truth)
    tp, pred_pairs, true_pairs, _ = pair_counts(ct)
    precision = tp / pred_pairs if pred_pairs else 0.0
    recall = tp / true_pairs if true_pairs else 0.0
    f = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return f, precision


def evaluate_all(pred, truth) -> dict[str, float]:
    """The six standard metrics as one dict (insertion order fixed)."""
    f, prec = pairwise_f_precision(pred, truth)
    return {
        "acc": accuracy(pred, truth),
        "nmi": nmi(pred, truth),
        "purity": purity(pred, truth),
        "ari": ari(pred, truth),
        "f_score": f,
        "precision": prec,
    }
