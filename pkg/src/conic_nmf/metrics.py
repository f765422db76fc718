"""Factorization error and clustering agreement scores."""
import numpy as np

from .errors import InputError, ShapeMismatch
from .linalg import as_matrix

__all__ = [
    "relative_error",
    "contingency",
    "nmi",
    "dice",
    "purity",
    "partition_match",
]


def relative_error(V, W, H):
    """``||V - W H||_F / ||V||_F``."""
    A = as_matrix(V, "V")
    W = as_matrix(W, "W")
    H = as_matrix(H, "H")
    if W.shape[0] != A.shape[0] or H.shape[1] != A.shape[1] or W.shape[1] != H.shape[0]:
        raise ShapeMismatch(f"V {A.shape}, W {W.shape}, H {H.shape} do not conform")
    vn = np.linalg.norm(A)
    if vn == 0:
        raise InputError("V is the zero matrix")
    return float(np.linalg.norm(A - W @ H) / vn)


def contingency(a, b):
    """Contingency table of two labelings; rows follow ``a``, columns ``b``."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise ShapeMismatch(f"labelings have lengths {a.size} and {b.size}")
    if a.size == 0:
        raise InputError("labelings are empty")
    _, ia = np.unique(a, return_inverse=True)
    _, ib = np.unique(b, return_inverse=True)
    T = np.zeros((ia.max() + 1, ib.max() + 1), dtype=np.int64)
    np.add.at(T, (ia, ib), 1)
    return T


def _entropy(p):
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def nmi(labels_a, labels_b):
    """Normalized mutual information ``I(A; B) / sqrt(H(A) H(B))``.

    If either labeling has a single cluster the score is 1 when both have a
    single cluster and 0 otherwise.
    """
    T = contingency(labels_a, labels_b)
    n = T.sum()
    pa = T.sum(axis=1) / n
    pb = T.sum(axis=0) / n
    ha, hb = _entropy(pa), _entropy(pb)
    if ha == 0 or hb == 0:
        return 1.0 if ha == hb == 0 else 0.0
    P = T / n
    nz = P > 0
    mi = float(np.sum(P[nz] * np.log(P[nz] / np.outer(pa, pb)[nz])))
    return float(min(1.0, max(0.0, mi / np.sqrt(ha * hb))))


def _pairs(x):
    return x * (x - 1) // 2


def dice(labels_a, labels_b):
    """Pair-counting Dice coefficient ``2 SS / (2 SS + SD + DS)``.

    ``SS`` counts pairs grouped together by both labelings, ``SD`` and ``DS``
    pairs grouped together by only one of them. Returns 1 when no pair is
    grouped together by either labeling.
    """
    T = contingency(labels_a, labels_b)
    ss = int(_pairs(T).sum())
    same_a = int(_pairs(T.sum(axis=1)).sum())
    same_b = int(_pairs(T.sum(axis=0)).sum())
    denom = same_a + same_b  # = 2 SS + SD + DS
    return 1.0 if denom == 0 else 2.0 * ss / denom


def purity(pred_labels, true_labels):
    """Fraction of points whose predicted cluster's majority class is their class."""
    T = contingency(pred_labels, true_labels)
    return float(T.max(axis=1).sum() / T.sum())


def partition_match(pred, true_labels):
    """Whether two partitions agree up to renaming the clusters.

    ``pred`` is a label array or any object with a ``labels`` attribute.
    Empty predicted clusters are ignored.
    """
    pred = getattr(pred, "labels", pred)
    T = contingency(pred, true_labels)
    # a bijection exists iff every row and every column has one nonzero
    return bool(np.all((T > 0).sum(axis=1) == 1) and np.all((T > 0).sum(axis=0) == 1))
