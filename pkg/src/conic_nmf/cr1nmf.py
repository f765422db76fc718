"""Clustering followed by a rank-one nonnegative factorization per cluster,
and the closed-form error bounds for data drawn from circular cones.
"""
from dataclasses import dataclass, field

import numpy as np

from .cluster import greedy_cluster
from .errors import InputError
from .linalg import as_matrix, rank_one_svd

__all__ = [
    "FactorPair",
    "factorize",
    "f_alpha",
    "g_alpha",
    "deterministic_bound",
    "probabilistic_bound",
]


@dataclass
class FactorPair:
    """Nonnegative factors ``W`` (F x K), ``H`` (K x N) and their relative error."""

    W: np.ndarray
    H: np.ndarray
    relative_error: float
    info: dict = field(default_factory=dict, repr=False)


def factorize(V, K, tol=1e-10, max_iter=1000, first=0, rng=None, backend=None):
    """Cluster the columns of ``V`` and fit a rank-one NMF to each cluster.

    Parameters
    ----------
    V : (F, N) array_like
        Nonnegative matrix without zero columns.
    K : int
        Number of clusters.
    tol, max_iter
        Power iteration settings, see :func:`rank_one_svd`.
    first, rng, backend
        Passed to :func:`greedy_cluster`.

    Returns
    -------
    pair : FactorPair
        ``H`` has at most one nonzero per column. ``pair.info`` holds the
        per-cluster leading singular values and sizes.
    partition : Partition

    Notes
    -----
    Empty clusters give a zero column of ``W`` and a zero row of ``H``.
    The relative error is evaluated directly from the factors, one block per
    cluster, which costs ``O(F N)``.
    """
    A = as_matrix(V, "V")
    F, N = A.shape
    part = greedy_cluster(A, K, first=first, rng=rng, backend=backend)
    K = part.K
    W = np.zeros((F, K))
    H = np.zeros((K, N))
    sigmas = np.zeros(K)
    sq_err = 0.0
    for k, idx in enumerate(part.sets):
        if idx.size == 0:
            continue
        Vk = A[:, idx]
        t = rank_one_svd(Vk, tol=tol, max_iter=max_iter)
        w = t.sigma * np.abs(t.u)
        h = np.abs(t.v)
        W[:, k] = w
        H[k, idx] = h
        sigmas[k] = t.sigma
        sq_err += float(np.sum((Vk - np.outer(w, h)) ** 2))
    vnorm = float(np.linalg.norm(A))
    rel = np.sqrt(sq_err) / vnorm if vnorm > 0 else 0.0
    info = {
        "sigmas": sigmas,
        "sizes": part.sizes,
        "empty_clusters": part.empty_clusters,
    }
    return FactorPair(W=W, H=H, relative_error=float(rel), info=info), part


def f_alpha(alpha):
    """``1/2 - sin(2 alpha) / (4 alpha)``, the mean of ``sin^2`` of a uniform
    angle on ``[0, alpha]``; zero at ``alpha = 0``.
    """
    a = np.asarray(alpha, dtype=np.float64)
    if np.any((a < 0) | (a > np.pi / 2)):
        raise InputError("alpha must lie in [0, pi/2]")
    safe = np.where(a > 0, a, 1.0)
    # series near zero avoids cancellation: f = a^2/3 - a^4/15 + 2 a^6/315 - ...
    a2 = a * a
    series = a2 * (1.0 / 3.0 - a2 * (1.0 / 15.0 - a2 * 2.0 / 315.0))
    val = np.where(a < 1e-2, series, 0.5 - np.sin(2.0 * safe) / (4.0 * safe))
    return float(val) if val.ndim == 0 else val


def g_alpha(alpha):
    """``1 - f_alpha(alpha)``, the mean of ``cos^2`` of a uniform angle."""
    return 1.0 - f_alpha(alpha)


def deterministic_bound(alphas):
    """Worst-case relative error bound ``max_k sin(alpha_k)``."""
    a = np.atleast_1d(np.asarray(alphas, dtype=np.float64))
    if a.size == 0:
        raise InputError("need at least one angle")
    if np.any((a < 0) | (a >= np.pi / 2)):
        raise InputError("angles must lie in [0, pi/2)")
    return float(np.max(np.sin(a)))


def probabilistic_bound(alphas, lambdas):
    """Large-sample relative error ``sqrt(sum f(a_k)/l_k / sum 1/l_k)``.

    ``lambdas`` are the exponential rates of the squared column lengths.
    """
    a = np.atleast_1d(np.asarray(alphas, dtype=np.float64))
    lam = np.atleast_1d(np.asarray(lambdas, dtype=np.float64))
    if a.shape != lam.shape:
        raise InputError(f"got {a.size} angles and {lam.size} rates")
    if np.any(lam <= 0):
        raise InputError("rates must be positive")
    inv = 1.0 / lam
    return float(np.sqrt(np.sum(np.atleast_1d(f_alpha(a)) * inv) / np.sum(inv)))
