"""Greedy maximin clustering of column directions.

Columns are normalized; the first centroid is a fixed (or seeded random)
column, every further centroid is the column whose largest cosine similarity
to the centroids chosen so far is smallest, and each column joins its most
similar centroid. When the data lie in well separated circular cones this
recovers the cones exactly.
"""
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from .errors import InputError, KExceedsN
from .linalg import as_matrix, normalize_columns

__all__ = ["Partition", "greedy_cluster"]


@dataclass(frozen=True)
class Partition:
    """Assignment of ``N`` columns to ``K`` clusters.

    Attributes
    ----------
    labels : (N,) int ndarray
        Zero-based cluster index of every column.
    centroid_indices : (K,) int ndarray
        Column chosen as centroid of each cluster.
    centroids : (F, K) ndarray
        The normalized centroid columns.
    """

    labels: np.ndarray
    centroid_indices: np.ndarray
    centroids: np.ndarray

    @property
    def K(self):
        return self.centroid_indices.size

    @property
    def sets(self):
        """List of ``K`` sorted index arrays, one per cluster."""
        order = np.argsort(self.labels, kind="stable")
        bounds = np.searchsorted(self.labels[order], np.arange(self.K + 1))
        return [order[bounds[k]:bounds[k + 1]] for k in range(self.K)]

    @property
    def sizes(self):
        return np.bincount(self.labels, minlength=self.K)

    @property
    def empty_clusters(self):
        return np.flatnonzero(self.sizes == 0)


def greedy_cluster(V, K, first=0, rng=None, backend=None):
    """Cluster the columns of ``V`` into ``K`` groups by direction.

    Parameters
    ----------
    V : (F, N) array_like
        Matrix without zero columns.
    K : int
        Number of clusters, ``1 <= K <= N``.
    first : int or "random"
        Index of the first centroid. ``"random"`` draws it from ``rng``.
    rng : numpy.random.Generator, optional
        Used only when ``first == "random"``.
    backend : {None, "python", "compiled"}
        Kernel implementation; the active one by default.

    Returns
    -------
    Partition

    Raises
    ------
    ZeroColumn
        If a column of ``V`` is zero.
    KExceedsN
        If ``K > N``.

    Notes
    -----
    The running maximum similarity of every column is cached, so the
    selection costs ``O(K F N)``. Ties are broken toward the lowest index.
    Clusters can come out empty when the columns do not have ``K`` distinct
    directions; this is reported through ``Partition.empty_clusters``.
    """
    A = as_matrix(V, "V")
    N = A.shape[1]
    K = int(K)
    if K < 1:
        raise InputError("K must be at least 1")
    if K > N:
        raise KExceedsN(f"K={K} exceeds the number of columns N={N}")
    Z, _ = normalize_columns(A)
    if isinstance(first, str):
        if first != "random":
            raise InputError(f"unknown first-centroid rule {first!r}")
        rng = np.random.default_rng() if rng is None else rng
        first = int(rng.integers(N))
    first = int(first)
    if not 0 <= first < N:
        raise InputError(f"first centroid index {first} out of range")

    kern = get_kernels(backend)
    Zt = np.ascontiguousarray(Z.T)
    idx, _ = kern.maximin_centroids(Zt, K, first)
    C = np.ascontiguousarray(Zt[idx])
    labels = kern.assign_nearest(Zt, C)
    return Partition(labels=labels, centroid_indices=idx, centroids=C.T.copy())
