"""Number of cones from the largest gap between adjacent singular values."""
import numpy as np

from .errors import RangeInvalid, RankDeficient
from .linalg import as_matrix, normalize_columns, top_singular_values

__all__ = ["estimate_k", "default_k_range"]


def default_k_range(F, N):
    """``(2, min(min(F, N) // 2, 100))`` clipped to stay below ``min(F, N)``."""
    m = min(F, N)
    return 2, max(2, min(m // 2, 100, m - 1))


def estimate_k(V, k_min=None, k_max=None, normalize=False):
    """Estimate the number of cones as ``argmax_k sigma_k / sigma_{k+1}``.

    Parameters
    ----------
    V : (F, N) array_like
    k_min, k_max : int, optional
        Inclusive search range with ``1 < k_min <= k_max < min(F, N)``.
        Defaults from :func:`default_k_range`.
    normalize : bool
        Scale every column to unit norm first. This removes the influence of
        unequal column lengths across cones; zero columns are dropped.

    Returns
    -------
    k_hat : int
        Smallest maximizer of the ratio over the range.
    ratios : (k_max - k_min + 1,) ndarray
        ``sigma_k / sigma_{k+1}`` for each candidate ``k``; ``inf`` where
        ``sigma_{k+1} == 0``.

    Raises
    ------
    RangeInvalid
        If the range is empty or out of bounds.
    RankDeficient
        If ``sigma_{k_min} == 0``.

    Examples
    --------
    >>> estimate_k(np.diag([10.0, 9, 8, 0.1, 0.05]), 2, 4)[0]
    3
    """
    A = as_matrix(V, "V")
    if normalize:
        keep = np.linalg.norm(A, axis=0) > 0
        A, _ = normalize_columns(A[:, keep])
    F, N = A.shape
    d_min, d_max = default_k_range(F, N)
    k_min = d_min if k_min is None else int(k_min)
    k_max = d_max if k_max is None else int(k_max)
    if not 1 < k_min <= k_max < min(F, N):
        raise RangeInvalid(
            f"need 1 < k_min <= k_max < min(F, N) = {min(F, N)}, "
            f"got k_min={k_min}, k_max={k_max}"
        )
    s = top_singular_values(A, k_max + 1)
    if s[k_min - 1] == 0:
        raise RankDeficient(f"sigma_{k_min} is zero; the matrix has rank < {k_min}")
    num = s[k_min - 1:k_max]
    den = s[k_min:k_max + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 0, num / np.where(den > 0, den, 1.0),
                          np.where(num > 0, np.inf, 0.0))
    k_hat = k_min + int(np.argmax(ratios))
    return k_hat, ratios
