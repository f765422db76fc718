"""Dense linear-algebra kernels shared by the rest of the package.

Matrices are plain 2-D ``numpy`` float arrays with shape ``(F, N)``: ``F``
features (rows) and ``N`` samples (columns).
"""
from dataclasses import dataclass

import numpy as np

from .errors import InputError, KTooLarge, NoConvergence, ZeroColumn

__all__ = [
    "RankOneTriple",
    "as_matrix",
    "frobenius_norm",
    "normalize_columns",
    "rank_one_svd",
    "rank_one_nmf",
    "top_singular_values",
    "householder_to",
    "householder_vector",
    "apply_householder",
]


@dataclass(frozen=True)
class RankOneTriple:
    """Leading singular triple ``sigma * u v^T`` of a matrix."""

    sigma: float
    u: np.ndarray
    v: np.ndarray
    iterations: int = 0


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float64 array (no copy when possible)."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise InputError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} contains non-finite entries")
    return A


def frobenius_norm(M):
    """Square root of the sum of squared entries."""
    return float(np.linalg.norm(np.asarray(M, dtype=np.float64)))


def normalize_columns(M):
    """Scale every column of ``M`` to unit Euclidean norm.

    Parameters
    ----------
    M : (F, N) array_like

    Returns
    -------
    Mn : (F, N) ndarray
        Column-normalized copy of ``M``.
    norms : (N,) ndarray
        Original column norms, so ``Mn * norms == M``.

    Raises
    ------
    ZeroColumn
        If some column is identically zero. The first such index is reported.
    """
    A = as_matrix(M)
    norms = np.linalg.norm(A, axis=0)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise ZeroColumn(zero[0])
    return A / norms, norms


def _start_vector(M, right):
    # Row/column sums are nonnegative for nonnegative M and almost never
    # orthogonal to the Perron vector.
    x = M.sum(axis=0) if right else M.sum(axis=1)
    nrm = np.linalg.norm(x)
    if nrm == 0:
        x = np.ones(M.shape[1] if right else M.shape[0])
        nrm = np.linalg.norm(x)
    return x / nrm


def rank_one_svd(M, tol=1e-10, max_iter=1000, x0=None):
    """Leading singular triple by power iteration on the smaller Gram operator.

    The iteration runs on ``M^T M`` when ``N <= F`` and on ``M M^T``
    otherwise, applied as two matrix-vector products per sweep; the Gram
    matrix itself is never formed. Iteration stops when the eigen-residual
    ``||G x - rho x||`` drops below ``tol * rho`` where ``rho`` is the current
    Rayleigh quotient. That bounds the singular value error by roughly
    ``tol**2`` and the vector error by ``tol / gap``.

    Parameters
    ----------
    M : (F, N) array_like
        Nonzero matrix.
    tol : float
        Relative residual tolerance, must be positive.
    max_iter : int
        Maximum number of sweeps.
    x0 : array_like, optional
        Start vector on the iterated side. Defaults to the normalized
        column-sum (``N <= F``) or row-sum vector.

    Returns
    -------
    RankOneTriple
        Signs are those produced by the iteration; for a nonnegative matrix
        and the default start vector both singular vectors are nonnegative.

    Raises
    ------
    NoConvergence
        If the tolerance is not met within ``max_iter`` sweeps, which happens
        when the two leading singular values are nearly equal.
    """
    A = as_matrix(M)
    if tol <= 0:
        raise InputError("tol must be positive")
    if max_iter < 1:
        raise InputError("max_iter must be at least 1")
    F, N = A.shape
    if F == 0 or N == 0 or not np.any(A):
        raise InputError("rank_one_svd needs a nonzero matrix")
    # unit max-entry scaling keeps the Gram products clear of under/overflow
    scale = float(np.max(np.abs(A)))
    A = A / scale

    right = N <= F
    if right:
        def gram(x):
            return A.T @ (A @ x)
    else:
        def gram(x):
            return A @ (A.T @ x)

    if x0 is None:
        x = _start_vector(A, right)
    else:
        x = np.asarray(x0, dtype=np.float64).ravel()
        x = x / np.linalg.norm(x)

    y = gram(x)
    if not np.any(y):
        # start vector in the null space; retry from a fixed pseudo-random one
        x = np.random.default_rng(0).random(x.size) + 0.5
        x /= np.linalg.norm(x)
        y = gram(x)

    res = np.inf
    for it in range(1, max_iter + 1):
        rho = float(x @ y)
        res = float(np.linalg.norm(y - rho * x))
        ynorm = np.linalg.norm(y)
        x = y / ynorm
        if res <= tol * rho:
            # the step just taken is free and sharpens the vector further
            break
        y = gram(x)
    else:
        raise NoConvergence(
            f"power iteration did not converge in {max_iter} sweeps "
            f"(relative residual {res / max(rho, 1e-300):.3e})",
            iterations=max_iter,
            residual=res,
        )

    if right:
        v = x
        Mv = A @ v
        sigma = float(np.linalg.norm(Mv))
        u = Mv / sigma
    else:
        u = x
        Mu = A.T @ u
        sigma = float(np.linalg.norm(Mu))
        v = Mu / sigma
    return RankOneTriple(sigma=sigma * scale, u=u, v=v, iterations=it)


def rank_one_nmf(M, tol=1e-10, max_iter=1000):
    """Best nonnegative rank-one approximation ``w h^T`` of a nonnegative matrix.

    Takes the leading singular triple and returns ``w = sigma * |u|`` and
    ``h = |v|``. For nonnegative ``M`` the squared approximation error equals
    ``||M||_F**2 - sigma**2``.

    Returns
    -------
    w : (F,) ndarray
    h : (N,) ndarray
    """
    t = rank_one_svd(M, tol=tol, max_iter=max_iter)
    return t.sigma * np.abs(t.u), np.abs(t.v)


def top_singular_values(M, k):
    """The ``k`` largest singular values of ``M``, in nonincreasing order.

    Computed from a dense symmetric eigendecomposition of the smaller Gram
    matrix. Eigenvalues below ``max(F, N) * eps * lambda_max`` are treated as
    exact zeros, so a rank-``r`` matrix reports exact zeros past index ``r``.
    """
    A = as_matrix(M)
    F, N = A.shape
    if k < 1:
        raise InputError("k must be at least 1")
    if k > min(F, N):
        raise KTooLarge(f"k={k} exceeds min(F, N)={min(F, N)}")
    scale = float(np.max(np.abs(A))) if A.size else 0.0
    if scale == 0:
        return np.zeros(k)
    A = A / scale
    G = A.T @ A if N <= F else A @ A.T
    ev = np.linalg.eigvalsh(G)[::-1][:k]
    cutoff = max(F, N) * np.finfo(np.float64).eps * max(ev[0], 0.0)
    ev = np.where(ev > cutoff, ev, 0.0)
    return scale * np.sqrt(ev)


def householder_vector(u, f=0):
    """Unit vector ``z`` with ``(I - 2 z z^T) e_f = u``, or ``None`` if ``u == e_f``.

    ``1 - u[f]`` is evaluated as ``sum_{i != f} u_i**2 / (1 + u[f])`` so the
    reflection stays accurate when ``u`` is close to ``e_f``.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    rest = np.delete(u, f)
    tail = float(rest @ rest)
    if tail == 0.0 and u[f] > 0:
        return None
    d = -u.copy()
    d[f] = tail / (1.0 + u[f]) if u[f] >= 0 else 1.0 - u[f]
    return d / np.linalg.norm(d)


def householder_to(u, f=0):
    """Householder reflection mapping the coordinate vector ``e_f`` onto ``u``.

    Parameters
    ----------
    u : (F,) array_like
        Unit vector.
    f : int
        Zero-based coordinate index of the source axis.

    Returns
    -------
    P : (F, F) ndarray
        Symmetric orthogonal matrix ``I - 2 z z^T`` with
        ``z = (e_f - u) / ||e_f - u||``; the identity when ``u == e_f``.
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    if abs(np.linalg.norm(u) - 1.0) > 1e-10:
        raise InputError("householder_to needs a unit vector")
    P = np.eye(u.size)
    z = householder_vector(u, f)
    if z is not None:
        P -= 2.0 * np.outer(z, z)
    return P


def apply_householder(z, X):
    """Apply ``I - 2 z z^T`` to the columns of ``X`` without forming the matrix."""
    if z is None:
        return np.array(X, dtype=np.float64, copy=True)
    X = np.asarray(X, dtype=np.float64)
    return X - 2.0 * np.outer(z, z @ X) if X.ndim == 2 else X - 2.0 * z * (z @ X)
