"""Classical NMF solvers and initializers used for comparison.

Solvers minimize ``||V - W H||_F`` over nonnegative ``W`` (F x K) and ``H``
(K x N):

* ``mult``: Lee-Seung multiplicative updates;
* ``hals``: hierarchical alternating least squares, one column at a time.

Initializers return ``(W0, H0)``: ``rand``, ``spkm`` (spherical k-means
centroids), ``nndsvd`` and ``cr1`` (cluster-then-rank-one factors with a small
perturbation of ``H``).
"""
import time
from dataclasses import dataclass

import numpy as np

from ._backend import get_kernels
from .cr1nmf import FactorPair, factorize
from .errors import InputError, KTooLarge, ShapeMismatch
from .linalg import as_matrix, normalize_columns

__all__ = [
    "SolverTrace",
    "mult_run",
    "hals_run",
    "random_init",
    "spkm",
    "spkm_init",
    "nndsvd_init",
    "cr1nmf_init",
    "SOLVERS",
    "INITIALIZERS",
    "initialize",
]

EPS_GUARD = 1e-16


@dataclass
class SolverTrace:
    """Per-iteration history of a solver run.

    ``errors[0]`` and ``times[0] == 0`` describe the starting point; entry
    ``i`` is recorded after iteration ``i``. Times are cumulative seconds.
    """

    errors: np.ndarray
    times: np.ndarray
    iterations: int

    def time_to_reach(self, target):
        """First cumulative time at which the error is ``<= target``, else ``inf``."""
        hit = np.flatnonzero(self.errors <= target)
        return float(self.times[hit[0]]) if hit.size else np.inf


def _check(V, W0, H0):
    A = as_matrix(V, "V")
    W = np.array(W0, dtype=np.float64)
    H = np.array(H0, dtype=np.float64)
    if W.ndim != 2 or H.ndim != 2:
        raise ShapeMismatch("W0 and H0 must be 2-D")
    F, N = A.shape
    if W.shape[0] != F or H.shape[1] != N or W.shape[1] != H.shape[0]:
        raise ShapeMismatch(
            f"V is {F}x{N} but W0 is {W.shape[0]}x{W.shape[1]} "
            f"and H0 is {H.shape[0]}x{H.shape[1]}"
        )
    if np.any(W < 0) or np.any(H < 0):
        raise InputError("initial factors must be nonnegative")
    return A, W, H


def _fast_error(vv, W, VHt, HHt):
    # ||V - WH||^2 = ||V||^2 - 2 <W, V H^T> + <W^T W, H H^T>
    sq = vv - 2.0 * float(np.sum(W * VHt)) + float(np.sum((W.T @ W) * HHt))
    return np.sqrt(max(sq, 0.0))


def _run(update, A, W, H, iters, error, target, max_time):
    if iters < 0:
        raise InputError("iters must be nonnegative")
    if error not in ("fast", "exact"):
        raise InputError(f"unknown error mode {error!r}")
    vv = float(np.sum(A * A))
    vnorm = np.sqrt(vv)
    if vnorm == 0:
        raise InputError("V is the zero matrix")

    def measure(VHt, HHt):
        if error == "exact":
            return float(np.linalg.norm(A - W @ H)) / vnorm
        return _fast_error(vv, W, VHt, HHt) / vnorm

    errors = [measure(A @ H.T, H @ H.T)]
    times = [0.0]
    elapsed = 0.0
    it = 0
    while it < iters:
        if target is not None and errors[-1] <= target:
            break
        if max_time is not None and elapsed >= max_time:
            break
        t0 = time.perf_counter()
        VHt, HHt = update(A, W, H)
        elapsed += time.perf_counter() - t0
        it += 1
        errors.append(measure(VHt, HHt))
        times.append(elapsed)
    trace = SolverTrace(np.array(errors), np.array(times), it)
    return FactorPair(W=W, H=H, relative_error=errors[-1]), trace


def mult_run(V, W0, H0, iters, eps=EPS_GUARD, mask_zeros=False, error="fast",
             target=None, max_time=None):
    """Multiplicative updates for the Frobenius objective.

    Each iteration applies ``H <- H * (W^T V) / (W^T W H + eps)`` and then
    ``W <- W * (V H^T) / (W H H^T + eps)``.

    Parameters
    ----------
    V : (F, N) array_like
    W0 : (F, K) array_like
    H0 : (K, N) array_like
        Nonnegative starting factors; copied.
    iters : int
        Maximum number of iterations.
    eps : float
        Denominator guard.
    mask_zeros : bool
        Drop the guard and leave entries with a zero denominator unchanged,
        so exact fixed points stay exactly fixed.
    error : {"fast", "exact"}
        ``"fast"`` evaluates the error from Gram products already at hand;
        ``"exact"`` forms ``V - W H``.
    target : float, optional
        Stop once the relative error is ``<= target``.
    max_time : float, optional
        Stop once the cumulative update time exceeds this many seconds.

    Returns
    -------
    FactorPair, SolverTrace

    Raises
    ------
    ShapeMismatch
        If the factor shapes do not conform with ``V``.
    """
    A, W, H = _check(V, W0, H0)

    def ratio(num, den, X):
        if mask_zeros:
            pos = den > 0
            X[pos] *= num[pos] / den[pos]
        else:
            X *= num / (den + eps)

    def update(A, W, H):
        WtW = W.T @ W
        ratio(W.T @ A, WtW @ H, H)
        VHt = A @ H.T
        HHt = H @ H.T
        ratio(VHt, W @ HHt, W)
        return VHt, HHt

    return _run(update, A, W, H, iters, error, target, max_time)


def hals_run(V, W0, H0, iters, error="fast", target=None, max_time=None,
             backend=None):
    """Hierarchical alternating least squares.

    Each iteration sweeps the rows of ``H`` and then the columns of ``W``,
    replacing each by its closed-form nonnegative least-squares update with
    everything else fixed. Components whose Gram diagonal is zero are
    skipped. See :func:`mult_run` for the shared parameters.
    """
    A, W, H = _check(V, W0, H0)
    kern = get_kernels(backend)
    W = np.ascontiguousarray(W)
    Ht = np.ascontiguousarray(H.T)

    def update(A, W, H):
        kern.hals_sweep(Ht, np.ascontiguousarray(W.T @ W), np.ascontiguousarray(A.T @ W))
        H[...] = Ht.T
        VHt = np.ascontiguousarray(A @ Ht)
        HHt = np.ascontiguousarray(Ht.T @ Ht)
        kern.hals_sweep(W, HHt, VHt)
        return VHt, HHt

    return _run(update, A, W, H, iters, error, target, max_time)


def random_init(F, N, K, rng):
    """``W0`` and ``H0`` with i.i.d. Uniform(0, 1) entries."""
    return rng.random((F, K)), rng.random((K, N))


def spkm(V, K, iters=10, rng=None):
    """Spherical k-means on the column directions of ``V``.

    Centroids start at ``K`` distinct random columns. Each sweep assigns
    every column to its most similar centroid, then resets each centroid to
    the normalized sum of its members; a centroid with no members keeps its
    previous value.

    Returns
    -------
    centroids : (F, K) ndarray
        Unit-norm centroids.
    labels : (N,) int ndarray
    """
    Z, _ = normalize_columns(V)
    N = Z.shape[1]
    if not 1 <= K <= N:
        raise InputError(f"need 1 <= K <= N, got K={K}, N={N}")
    rng = np.random.default_rng() if rng is None else rng
    C = Z[:, rng.choice(N, size=K, replace=False)].copy()
    labels = np.zeros(N, dtype=np.int64)
    for _ in range(iters):
        labels = np.argmax(C.T @ Z, axis=0)
        S = np.zeros_like(C)
        np.add.at(S.T, labels, Z.T)
        norms = np.linalg.norm(S, axis=0)
        keep = norms > 0
        C[:, keep] = S[:, keep] / norms[keep]
    labels = np.argmax(C.T @ Z, axis=0)
    return C, labels


def spkm_init(V, K, iters=10, rng=None):
    """Spherical k-means centroids as ``W0`` and a uniform random ``H0``.

    Returns
    -------
    W0 : (F, K) ndarray
    H0 : (K, N) ndarray
    labels : (N,) int ndarray
    """
    rng = np.random.default_rng() if rng is None else rng
    C, labels = spkm(V, K, iters=iters, rng=rng)
    return C, rng.random((K, np.shape(V)[1])), labels


def nndsvd_init(V, K):
    """Deterministic SVD-based start (NNDSVD, zeros left in place).

    The leading singular pair gives the first component through absolute
    values. For every further pair ``(u, v)`` the positive parts and the
    negative parts are compared by ``||u+|| ||v+||`` against
    ``||u-|| ||v-||``; the larger pair, rescaled by the singular value,
    becomes the component.
    """
    A = as_matrix(V, "V")
    F, N = A.shape
    K = int(K)
    if not 1 <= K <= min(F, N):
        raise KTooLarge(f"K={K} must lie in [1, min(F, N)={min(F, N)}]")
    U, S, Vt = np.linalg.svd(A, full_matrices=False)
    W = np.zeros((F, K))
    H = np.zeros((K, N))
    W[:, 0] = np.sqrt(S[0]) * np.abs(U[:, 0])
    H[0] = np.sqrt(S[0]) * np.abs(Vt[0])
    for j in range(1, K):
        x, y = U[:, j], Vt[j]
        xp, xn = np.maximum(x, 0), np.maximum(-x, 0)
        yp, yn = np.maximum(y, 0), np.maximum(-y, 0)
        nxp, nyp = np.linalg.norm(xp), np.linalg.norm(yp)
        nxn, nyn = np.linalg.norm(xn), np.linalg.norm(yn)
        mp, mn = nxp * nyp, nxn * nyn
        if mp >= mn:
            a, b, nx, ny, m = xp, yp, nxp, nyp, mp
        else:
            a, b, nx, ny, m = xn, yn, nxn, nyn, mn
        if m == 0:
            continue
        scale = np.sqrt(S[j] * m)
        W[:, j] = scale * a / nx
        H[j] = scale * b / ny
    return W, H


def cr1nmf_init(V, K, eta=0.01, rng=None):
    """Cluster-then-rank-one factors with a perturbed ``H``.

    ``H0 = H* + eta * mean(H*) * U`` with ``U`` uniform on ``(0, 1)``. The
    unperturbed pair is a fixed point of the multiplicative updates, so some
    ``eta > 0`` is needed for them to make progress.
    """
    if eta < 0:
        raise InputError("eta must be nonnegative")
    pair, _ = factorize(V, K)
    H0 = pair.H
    if eta > 0:
        rng = np.random.default_rng() if rng is None else rng
        H0 = H0 + eta * float(H0.mean()) * rng.random(H0.shape)
    return pair.W, H0


SOLVERS = {"mult": mult_run, "hals": hals_run}


def _init_rand(V, K, rng):
    F, N = np.shape(V)
    return random_init(F, N, K, rng)


def _init_spkm(V, K, rng):
    W, H, _ = spkm_init(V, K, rng=rng)
    return W, H


INITIALIZERS = {
    "rand": _init_rand,
    "spkm": _init_spkm,
    "nndsvd": lambda V, K, rng: nndsvd_init(V, K),
    "cr1": lambda V, K, rng: cr1nmf_init(V, K, rng=rng),
}


def initialize(name, V, K, rng=None):
    """Run the initializer registered under ``name``."""
    try:
        fn = INITIALIZERS[name]
    except KeyError:
        raise InputError(f"unknown initializer {name!r}; choose from {sorted(INITIALIZERS)}") from None
    return fn(V, K, np.random.default_rng() if rng is None else rng)
