"""Pure numpy versions of the hot kernels.

Every function here has a compiled twin in ``_kernels.pyx`` with the same
signature and semantics; ``_backend`` picks one at import time.
"""
import numpy as np


def maximin_centroids(Zt, K, first):
    """Greedy farthest-point selection on unit rows of ``Zt`` (N x F).

    Returns the chosen row indices and, for every row, its largest cosine
    similarity to the chosen centroids.
    """
    idx = np.empty(K, dtype=np.int64)
    idx[0] = first
    best = Zt @ Zt[first]
    for k in range(1, K):
        j = int(np.argmin(best))
        idx[k] = j
        np.maximum(best, Zt @ Zt[j], out=best)
    return idx, best


def assign_nearest(Zt, C):
    """Index of the most similar centroid row of ``C`` for every row of ``Zt``."""
    return np.argmax(C @ Zt.T, axis=0).astype(np.int64)


def hals_sweep(X, G, B):
    """One in-place HALS pass over the columns of ``X`` (n x K).

    Minimizes ``0.5 tr(X G X^T) - tr(X^T B)`` over ``X >= 0`` one column at a
    time; columns with ``G[k, k] == 0`` are left untouched.
    """
    K = X.shape[1]
    for k in range(K):
        gkk = G[k, k]
        if gkk <= 0:
            continue
        step = (B[:, k] - X @ G[:, k]) / gkk
        np.maximum(X[:, k] + step, 0.0, out=X[:, k])
    return X


def qp_inner(X, mu, rho, u0, L, max_iter, tol):
    """Accelerated projected gradient for one augmented-Lagrangian subproblem.

    Minimizes over ``u >= 0``::

        0.5 ||u||^2 + 1/(2 rho) * sum_m max(0, mu_m - rho (x_m . u - 1))^2

    where ``x_m`` are the rows of ``X`` (M x F). Uses FISTA with
    gradient-based restart and step ``1 / L``.
    """
    u = np.maximum(np.asarray(u0, dtype=np.float64), 0.0)
    y = u.copy()
    t = 1.0
    step = 1.0 / L
    for it in range(1, max_iter + 1):
        p = np.maximum(mu - rho * (X @ y - 1.0), 0.0)
        grad = y - X.T @ p
        u_new = np.maximum(y - step * grad, 0.0)
        diff = u_new - u
        dn = float(np.sqrt(diff @ diff))
        if float((y - u_new) @ diff) > 0:
            # momentum points uphill: restart
            t = 1.0
            y = u_new.copy()
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = u_new + ((t - 1.0) / t_new) * diff
            t = t_new
        u = u_new
        if dn <= tol * max(1.0, float(np.sqrt(u @ u))):
            return u, it
    return u, max_iter
