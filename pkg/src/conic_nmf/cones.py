"""Circular cones: membership, the separation check used by the clustering
step, orthant containment and the smallest cone enclosing a point set.

A circular cone ``C(u, alpha)`` is the set of nonzero ``x`` with
``x . u >= cos(alpha) * ||x||``.
"""
from dataclasses import dataclass

import numpy as np
from scipy.optimize import nnls

from ._backend import kernels
from .errors import (
    Infeasible,
    InputError,
    NegativeEntries,
    NonPositiveBasis,
    SingleCone,
    ZeroVector,
)
from .linalg import as_matrix, normalize_columns

__all__ = [
    "CircularCone",
    "ConeSet",
    "angle_between",
    "contains",
    "check_geometric_assumption",
    "contained_in_orthant",
    "orthant_threshold",
    "optimal_enclosing_cone",
]

_UNIT_TOL = 1e-12


def angle_between(a, b):
    """Angle in radians between two nonzero vectors.

    Uses ``2 * arcsin(||a' - b'|| / 2)`` on the normalized vectors, which keeps
    full relative accuracy for small angles where ``arccos`` does not.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroVector("angle of a zero vector is undefined")
    d = np.linalg.norm(a / na - b / nb)
    return float(2.0 * np.arcsin(min(d / 2.0, 1.0)))


@dataclass(frozen=True)
class CircularCone:
    """Circular cone with unit nonnegative ``basis`` and half-aperture ``angle``.

    Parameters
    ----------
    basis : (F,) array_like
        Unit vector with nonnegative entries.
    angle : float
        Size angle in radians, ``0 < angle < pi/2``.
    """

    basis: np.ndarray
    angle: float

    def __post_init__(self):
        u = np.array(self.basis, dtype=np.float64).ravel()
        if u.size == 0:
            raise InputError("cone basis must be nonempty")
        if abs(np.linalg.norm(u) - 1.0) > _UNIT_TOL * max(1, u.size) ** 0.5:
            raise InputError("cone basis must have unit norm")
        if np.any(u < 0):
            raise InputError("cone basis must be entrywise nonnegative")
        if not 0.0 < self.angle < np.pi / 2:
            raise InputError(f"cone angle must lie in (0, pi/2), got {self.angle}")
        u.setflags(write=False)
        object.__setattr__(self, "basis", u)
        object.__setattr__(self, "angle", float(self.angle))

    @property
    def dim(self):
        return self.basis.size


class ConeSet:
    """A family of ``K`` circular cones in the same ambient dimension.

    Attributes
    ----------
    cones : list of CircularCone
    beta : (K, K) ndarray
        Pairwise basis angles in radians; zero diagonal, symmetric.
    """

    def __init__(self, cones):
        cones = list(cones)
        if not cones:
            raise InputError("a cone set needs at least one cone")
        F = cones[0].dim
        if any(c.dim != F for c in cones):
            raise InputError("all cones must share the ambient dimension")
        self.cones = cones
        K = len(cones)
        beta = np.zeros((K, K))
        for i in range(K):
            for j in range(i + 1, K):
                beta[i, j] = beta[j, i] = angle_between(cones[i].basis, cones[j].basis)
        self.beta = beta

    @classmethod
    def from_arrays(cls, bases, alphas):
        """Build from an ``(F, K)`` basis matrix and ``K`` angles (or one scalar)."""
        U = as_matrix(bases, "bases")
        alphas = np.broadcast_to(np.asarray(alphas, dtype=np.float64), (U.shape[1],))
        return cls(CircularCone(U[:, k], a) for k, a in enumerate(alphas))

    def __len__(self):
        return len(self.cones)

    def __iter__(self):
        return iter(self.cones)

    def __getitem__(self, k):
        return self.cones[k]

    @property
    def K(self):
        return len(self.cones)

    @property
    def F(self):
        return self.cones[0].dim

    @property
    def bases(self):
        """``(F, K)`` matrix whose columns are the basis vectors."""
        return np.column_stack([c.basis for c in self.cones])

    @property
    def alphas(self):
        return np.array([c.angle for c in self.cones])


def contains(cone, x):
    """Whether ``x`` lies in ``cone``, i.e. ``x . u / ||x|| >= cos(alpha)``.

    Raises
    ------
    ZeroVector
        If ``x`` is the zero vector, which no cone contains.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size != cone.dim:
        raise InputError(f"vector has length {x.size}, cone lives in R^{cone.dim}")
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ZeroVector("the zero vector lies in no circular cone")
    return bool(x @ cone.basis / nx >= np.cos(cone.angle))


def check_geometric_assumption(cones):
    """Check the pairwise separation condition that makes greedy clustering exact.

    The condition is ``min_{i != j} beta_ij > 3 a1 + a2`` where ``a1 >= a2``
    are the two largest size angles. This is the same as requiring
    ``beta_ij > max(alpha_i + 3 alpha_j, 3 alpha_i + alpha_j)`` for the worst
    pair.

    Parameters
    ----------
    cones : ConeSet

    Returns
    -------
    holds : bool
    margin : float
        ``min beta_ij - (3 a1 + a2)`` in radians; ``holds`` iff ``margin > 0``.

    Raises
    ------
    SingleCone
        If the set has fewer than two cones.
    """
    K = len(cones)
    if K < 2:
        raise SingleCone("the separation condition needs at least two cones")
    a = np.sort(cones.alphas)[::-1]
    beta_min = float(np.min(cones.beta[~np.eye(K, dtype=bool)]))
    margin = beta_min - (3.0 * a[0] + a[1])
    return bool(margin > 0), float(margin)


def orthant_threshold(u):
    """Largest angle for which ``C(u, angle)`` stays in the nonnegative orthant."""
    u = np.asarray(u, dtype=np.float64)
    umin = float(u.min())
    return float(np.arccos(np.sqrt(max(0.0, 1.0 - umin * umin))))


def contained_in_orthant(cone):
    """Whether every point of ``cone`` is entrywise nonnegative.

    True iff ``alpha <= arccos(sqrt(1 - u_min**2))``. The criterion only
    applies to strictly positive bases.

    Raises
    ------
    NonPositiveBasis
        If the basis has a zero entry.
    """
    if np.any(cone.basis <= 0):
        raise NonPositiveBasis("orthant criterion needs a strictly positive basis")
    return bool(cone.angle <= orthant_threshold(cone.basis))


def _al_solve(Xt, tol_viol, tol_obj, max_outer, inner_iter):
    # Augmented Lagrangian for min 0.5||u||^2 s.t. Xt u >= 1, u >= 0.
    M, F = Xt.shape
    c = Xt.sum(axis=0)
    u = c / float(np.min(Xt @ c))  # feasible start
    mu = np.zeros(M)
    rho = 10.0
    xnorm2 = float(np.linalg.norm(Xt, 2)) ** 2
    obj = 0.5 * float(u @ u)
    prev_viol = np.inf
    for outer in range(1, max_outer + 1):
        L = 1.0 + rho * xnorm2
        u, _ = kernels.qp_inner(Xt, mu, rho, u, L, inner_iter, 1e-13)
        r = Xt @ u - 1.0
        mu = np.maximum(mu - rho * r, 0.0)
        viol = max(0.0, -float(r.min()))
        new_obj = 0.5 * float(u @ u)
        done = viol <= tol_viol and abs(new_obj - obj) <= tol_obj * new_obj
        obj = new_obj
        if done:
            return u, mu, True
        if viol > 0.25 * prev_viol:
            rho = min(rho * 10.0, 1e10)
        prev_viol = viol
    return u, mu, False


def _polish(Xt, u, mu):
    # Exact KKT solve on the active set: u = X_A m, X_A^T u = 1, m >= 0.
    slack = Xt @ u - 1.0
    active = np.flatnonzero((mu > 0) | (slack <= 1e-7))
    if active.size == 0:
        return None
    XA = Xt[active]
    G = XA @ XA.T
    m, _ = nnls(G, np.ones(active.size), maxiter=50 * active.size)
    cand = XA.T @ m
    if not np.any(cand):
        return None
    if np.max(np.abs(XA @ cand - 1.0)[m > 0], initial=0.0) > 1e-10:
        return None
    if float(np.min(Xt @ cand)) < 1.0 - 1e-12:
        return None
    return cand


def optimal_enclosing_cone(X, tol_viol=1e-9, tol_obj=1e-10, max_outer=200,
                           inner_iter=20000, polish=True):
    """Smallest circular cone containing every column of ``X``.

    Solves ``min 0.5 ||u||^2`` subject to ``x_m . u >= 1`` for every unit
    column ``x_m`` and ``u >= 0``. With ``u_hat`` the minimizer the cone has
    basis ``u_hat / ||u_hat||`` and angle ``arccos(1 / ||u_hat||)``.

    The solver is an augmented Lagrangian outer loop around accelerated
    projected gradient, followed by an exact active-set solve that replaces
    the iterate when it satisfies the optimality conditions.

    Parameters
    ----------
    X : (F, M) array_like
        Nonnegative matrix with nonzero columns; columns are normalized first.
    tol_viol : float
        Maximum constraint violation accepted from the iterative stage.
    tol_obj : float
        Relative objective change between outer iterations at termination.
    max_outer, inner_iter : int
        Iteration budgets of the two loops.
    polish : bool
        Run the active-set refinement.

    Returns
    -------
    u : (F,) ndarray
        Unit nonnegative basis.
    alpha : float
        Size angle in radians. Every column lies within ``alpha`` of ``u``.

    Raises
    ------
    NegativeEntries
        If ``X`` has a negative entry.
    ZeroColumn
        If some column is zero.
    Infeasible
        If the solver cannot certify feasibility within its budget.
    """
    A = as_matrix(X, "X")
    if A.shape[1] == 0:
        raise InputError("X has no columns")
    if np.any(A < 0):
        raise NegativeEntries("optimal_enclosing_cone needs a nonnegative matrix")
    Z, _ = normalize_columns(A)
    if np.array_equal(Z, np.broadcast_to(Z[:, :1], Z.shape)):
        return Z[:, 0].copy(), 0.0

    Xt = np.ascontiguousarray(Z.T)
    u, mu, ok = _al_solve(Xt, tol_viol, tol_obj, max_outer, inner_iter)
    if polish:
        cand = _polish(Xt, u, mu)
        if cand is not None:
            u, ok = cand, True
    if not ok:
        viol = max(0.0, 1.0 - float(np.min(Xt @ u)))
        raise Infeasible(f"constraint violation {viol:.3e} after {max_outer} outer iterations")

    nrm = float(np.linalg.norm(u))
    ustar = u / nrm
    # the angle is read from the worst column so containment holds exactly
    cos_min = min(1.0 / nrm, float(np.min(Xt @ ustar)))
    alpha = float(np.arccos(np.clip(cos_min, -1.0, 1.0)))
    return ustar, alpha

