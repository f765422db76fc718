"""Synthetic data drawn from a union of circular cones, and the additive
noise model used for the robustness experiments.

Each column is generated as follows:

1. draw a cone label ``k`` from the mixing weights;
2. draw a squared length ``l ~ Exp(lambda_k)``;
3. draw a direction ``z`` at a uniform angle in ``[0, alpha_k]`` from the
   basis ``u_k``, by sampling around ``e_0`` and reflecting onto ``u_k``;
4. optionally clamp negative entries of ``z`` to zero and renormalize;
5. emit ``sqrt(l) * z``.
"""
from dataclasses import dataclass, field

import numpy as np

from .cones import ConeSet, contained_in_orthant
from .errors import DimensionTooSmall, InputError, NonPositiveBasis
from .linalg import apply_householder, householder_vector

__all__ = [
    "GeneratorConfig",
    "LabeledDataset",
    "equiangular_bases",
    "sample_unit_in_cone",
    "generate",
    "add_noise",
]

# columns drawn from one RNG stream; fixed so output never depends on batching
BLOCK = 4096


def equiangular_bases(F, K, beta, layout="sparse", block=None):
    """``K`` nonnegative unit vectors in ``R^F`` with all pairwise angles ``beta``.

    Parameters
    ----------
    F, K : int
        Ambient dimension and number of vectors, ``F >= K + 1``.
    beta : float
        Common pairwise angle in radians, ``0 < beta < pi/2``.
    layout : {"sparse", "dense"}
        ``"sparse"`` returns ``sqrt(cos b) e_K + sqrt(1 - cos b) e_k`` (zero
        based), which has only two nonzeros per vector. ``"dense"`` replaces
        ``e_K`` by the normalized all-ones vector and ``e_k`` by orthonormal
        vectors built from ``K`` disjoint coordinate blocks, so every entry
        is positive for moderate ``beta``.
    block : int, optional
        Block size of the dense layout, ``1 <= block`` and ``K * block < F``.
        Defaults to ``max(1, F // (2 K))``.

    Returns
    -------
    U : (F, K) ndarray

    Raises
    ------
    DimensionTooSmall
        If ``F < K + 1``.
    NonPositiveBasis
        If the dense construction produces a negative entry, which happens
        when ``beta`` is large for the chosen block size.

    Examples
    --------
    >>> U = equiangular_bases(3, 2, np.pi / 3)
    >>> np.round(U, 4)
    array([[0.7071, 0.    ],
           [0.    , 0.7071],
           [0.7071, 0.7071]])
    """
    F, K = int(F), int(K)
    if K < 1:
        raise InputError("K must be at least 1")
    if F < K + 1:
        raise DimensionTooSmall(f"need F >= K + 1, got F={F}, K={K}")
    if not 0.0 < beta < np.pi / 2:
        raise InputError(f"beta must lie in (0, pi/2), got {beta}")
    c = np.cos(beta)
    a, b = np.sqrt(c), np.sqrt(1.0 - c)
    if layout == "sparse":
        U = np.zeros((F, K))
        U[K, :] = a
        U[np.arange(K), np.arange(K)] = b
        return U
    if layout != "dense":
        raise InputError(f"unknown layout {layout!r}")

    s = max(1, F // (2 * K)) if block is None else int(block)
    if s < 1 or K * s >= F:
        raise InputError(f"block size {s} must satisfy 1 <= block and K * block < F")
    one = np.full(F, 1.0 / np.sqrt(F))
    B = np.zeros((F, K))
    for k in range(K):
        B[k * s:(k + 1) * s, k] = 1.0
    P = B - np.outer(one, one @ B)
    # symmetric orthogonalization keeps the K directions interchangeable
    w, Q = np.linalg.eigh(P.T @ P)
    D = P @ (Q * w ** -0.5) @ Q.T
    U = a * one[:, None] + b * D
    if np.any(U < 0):
        raise NonPositiveBasis("dense layout produced a negative entry; lower beta or block")
    return U


def sample_unit_in_cone(cone, rng, size=None, f=0):
    """Unit vectors at a uniform random angle in ``[0, alpha]`` from the basis.

    A point ``cos(b) e_f + sin(b) y`` is drawn with ``y`` uniform on the unit
    sphere orthogonal to ``e_f``, then reflected by the Householder map that
    sends ``e_f`` to the cone basis. The angle to the basis is exactly ``b``.

    Parameters
    ----------
    cone : CircularCone
    rng : numpy.random.Generator
    size : int, optional
        Number of draws. ``None`` returns one vector of shape ``(F,)``.
    f : int
        Source coordinate of the reflection.

    Returns
    -------
    (F,) or (F, size) ndarray
    """
    n = 1 if size is None else int(size)
    F = cone.dim
    if F < 2:
        raise DimensionTooSmall("cones in R^1 have no angular extent")
    ang = cone.angle * rng.random(n)
    Y = rng.standard_normal((F, n))
    Y[f] = 0.0
    Y /= np.linalg.norm(Y, axis=0)
    X = Y * np.sin(ang)
    X[f] = np.cos(ang)
    X = apply_householder(householder_vector(cone.basis, f), X)
    return X[:, 0] if size is None else X


@dataclass
class GeneratorConfig:
    """Parameters of the cone mixture.

    Attributes
    ----------
    F, N : int
        Dimension and number of columns.
    cones : ConeSet
    lambdas : (K,) array_like
        Rates of the exponential squared-length distribution.
    mixing : (K,) array_like, optional
        Label probabilities; uniform when omitted.
    project : bool
        Clamp negative entries of each direction and renormalize.
    seed : int
    """

    F: int
    N: int
    cones: ConeSet
    lambdas: np.ndarray
    mixing: np.ndarray = None
    project: bool = True
    seed: int = 0

    def __post_init__(self):
        K = len(self.cones)
        if self.cones.F != self.F:
            raise InputError(f"cones live in R^{self.cones.F}, config says F={self.F}")
        if self.N < 0:
            raise InputError("N must be nonnegative")
        lam = np.broadcast_to(np.asarray(self.lambdas, dtype=np.float64), (K,)).copy()
        if not np.all(lam > 0) or not np.all(np.isfinite(lam)):
            raise InputError("every lambda must be positive and finite")
        self.lambdas = lam
        if self.mixing is None:
            mix = np.full(K, 1.0 / K)
        else:
            mix = np.asarray(self.mixing, dtype=np.float64).ravel()
            if mix.shape != (K,) or np.any(mix < 0):
                raise InputError("mixing must hold K nonnegative weights")
            if abs(mix.sum() - 1.0) > 1e-12:
                raise InputError(f"mixing weights sum to {mix.sum()!r}, not 1")
        self.mixing = mix
        self.seed = int(self.seed)

    @property
    def K(self):
        return len(self.cones)


@dataclass
class LabeledDataset:
    """Generated matrix with zero-based ground-truth cone labels."""

    V: np.ndarray
    labels: np.ndarray
    config: GeneratorConfig = field(repr=False)


def _block(config, zs, start, stop):
    rng = np.random.default_rng([config.seed, start // BLOCK])
    n = stop - start
    F, K = config.F, config.K
    cdf = np.cumsum(config.mixing)
    cdf[-1] = 1.0
    lab = np.minimum(np.searchsorted(cdf, rng.random(n), side="right"), K - 1)
    ell = -np.log1p(-rng.random(n)) / config.lambdas[lab]
    ang = config.cones.alphas[lab] * rng.random(n)
    Y = rng.standard_normal((F, n))
    Y[0] = 0.0
    Y /= np.linalg.norm(Y, axis=0)
    X = Y * np.sin(ang)
    X[0] = np.cos(ang)
    for k in range(K):
        cols = np.flatnonzero(lab == k)
        if cols.size and zs[k] is not None:
            X[:, cols] = apply_householder(zs[k], X[:, cols])
    if config.project:
        np.maximum(X, 0.0, out=X)
        X /= np.linalg.norm(X, axis=0)
    X *= np.sqrt(ell)
    return X, lab


def generate(config):
    """Draw a labeled dataset from ``config``.

    Output is a deterministic function of the config. Columns are produced in
    fixed blocks of ``BLOCK`` columns, each with its own stream seeded from
    ``(seed, block index)``, so blocks can be generated in any order.

    Returns
    -------
    LabeledDataset
    """
    F, N = config.F, config.N
    V = np.empty((F, N))
    labels = np.empty(N, dtype=np.int64)
    zs = [householder_vector(c.basis, 0) for c in config.cones]
    for start in range(0, N, BLOCK):
        stop = min(start + BLOCK, N)
        V[:, start:stop], labels[start:stop] = _block(config, zs, start, stop)
    return LabeledDataset(V=V, labels=labels, config=config)


def add_noise(V, delta, rng):
    """Return ``max(V + delta * E, 0)`` with ``E`` standard normal entries."""
    if delta < 0:
        raise InputError("delta must be nonnegative")
    V = np.asarray(V, dtype=np.float64)
    if delta == 0:
        return V.copy()
    return np.maximum(V + delta * rng.standard_normal(V.shape), 0.0)


def orthant_safe(cones):
    """Whether every cone in the set lies inside the nonnegative orthant."""
    try:
        return all(contained_in_orthant(c) for c in cones)
    except NonPositiveBasis:
        return False
