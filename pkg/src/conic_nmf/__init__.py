"""Nonnegative matrix factorization for data lying in separated circular cones.

The core routine clusters columns by direction and fits a rank-one
nonnegative factorization to each cluster; closed-form bounds predict the
resulting error. Baseline solvers, a synthetic generator, a rank estimator
and clustering metrics are included.
"""
__version__ = "0.1.0"

from ._backend import BACKEND
from .baselines import (
    INITIALIZERS,
    SOLVERS,
    SolverTrace,
    cr1nmf_init,
    hals_run,
    initialize,
    mult_run,
    nndsvd_init,
    random_init,
    spkm,
    spkm_init,
)
from .cluster import Partition, greedy_cluster
from .cones import (
    CircularCone,
    ConeSet,
    angle_between,
    check_geometric_assumption,
    contained_in_orthant,
    contains,
    optimal_enclosing_cone,
)
from .cr1nmf import (
    FactorPair,
    deterministic_bound,
    f_alpha,
    factorize,
    g_alpha,
    probabilistic_bound,
)
from .errors import *  # noqa: F401,F403
from .linalg import (
    RankOneTriple,
    frobenius_norm,
    householder_to,
    normalize_columns,
    rank_one_nmf,
    rank_one_svd,
    top_singular_values,
)
from .metrics import dice, nmi, partition_match, purity, relative_error
from .rank import estimate_k
from .synth import (
    GeneratorConfig,
    LabeledDataset,
    add_noise,
    equiangular_bases,
    generate,
    sample_unit_in_cone,
)
