import numpy as np
import pytest
from numpy.testing import assert_allclose

from conic_nmf import (
    INITIALIZERS,
    SOLVERS,
    InputError,
    KTooLarge,
    ShapeMismatch,
    SolverTrace,
    angle_between,
    cr1nmf_init,
    factorize,
    hals_run,
    initialize,
    mult_run,
    nndsvd_init,
    random_init,
    rank_one_nmf,
    spkm,
    spkm_init,
)

from conftest import cone_dataset


def exact_problem(rng, F=12, N=15, K=3):
    W, H = rng.random((F, K)), rng.random((K, N))
    return W @ H, W, H


@pytest.mark.parametrize("solver", ["mult", "hals"])
def test_exact_start_stays_exact(rng, solver):
    V, W, H = exact_problem(rng)
    res, trace = SOLVERS[solver](V, W, H, 20, error="exact")
    assert trace.errors.max() <= 1e-14
    assert res.relative_error <= 1e-14


def test_mult_monotone(rng):
    V = rng.random((20, 30))
    W0, H0 = random_init(20, 30, 4, rng)
    res, trace = mult_run(V, W0, H0, 200, error="exact")
    assert trace.iterations == 200 and trace.errors.size == 201
    assert np.all(np.diff(trace.errors) <= 1e-12)
    assert res.relative_error <= trace.errors[0]


def test_mult_does_not_touch_inputs(rng):
    V = rng.random((5, 6))
    W0, H0 = random_init(5, 6, 2, rng)
    W1, H1 = W0.copy(), H0.copy()
    mult_run(V, W0, H0, 5)
    assert np.array_equal(W0, W1) and np.array_equal(H0, H1)


@pytest.mark.parametrize("solver", ["mult", "hals"])
def test_fast_error_matches_exact(rng, solver):
    V = rng.random((15, 25))
    W0, H0 = random_init(15, 25, 3, rng)
    _, fast = SOLVERS[solver](V, W0, H0, 30, error="fast")
    _, exact = SOLVERS[solver](V, W0, H0, 30, error="exact")
    assert_allclose(fast.errors, exact.errors, rtol=1e-9, atol=1e-12)


def test_hals_monotone(rng):
    V = rng.random((20, 30))
    W0, H0 = random_init(20, 30, 4, rng)
    _, trace = hals_run(V, W0, H0, 100, error="exact")
    assert np.all(np.diff(trace.errors) <= 1e-12)


def test_hals_beats_mult():
    wins = 0
    for seed in range(100):
        r = np.random.default_rng(seed)
        V = r.random((20, 30))
        W0, H0 = random_init(20, 30, 4, r)
        m, _ = mult_run(V, W0, H0, 100)
        h, _ = hals_run(V, W0, H0, 100)
        wins += h.relative_error <= m.relative_error
    assert wins >= 80


def test_hals_rank_one(rng):
    V = np.outer(rng.random(8), rng.random(11))
    W0, H0 = random_init(8, 11, 1, rng)
    _, trace = hals_run(V, W0, H0, 5, error="exact")
    assert trace.errors[-1] <= 1e-10


def test_hals_zero_component_skipped(rng):
    V = rng.random((6, 7))
    W0, H0 = random_init(6, 7, 2, rng)
    W0[:, 1] = 0
    res, _ = hals_run(V, W0, H0, 3)
    assert np.all(np.isfinite(res.W)) and np.all(np.isfinite(res.H))


def test_mult_masked_fixed_point():
    data = cone_dataset(F=20, K=3, N=300, alpha=0.1, layout="dense", project=True)
    pair, _ = factorize(data.V, 3)
    res, _ = mult_run(data.V, pair.W, pair.H, 1, mask_zeros=True)
    assert np.linalg.norm(res.W - pair.W) <= 1e-8 * np.linalg.norm(pair.W)
    assert np.linalg.norm(res.H - pair.H) <= 1e-8 * np.linalg.norm(pair.H)


def test_stopping_rules(rng):
    V = rng.random((10, 12))
    W0, H0 = random_init(10, 12, 3, rng)
    _, full = mult_run(V, W0, H0, 50)
    target = full.errors[10]
    _, short = mult_run(V, W0, H0, 50, target=target)
    assert short.iterations == 10
    assert short.time_to_reach(target) == short.times[10]
    assert short.time_to_reach(-1.0) == np.inf
    _, none = mult_run(V, W0, H0, 50, max_time=0.0)
    assert none.iterations == 0


def test_trace_time_to_reach():
    t = SolverTrace(np.array([1.0, 0.5, 0.2]), np.array([0.0, 1.0, 2.5]), 2)
    assert t.time_to_reach(0.6) == 1.0
    assert t.time_to_reach(0.2) == 2.5
    assert t.time_to_reach(0.1) == np.inf


@pytest.mark.parametrize("solver", ["mult", "hals"])
def test_shape_checks(rng, solver):
    V = rng.random((4, 5))
    with pytest.raises(ShapeMismatch):
        SOLVERS[solver](V, rng.random((4, 2)), rng.random((3, 5)), 1)
    with pytest.raises(ShapeMismatch):
        SOLVERS[solver](V, rng.random((3, 2)), rng.random((2, 5)), 1)
    with pytest.raises(InputError):
        SOLVERS[solver](V, -rng.random((4, 2)), rng.random((2, 5)), 1)
    with pytest.raises(InputError):
        SOLVERS[solver](V, rng.random((4, 2)), rng.random((2, 5)), -1)


def test_hals_backends_agree(rng):
    pytest.importorskip("conic_nmf._kernels")
    V = rng.random((25, 40))
    W0, H0 = random_init(25, 40, 5, rng)
    a, _ = hals_run(V, W0, H0, 30, backend="python")
    b, _ = hals_run(V, W0, H0, 30, backend="compiled")
    assert_allclose(a.W, b.W, rtol=1e-10, atol=1e-13)
    assert_allclose(a.H, b.H, rtol=1e-10, atol=1e-13)


class TestInitializers:
    def test_random(self):
        W, H = random_init(4, 6, 3, np.random.default_rng(0))
        assert W.shape == (4, 3) and H.shape == (3, 6)
        assert W.min() >= 0 and W.max() < 1 and H.min() >= 0 and H.max() < 1
        W2, H2 = random_init(4, 6, 3, np.random.default_rng(0))
        assert np.array_equal(W, W2) and np.array_equal(H, H2)

    def test_spkm_duplicate_sample(self):
        V = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
        C, labels = spkm(V, 1, rng=np.random.default_rng(0))
        assert_allclose(C[:, 0], [2 / np.sqrt(5), 1 / np.sqrt(5)], rtol=1e-14)
        u = C[:, 0]
        assert_allclose(np.linalg.norm(V - np.outer(u, u @ V)), 1.0954, atol=1e-4)
        w, h = rank_one_nmf(V)
        assert_allclose(np.linalg.norm(V - np.outer(w, h)), 1.0, rtol=1e-12)

    def test_spkm_separated_cones(self):
        alpha = 0.1
        data = cone_dataset(F=30, K=4, N=2000, alpha=alpha, beta=0.8, layout="dense",
                            project=True)
        C, _ = spkm(data.V, 4, rng=np.random.default_rng(1))
        U = data.config.cones.bases
        for k in range(4):
            assert min(angle_between(C[:, j], U[:, k]) for j in range(4)) <= alpha

    def test_spkm_each_column_own_centroid(self, rng):
        V = rng.random((5, 6))
        C, labels = spkm(V, 6, rng=rng)
        assert sorted(labels.tolist()) == list(range(6))
        assert_allclose(np.sort(C.T @ (V / np.linalg.norm(V, axis=0)), axis=1)[:, -1], 1)

    def test_spkm_init_shapes(self, rng):
        W, H, labels = spkm_init(rng.random((5, 9)), 3, rng=rng)
        assert W.shape == (5, 3) and H.shape == (3, 9) and labels.shape == (9,)
        assert W.min() >= 0 and H.min() >= 0

    def test_spkm_bad_k(self, rng):
        with pytest.raises(InputError):
            spkm(rng.random((3, 4)), 5)

    def test_nndsvd_deterministic(self, rng):
        V = rng.random((10, 12))
        a, b = nndsvd_init(V, 3), nndsvd_init(V, 3)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])

    def test_nndsvd_rank_one(self, rng):
        V = np.outer(rng.random(7), rng.random(9))
        W, H = nndsvd_init(V, 1)
        assert np.linalg.norm(V - W @ H) <= 1e-12 * np.linalg.norm(V)

    def test_nndsvd_error_below_norm(self, rng):
        V = rng.random((10, 12))
        W, H = nndsvd_init(V, 3)
        assert W.min() >= 0 and H.min() >= 0
        assert np.linalg.norm(V - W @ H) <= np.linalg.norm(V)

    def test_nndsvd_component_construction(self):
        # second singular pair of this matrix has a clear positive/negative split
        V = np.array([[3.0, 1.0, 0.0], [1.0, 3.0, 0.0], [0.0, 0.0, 0.5]])
        W, H = nndsvd_init(V, 2)
        U, S, Vt = np.linalg.svd(V)
        x, y = U[:, 1], Vt[1]
        xp, yp = np.maximum(x, 0), np.maximum(y, 0)
        xn, yn = np.maximum(-x, 0), np.maximum(-y, 0)
        mp = np.linalg.norm(xp) * np.linalg.norm(yp)
        mn = np.linalg.norm(xn) * np.linalg.norm(yn)
        a, b, m = (xp, yp, mp) if mp >= mn else (xn, yn, mn)
        expect = S[1] * m * np.outer(a / np.linalg.norm(a), b / np.linalg.norm(b))
        assert_allclose(np.outer(W[:, 1], H[1]), expect, atol=1e-12)

    def test_nndsvd_k_too_large(self, rng):
        with pytest.raises(KTooLarge):
            nndsvd_init(rng.random((3, 5)), 4)

    def test_cr1_init(self, rng):
        data = cone_dataset(F=20, K=3, N=300, alpha=0.1, layout="dense", project=True)
        pair, _ = factorize(data.V, 3)
        W0, H0 = cr1nmf_init(data.V, 3, eta=0.0)
        assert np.array_equal(W0, pair.W) and np.array_equal(H0, pair.H)
        W1, H1 = cr1nmf_init(data.V, 3, rng=rng)
        assert H1.min() > 0
        _, trace = mult_run(data.V, W1, H1, 20)
        assert trace.errors[-1] < trace.errors[0]
        with pytest.raises(InputError):
            cr1nmf_init(data.V, 3, eta=-1)

    @pytest.mark.parametrize("name", sorted(INITIALIZERS))
    def test_registry_shapes(self, rng, name):
        V = rng.random((8, 10)) + 0.01
        W, H = initialize(name, V, 3, rng)
        assert W.shape == (8, 3) and H.shape == (3, 10)
        assert W.min() >= 0 and H.min() >= 0

    def test_unknown_initializer(self, rng):
        with pytest.raises(InputError):
            initialize("svd", rng.random((3, 3)), 2)


@pytest.mark.slow
def test_cr1_init_reaches_random_floor_sooner():
    # the hardest target in the family is the random run's own floor
    faster = 0
    for seed in range(100):
        data = cone_dataset(F=200, K=10, N=1000, alpha=0.2, layout="dense", project=True,
                            seed=seed)
        r = np.random.default_rng(seed)
        W0, H0 = random_init(200, 1000, 10, r)
        _, rand = mult_run(data.V, W0, H0, 100)
        floor = rand.errors[-1]
        W1, H1 = cr1nmf_init(data.V, 10, rng=r)
        _, cr1 = mult_run(data.V, W1, H1, 100, target=floor)
        hit = np.flatnonzero(cr1.errors <= floor)
        faster += hit.size > 0 and hit[0] < 100
    assert faster >= 90, f"cr1 start reached the random floor first in {faster}/100 seeds"
