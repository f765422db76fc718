"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--scale 1.0]

Prints one line per kernel with the best-of-``repeat`` time of each backend
and the speedup, after checking both backends return the same result.
"""
import argparse
import timeit

import numpy as np

from conic_nmf._backend import get_kernels


def unit_rows(rng, N, F):
    Z = rng.random((N, F))
    return np.ascontiguousarray(Z / np.linalg.norm(Z, axis=1, keepdims=True))


def cases(scale, rng):
    N, F, K = int(10000 * scale), int(1600 * scale) or 1, 40
    Zt = unit_rows(rng, N, F)
    C = np.ascontiguousarray(Zt[:K])
    yield "maximin_centroids", (Zt, K, 0), lambda r: r[0]
    yield "assign_nearest", (Zt, C), lambda r: r

    n = int(10000 * scale)
    A = rng.random((n, K))
    G = np.ascontiguousarray(A.T @ A)
    B = np.ascontiguousarray(rng.random((n, K)) * n)
    X0 = np.ascontiguousarray(rng.random((n, K)))
    yield "hals_sweep", (X0, G, B), lambda r: r

    M, Fq = int(2000 * scale) or 1, 50
    X = unit_rows(rng, M, Fq)
    mu = np.abs(rng.standard_normal(M))
    L = 1.0 + 10.0 * np.linalg.norm(X, 2) ** 2
    yield "qp_inner", (X, mu, 10.0, np.ones(Fq), L, 200, 0.0), lambda r: r[0]


def time_kernel(fn, args, repeat):
    # hals_sweep works in place; give every call a fresh copy
    def call():
        a = [x.copy() if isinstance(x, np.ndarray) else x for x in args]
        return fn(*a)
    return min(timeit.repeat(call, number=1, repeat=repeat)), call()


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--scale", type=float, default=1.0, help="problem size multiplier")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)

    py = get_kernels("python")
    try:
        cc = get_kernels("compiled")
    except ImportError:
        print("compiled kernels are not built; nothing to compare")
        return 1

    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<20}{'python (s)':>12}{'compiled (s)':>14}{'speedup':>10}")
    for name, kargs, key in cases(args.scale, rng):
        t_py, r_py = time_kernel(getattr(py, name), kargs, args.repeat)
        t_cc, r_cc = time_kernel(getattr(cc, name), kargs, args.repeat)
        if not np.allclose(key(r_py), key(r_cc), rtol=1e-9, atol=1e-12):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<20}{t_py:>12.4f}{t_cc:>14.4f}{t_py / t_cc:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
