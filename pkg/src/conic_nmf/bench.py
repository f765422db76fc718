"""Seeded experiment harness: synthetic data, cluster-then-rank-one
factorization and the iterative solvers, timed against each other.

The main statistic is the time an iterative solver needs to first reach the
relative error of the cluster-then-rank-one factorization on the same data.
"""
import os
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .baselines import INITIALIZERS, SOLVERS, initialize
from .cones import ConeSet
from .cr1nmf import factorize
from .errors import InputError
from .io import parse_bool, parse_list
from .synth import GeneratorConfig, equiangular_bases, generate

__all__ = [
    "parse_lambdas",
    "build_generator_config",
    "run_case",
    "run_benchmark",
    "worker_count",
]

GENERATOR_DEFAULTS = {
    "F": "1600",
    "N": "10000",
    "K": "40",
    "alpha": "0.2",
    "margin": "0.01",
    "lambdas": "harmonic",
    "layout": "sparse",
    "project": "true",
    "seed": "0",
}

BENCH_DEFAULTS = dict(
    GENERATOR_DEFAULTS,
    solvers="cr1,mult,hals",
    inits="rand",
    iters="1000",
    seeds="1",
    max_time="60",
)


def parse_lambdas(value, K):
    """``"harmonic"`` gives ``1/k`` for ``k = 1..K``; otherwise one value or ``K``."""
    v = str(value).strip().lower()
    if v == "harmonic":
        return 1.0 / np.arange(1, K + 1)
    lam = parse_list(value)
    if len(lam) == 1:
        return np.full(K, lam[0])
    if len(lam) != K:
        raise InputError(f"need 1 or K={K} lambdas, got {len(lam)}")
    return np.array(lam)


def _int(value):
    # accepts "1e4" as well as "10000"
    x = float(value)
    if x != int(x):
        raise ValueError(f"{value!r} is not an integer")
    return int(x)


def _alphas(value, K):
    a = parse_list(value)
    if len(a) == 1:
        return np.full(K, a[0])
    if len(a) != K:
        raise InputError(f"need 1 or K={K} alphas, got {len(a)}")
    return np.array(a)


def build_generator_config(params):
    """Turn a flat string mapping into a :class:`GeneratorConfig`.

    Keys: ``F``, ``N``, ``K``, ``alpha`` (one value or ``K``), ``beta``
    (pairwise basis angle; default ``3 a1 + a2 + margin`` from the two largest
    angles), ``margin``, ``lambdas``, ``mixing``, ``layout``, ``project``,
    ``seed``.
    """
    p = dict(GENERATOR_DEFAULTS)
    p.update({k: v for k, v in params.items() if v is not None})
    try:
        F, N, K = _int(p["F"]), _int(p["N"]), _int(p["K"])
        seed = _int(p["seed"])
    except ValueError as exc:
        raise InputError(f"bad integer parameter: {exc}") from exc
    if K < 1:
        raise InputError("K must be at least 1")
    alphas = _alphas(p["alpha"], K)
    if "beta" in p and str(p["beta"]).strip():
        beta = float(p["beta"])
    else:
        top = np.sort(alphas)[::-1]
        a2 = top[1] if K > 1 else top[0]
        beta = 3.0 * top[0] + a2 + float(p["margin"])
    U = equiangular_bases(F, K, beta, layout=p["layout"])
    cones = ConeSet.from_arrays(U, alphas)
    mixing = parse_list(p["mixing"]) if p.get("mixing") else None
    return GeneratorConfig(
        F=F, N=N, cones=cones, lambdas=parse_lambdas(p["lambdas"], K),
        mixing=mixing, project=parse_bool(p["project"]), seed=seed,
    )


def run_case(case):
    """Run every solver/initializer pair on one generated dataset.

    ``case`` is a dict with a ``"generator"`` mapping plus ``solvers``,
    ``inits``, ``iters`` and ``max_time``. Returns a list of row dicts.
    """
    cfg = build_generator_config(case["generator"])
    V = generate(cfg).V
    K = cfg.K
    t0 = time.perf_counter()
    pair, _ = factorize(V, K)
    cr1_time = time.perf_counter() - t0
    target = pair.relative_error
    base = {"N": cfg.N, "seed": cfg.seed}
    rows = []
    for solver in case["solvers"]:
        if solver == "cr1":
            rows.append(dict(base, solver="cr1", init="-", relative_error=target,
                             wall_clock=cr1_time, time_to_cr1=cr1_time, iterations=0))
            continue
        run = SOLVERS[solver]
        for init in case["inits"]:
            rng = np.random.default_rng([cfg.seed, 1])
            t0 = time.perf_counter()
            W0, H0 = initialize(init, V, K, rng)
            t_init = time.perf_counter() - t0
            res, trace = run(V, W0, H0, case["iters"], target=target,
                             max_time=case["max_time"])
            rows.append(dict(
                base, solver=solver, init=init,
                relative_error=res.relative_error,
                wall_clock=t_init + float(trace.times[-1]),
                time_to_cr1=t_init + trace.time_to_reach(target),
                iterations=trace.iterations,
            ))
    return rows


def worker_count(n_jobs):
    """Worker count capped by ``CONIC_NMF_THREADS`` and the CPU count."""
    cap = os.environ.get("CONIC_NMF_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise InputError(f"CONIC_NMF_THREADS must be an integer, got {cap!r}") from None
    return max(1, min(limit, n_jobs))


def run_benchmark(params):
    """Expand a flat parameter mapping into cases and run them.

    ``N`` may list several sizes and ``seeds`` is the number of consecutive
    seeds starting at ``seed``. Rows come back sorted by
    ``(N, seed, solver, init)`` regardless of execution order.
    """
    p = dict(BENCH_DEFAULTS)
    p.update({k: v for k, v in params.items() if v is not None})
    solvers = parse_list(p["solvers"], str)
    if not solvers:
        raise InputError("the solver list is empty")
    unknown = [s for s in solvers if s != "cr1" and s not in SOLVERS]
    if unknown:
        raise InputError(f"unknown solvers {unknown}")
    inits = parse_list(p["inits"], str)
    if any(s != "cr1" for s in solvers) and not inits:
        raise InputError("the initializer list is empty")
    bad = [i for i in inits if i not in INITIALIZERS]
    if bad:
        raise InputError(f"unknown initializers {bad}")
    Ns = parse_list(p["N"], _int)
    seed0, n_seeds = _int(p["seed"]), _int(p["seeds"])
    cases = []
    for N in Ns:
        for s in range(seed0, seed0 + n_seeds):
            gen = {k: p[k] for k in GENERATOR_DEFAULTS if k in p}
            gen.update({k: p[k] for k in ("beta", "mixing") if k in p})
            gen["N"], gen["seed"] = str(N), str(s)
            cases.append({
                "generator": gen,
                "solvers": solvers,
                "inits": inits,
                "iters": int(p["iters"]),
                "max_time": float(p["max_time"]),
            })
    workers = worker_count(len(cases))
    if workers == 1:
        results = [run_case(c) for c in cases]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_case, cases))
    rows = [r for rs in results for r in rs]
    rows.sort(key=lambda r: (r["N"], r["seed"], r["solver"], r["init"]))
    return rows
