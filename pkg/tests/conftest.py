import numpy as np
import pytest

from conic_nmf import ConeSet, GeneratorConfig, equiangular_bases, generate

# (criterion, passed, detail) rows collected by the acceptance suite
ACCEPTANCE = []


def cone_dataset(F, K, N, alpha, beta=None, layout="sparse", lambdas=1.0,
                 project=False, seed=0, block=None):
    """Labeled data from K equiangular cones of equal size angle."""
    if beta is None:
        beta = 4 * alpha + 0.01
    U = equiangular_bases(F, K, beta, layout=layout, block=block)
    cones = ConeSet.from_arrays(U, alpha)
    cfg = GeneratorConfig(F=F, N=N, cones=cones, lambdas=lambdas,
                          project=project, seed=seed)
    return generate(cfg)


@pytest.fixture
def record_criterion():
    def record(number, passed, detail):
        line = f"CRITERION {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        ACCEPTANCE.append((number, passed, line))
        print(line)
        return passed
    return record


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for _, _, line in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(line)
