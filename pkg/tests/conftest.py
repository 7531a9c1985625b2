import sys

import numpy as np
import pytest

from lesdist import PointCloud, ToriConfig, generate_torus2, generate_torus3


def random_spd(rng, n, low=1e-4, high=1.0):
    """Random SPD matrix with log-uniform eigenvalues in [low, high]."""
    q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    lam = np.exp(rng.uniform(np.log(low), np.log(high), n))
    return (q * lam) @ q.T


def reference_operator(points, sigma2):
    """Dense diffusion operator built literally from the normalisation steps."""
    n = len(points)
    sq = np.array([[np.sum((points[i] - points[j]) ** 2) for j in range(n)] for i in range(n)])
    K = np.exp(-sq / sigma2)
    Dt = np.diag(K.sum(axis=1))
    Wt = np.linalg.inv(Dt) @ K @ np.linalg.inv(Dt)
    D = np.diag(Wt.sum(axis=1))
    W_dm = np.linalg.inv(D) @ Wt
    Dh = np.sqrt(D)
    return Dh @ W_dm @ np.linalg.inv(Dh), W_dm


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def torus300():
    return generate_torus2(ToriConfig(n_points=300, seed=3))


@pytest.fixture(scope="session")
def torus500():
    return generate_torus2(ToriConfig(n_points=500, seed=5))


@pytest.fixture(scope="session")
def small_cloud():
    return PointCloud(np.random.default_rng(7).standard_normal((30, 4)), name="small")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
