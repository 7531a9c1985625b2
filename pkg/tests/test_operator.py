import numpy as np
import pytest
from scipy.stats import special_ortho_group

from lesdist import ConfigurationError, PointCloud, build_operator, kernel_scale, operator_matmul, pairwise_sq_dists
from lesdist.operator import SpdOperator

from conftest import reference_operator


def _sigma2(X):
    return kernel_scale(pairwise_sq_dists(X), 2.0)


def test_matches_literal_construction(small_cloud):
    X = small_cloud.points
    s2 = _sigma2(X)
    W_ref, W_dm = reference_operator(X, s2)
    op = build_operator(small_cloud, s2, mode="dense")
    np.testing.assert_allclose(op.matrix, W_ref, rtol=0, atol=1e-13)
    np.testing.assert_allclose(op.to_row_stochastic(), W_dm, rtol=0, atol=1e-13)


def test_two_equal_points():
    op = build_operator(np.zeros((2, 3)), 1.0, mode="dense")
    np.testing.assert_allclose(op.matrix, 0.5 * np.ones((2, 2)), atol=1e-15)
    np.testing.assert_allclose(np.linalg.eigvalsh(op.matrix), [0, 1], atol=1e-12)


def test_implicit_equals_dense(rng):
    X = rng.standard_normal((20, 3))
    s2 = _sigma2(X)
    dense = build_operator(X, s2, mode="dense")
    implicit = build_operator(X, s2, mode="implicit", batch_rows=3)
    assert implicit._matrix is None
    np.testing.assert_allclose(implicit.d_tilde, dense.d_tilde, rtol=0, atol=1e-13)
    np.testing.assert_allclose(implicit.d_vec, dense.d_vec, rtol=0, atol=1e-13)
    np.testing.assert_allclose(implicit.rows(0, 20), dense.matrix, rtol=0, atol=1e-13)


def test_row_stochastic_ones(small_cloud):
    op = build_operator(small_cloud, _sigma2(small_cloud.points))
    r = np.sqrt(op.d_vec)
    ones = np.ones(op.size)
    np.testing.assert_allclose((op.matrix @ (r * ones)) / r, ones, atol=1e-12)


def test_spd_properties(torus300):
    op = build_operator(torus300, _sigma2(torus300.points))
    W = op.matrix
    assert np.array_equal(W, W.T)
    assert np.all(W >= 0)
    vals, vecs = np.linalg.eigh(W)
    assert vals[-1] == pytest.approx(1.0, abs=1e-10)
    assert vals.min() > -1e-12
    top = np.abs(vecs[:, -1])
    expected = np.sqrt(op.d_vec) / np.linalg.norm(np.sqrt(op.d_vec))
    np.testing.assert_allclose(top, expected, atol=1e-10)


def test_power_iteration_top_eigenvalue(small_cloud):
    op = build_operator(small_cloud, _sigma2(small_cloud.points), mode="implicit")
    v = np.random.default_rng(0).standard_normal(op.size)
    for _ in range(500):
        v = operator_matmul(op, v)
        v /= np.linalg.norm(v)
    assert v @ operator_matmul(op, v) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("mode", ["dense", "implicit"])
def test_matmul_identity_columns(mode):
    X = np.random.default_rng(1).standard_normal((30, 2))
    s2 = _sigma2(X)
    dense = build_operator(X, s2, mode="dense")
    op = build_operator(X, s2, mode=mode, batch_rows=4)
    cols = [0, 7, 29]
    out = operator_matmul(op, np.eye(30)[:, cols])
    np.testing.assert_allclose(out, dense.matrix[:, cols], rtol=0, atol=1e-13)


def test_matmul_top_eigenvector(torus300):
    op = build_operator(torus300, _sigma2(torus300.points), mode="implicit")
    v = np.sqrt(op.d_vec)
    np.testing.assert_allclose(operator_matmul(op, v), v, rtol=0, atol=1e-11)


@pytest.mark.parametrize("mode", ["dense", "implicit"])
def test_matmul_batching_bitwise(torus300, mode):
    op = build_operator(torus300, _sigma2(torus300.points), mode=mode)
    V = np.random.default_rng(2).standard_normal((op.size, 9))
    ref = operator_matmul(op, V, batch_rows=op.size)
    for b in (1, 7, 64, 100):
        assert operator_matmul(op, V, batch_rows=b).tobytes() == ref.tobytes()


def test_dense_and_implicit_products_agree(torus300):
    s2 = _sigma2(torus300.points)
    V = np.random.default_rng(3).standard_normal((300, 5))
    a = operator_matmul(build_operator(torus300, s2, mode="dense"), V)
    b = operator_matmul(build_operator(torus300, s2, mode="implicit", batch_rows=37), V)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-13)


def test_matmul_shape_mismatch(small_cloud):
    op = build_operator(small_cloud, 1.0)
    with pytest.raises(ConfigurationError, match="shape mismatch"):
        operator_matmul(op, np.ones((op.size + 1, 2)))


def test_invariances(rng):
    X = rng.standard_normal((40, 3)) * 3
    s2 = _sigma2(X)
    W = build_operator(X, s2).matrix
    Q = special_ortho_group.rvs(3, random_state=4)
    W_rot = build_operator(X @ Q.T + [4.0, -2.0, 9.0], s2).matrix
    np.testing.assert_allclose(W_rot, W, rtol=0, atol=1e-9)
    perm = rng.permutation(40)
    W_perm = build_operator(X[perm], s2).matrix
    np.testing.assert_allclose(W_perm, W[np.ix_(perm, perm)], rtol=0, atol=1e-9)
    s = 3.7
    W_scaled = build_operator(s * X, s * s * s2).matrix
    np.testing.assert_allclose(W_scaled, W, rtol=0, atol=1e-9)


def test_auto_mode_threshold():
    X = np.random.default_rng(0).standard_normal((50, 2))
    assert build_operator(X, 1.0).storage == "dense"
    assert build_operator(X, 1.0, mode="implicit").storage == "implicit"


@pytest.mark.parametrize("sigma2", [0.0, -1.0, np.nan])
def test_bad_sigma2(sigma2, small_cloud):
    with pytest.raises(ConfigurationError):
        build_operator(small_cloud, sigma2)


def test_tiny_sigma_disconnects():
    # rows reduce to a lone diagonal entry; permitted
    X = np.array([[0.0], [100.0], [200.0]])
    op = build_operator(X, 1e-3)
    np.testing.assert_allclose(op.matrix, np.eye(3), atol=1e-15)
