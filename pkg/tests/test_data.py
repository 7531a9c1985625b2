import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from scipy.stats import special_ortho_group

from lesdist import (DataError, PointCloud, ToriConfig, generate_torus2, generate_torus3,
                     kernel_scale, load_point_cloud, pairwise_sq_dists, save_point_cloud)
from lesdist.data import kernel_scale_from_points, torus2_points, torus3_points


def test_load_small_csv(tmp_path):
    p = tmp_path / "tri.csv"
    p.write_text("0,0\n1,0\n0,1\n")
    pc = load_point_cloud(p)
    assert (pc.n, pc.d) == (3, 2)
    assert pc.source == "file" and pc.name == "tri"
    np.testing.assert_array_equal(pc.points, [[0, 0], [1, 0], [0, 1]])


def test_load_whitespace_and_comments(tmp_path):
    p = tmp_path / "ws.txt"
    p.write_text("# header\n1 2 3\n\n4\t5 6\n# trailing\n")
    np.testing.assert_array_equal(load_point_cloud(p).points, [[1, 2, 3], [4, 5, 6]])


def test_nan_row_reported(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("0,0\n1,nan\n2,2\n")
    with pytest.raises(DataError, match="row 1"):
        load_point_cloud(p)


@pytest.mark.parametrize("text,match", [
    ("", "empty"),
    ("# only comments\n", "empty"),
    ("0,0\n1,2,3\n", "ragged row 1"),
    ("0,0\n1,x\n", "row 1"),
    ("inf,0\n1,1\n", "row 0"),
])
def test_csv_errors(tmp_path, text, match):
    p = tmp_path / "e.csv"
    p.write_text(text)
    with pytest.raises(DataError, match=match):
        load_point_cloud(p)


def test_single_row_rejected(tmp_path):
    p = tmp_path / "one.csv"
    p.write_text("1,2\n")
    with pytest.raises(DataError, match="N >= 2"):
        load_point_cloud(p)


def test_binary_roundtrip_bitwise(tmp_path):
    pc = generate_torus2(ToriConfig(n_points=257, seed=11))
    p = tmp_path / "t.bin"
    save_point_cloud(pc, p)
    raw = p.read_bytes()
    assert raw[:7] == b"LESPC1\0"
    assert int.from_bytes(raw[7:15], "little") == 257
    assert int.from_bytes(raw[15:23], "little") == 3
    back = load_point_cloud(p)
    assert back.points.tobytes() == pc.points.tobytes()


def test_csv_roundtrip_bitwise(tmp_path):
    pc = generate_torus3(ToriConfig(n_points=50, seed=2))
    p = tmp_path / "t.csv"
    save_point_cloud(pc, p, format="csv")
    assert load_point_cloud(p).points.tobytes() == pc.points.tobytes()


def test_binary_truncated(tmp_path):
    pc = generate_torus2(ToriConfig(n_points=10, seed=1))
    p = tmp_path / "t.bin"
    save_point_cloud(pc, p)
    p.write_bytes(p.read_bytes()[:-8])
    with pytest.raises(DataError, match="expected 30"):
        load_point_cloud(p)


def test_binary_nan_row(tmp_path):
    pts = np.zeros((4, 2))
    pts[2, 1] = np.inf
    blob = b"LESPC1\0" + (4).to_bytes(8, "little") + (2).to_bytes(8, "little") + pts.astype("<f8").tobytes()
    p = tmp_path / "nan.bin"
    p.write_bytes(blob)
    with pytest.raises(DataError, match="row 2"):
        load_point_cloud(p)


# -- tori ------------------------------------------------------------------

def test_torus2_zero_angles():
    np.testing.assert_allclose(torus2_points([0.0], [0.0], 10, 3), [[13, 0, 0]])


def test_torus3_zero_angles():
    c = 0.5
    np.testing.assert_allclose(torus3_points([0.0], [0.0], [0.0], 10, 3, c * 1), [[10 + 3 + c, 0, 0, 0]])


@pytest.mark.parametrize("c", [1.0, 0.6, 0.2])
def test_torus2_implicit_equation(c):
    pts = generate_torus2(ToriConfig(c=c, n_points=2000, seed=4)).points
    x, y, z = pts.T
    lhs = (np.hypot(x, y) - 10) ** 2 + z ** 2
    np.testing.assert_allclose(lhs, (c * 3) ** 2, atol=1e-10)


@pytest.mark.parametrize("c", [1.0, 0.5])
def test_torus3_implicit_equation(c):
    cfg = ToriConfig(c=c, n_points=2000, seed=4)
    pts = generate_torus3(cfg).points
    x, y, z, w = pts.T
    # distance to the core circle of the 2-D torus tube, then to the T3 tube
    rho = np.sqrt((np.hypot(x, y) - 10) ** 2 + z ** 2)
    np.testing.assert_allclose((rho - 3) ** 2 + w ** 2, (c * 1) ** 2, atol=1e-10)
    assert np.all(np.abs(w) <= c * 1 + 1e-15)


def test_torus_z_mean_symmetric():
    z = generate_torus2(ToriConfig(n_points=100_000, seed=9)).points[:, 2]
    assert -0.1 < z.mean() < 0.1


def test_torus3_tends_to_torus2():
    c = 1e-13
    t3 = generate_torus3(ToriConfig(c=c, n_points=500, seed=8)).points
    t2 = generate_torus2(ToriConfig(n_points=500, seed=8)).points
    np.testing.assert_allclose(t3[:, :3], t2, atol=1e-12)
    assert np.abs(t3[:, 3]).max() < 1e-12


def test_fixed_seed_bitwise_and_fresh_draws():
    a = generate_torus2(ToriConfig(n_points=100, seed=21)).points
    b = generate_torus2(ToriConfig(n_points=100, seed=21)).points
    assert a.tobytes() == b.tobytes()
    c = generate_torus2(ToriConfig(n_points=100, seed=None)).points
    d = generate_torus2(ToriConfig(n_points=100, seed=None)).points
    assert not np.array_equal(c, d)


@pytest.mark.parametrize("kwargs", [dict(c=0.0), dict(c=1.5), dict(n_points=1), dict(R2=-1.0), dict(seed=-1)])
def test_tori_config_validation(kwargs):
    with pytest.raises(DataError):
        ToriConfig(**kwargs)


def test_tori_defaults():
    cfg = ToriConfig()
    assert (cfg.R1, cfg.R2, cfg.R3) == (10.0, 3.0, 1.0)


# -- pairwise distances -----------------------------------------------------

def test_sq_dists_345():
    D = pairwise_sq_dists(np.array([[0.0, 0.0], [3.0, 4.0]]))
    np.testing.assert_array_equal(D, [[0, 25], [25, 0]])


def test_sq_dists_duplicates():
    np.testing.assert_array_equal(pairwise_sq_dists(np.ones((2, 3))), np.zeros((2, 2)))


def test_sq_dists_double_loop(rng):
    X = rng.standard_normal((5, 3))
    ref = np.zeros((5, 5))
    for i in range(5):
        for j in range(5):
            ref[i, j] = sum((X[i, k] - X[j, k]) ** 2 for k in range(3))
    np.testing.assert_allclose(pairwise_sq_dists(X), ref, rtol=0, atol=1e-12)


def test_sq_dists_custom_metric(rng):
    X = rng.standard_normal((6, 2))
    manhattan_sq = lambda A, B: np.abs(A[:, None, :] - B[None, :, :]).sum(-1) ** 2
    D = pairwise_sq_dists(X, metric=manhattan_sq)
    assert D[0, 1] == pytest.approx(np.abs(X[0] - X[1]).sum() ** 2)
    assert np.all(np.diag(D) == 0) and np.array_equal(D, D.T)


@settings(max_examples=30, deadline=None)
@given(arrays(np.float64, (12, 3), elements=st.floats(-50, 50)), st.integers(0, 2**31 - 1))
def test_sq_dists_rigid_invariance(X, seed):
    rng = np.random.default_rng(seed)
    Q = special_ortho_group.rvs(3, random_state=seed)
    shift = rng.uniform(-100, 100, 3)
    D = pairwise_sq_dists(X)
    D2 = pairwise_sq_dists(X @ Q.T + shift)
    assert np.all(D >= 0) and np.array_equal(D, D.T) and np.all(np.diag(D) == 0)
    np.testing.assert_allclose(D2, D, rtol=1e-9, atol=1e-9 * max(1.0, D.max()))


# -- kernel scale ------------------------------------------------------------

def test_kernel_scale_small():
    # off-diagonal entries {1, 4, 9}
    sq = np.array([[0, 1, 4], [1, 0, 9], [4, 9, 0]], dtype=float)
    assert kernel_scale(sq, 2.0) == 8.0


def test_kernel_scale_degenerate():
    with pytest.raises(DataError, match="degenerate distances"):
        kernel_scale(np.zeros((4, 4)))
    with pytest.raises(DataError, match="degenerate distances"):
        kernel_scale_from_points(np.ones((5, 2)))


def test_kernel_scale_subsampled_close_to_full():
    X = generate_torus2(ToriConfig(n_points=2000, seed=1))
    sq = pairwise_sq_dists(X)
    full = kernel_scale(sq, 2.0)
    for seed in range(10):
        sub = kernel_scale(sq, 2.0, subsample_cap=20_000, seed=seed)
        assert abs(sub - full) <= 0.1 * full
        assert kernel_scale_from_points(X, 2.0, subsample_cap=20_000, seed=seed) == pytest.approx(sub, rel=1e-12)


def test_kernel_scale_from_points_matches_full():
    X = generate_torus3(ToriConfig(n_points=200, seed=2))
    assert kernel_scale_from_points(X, 2.0) == kernel_scale(pairwise_sq_dists(X), 2.0)
