import numpy as np
import pytest

from inrdiff.metrics import chamfer_l1, f_score, normal_consistency


def brute_chamfer(a, b):
    """Naive double-loop oracle."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d_ab = np.array([min(np.linalg.norm(p - q) for q in b) for p in a])
    d_ba = np.array([min(np.linalg.norm(q - p) for p in a) for q in b])
    return 0.5 * (d_ab.mean() + d_ba.mean())


class TestChamfer:
    def test_identity_zero(self, rng):
        a = rng.normal(size=(200, 3))
        assert chamfer_l1(a, a) == 0.0

    def test_two_points(self):
        assert chamfer_l1([[0, 0, 0]], [[1, 0, 0]]) == pytest.approx(1.0)

    def test_matches_bruteforce(self, rng):
        a = rng.normal(size=(100, 3))
        b = rng.normal(size=(120, 3))
        assert chamfer_l1(a, b) == pytest.approx(brute_chamfer(a, b), abs=1e-12)

    def test_symmetric(self, rng):
        a = rng.normal(size=(50, 3))
        b = rng.normal(size=(70, 3))
        assert chamfer_l1(a, b) == pytest.approx(chamfer_l1(b, a), abs=1e-15)

    def test_empty_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            chamfer_l1(np.zeros((0, 3)), [[0, 0, 0]])

    def test_rigid_invariance(self, rng):
        from scipy.spatial.transform import Rotation

        a = rng.normal(size=(60, 3))
        b = rng.normal(size=(60, 3))
        rot = Rotation.from_rotvec([0.3, -0.2, 0.9]).as_matrix()
        shift = np.array([1.0, -2.0, 0.5])
        assert chamfer_l1(a @ rot.T + shift, b @ rot.T + shift) == pytest.approx(
            chamfer_l1(a, b), abs=1e-9
        )


class TestNormalConsistency:
    def test_identity_one(self, rng):
        a = rng.normal(size=(100, 3))
        n = rng.normal(size=(100, 3))
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        assert normal_consistency(a, n, a, n) == pytest.approx(1.0)

    def test_parallel_planes(self, rng):
        a = np.column_stack([rng.random(50), rng.random(50), np.zeros(50)])
        b = np.column_stack([rng.random(50), rng.random(50), np.ones(50)])
        nz = np.tile([0.0, 0.0, 1.0], (50, 1))
        assert normal_consistency(a, nz, b, nz) == pytest.approx(1.0)

    def test_orthogonal_normals_zero(self, rng):
        a = np.column_stack([rng.random(50), rng.random(50), np.zeros(50)])
        nz = np.tile([0.0, 0.0, 1.0], (50, 1))
        nx = np.tile([1.0, 0.0, 0.0], (50, 1))
        assert normal_consistency(a, nz, a, nx) == pytest.approx(0.0, abs=1e-6)

    def test_missing_normals(self, rng):
        a = rng.normal(size=(10, 3))
        with pytest.raises(ValueError, match="normals"):
            normal_consistency(a, None, a, None)

    def test_sign_insensitive(self, rng):
        a = rng.normal(size=(40, 3))
        n = rng.normal(size=(40, 3))
        n /= np.linalg.norm(n, axis=1, keepdims=True)
        assert normal_consistency(a, n, a, -n) == pytest.approx(1.0)


class TestFScore:
    def test_identity(self, rng):
        a = rng.normal(size=(100, 3))
        assert f_score(a, a) == 1.0

    def test_separated_clouds(self, rng):
        a = rng.normal(size=(50, 3)) * 0.001
        b = a + [10 * 0.01, 0, 0]
        assert f_score(a, b, tau=0.01) == 0.0

    def test_half_precision_full_recall(self):
        # half of A within tau of B, all of B within tau of A -> F = 2/3
        b = np.array([[0.0, 0.0, 0.0]])
        a = np.array([[0.0, 0.0, 0.0], [5.0, 0.0, 0.0]])
        f = f_score(a, b, tau=0.01)
        assert f == pytest.approx(2 * 0.5 * 1.0 / 1.5)

    def test_tau_positive(self, rng):
        a = rng.normal(size=(5, 3))
        with pytest.raises(ValueError):
            f_score(a, a, tau=0.0)
