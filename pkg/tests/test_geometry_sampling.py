import numpy as np
import pytest

from inrdiff.geometry import (
    TriMesh,
    sample_near_surface,
    sample_volume_points,
    surface_sample,
)


class TestVolumePoints:
    def test_bounds_and_count(self, rng):
        pts = sample_volume_points(20000, rng)
        assert pts.shape == (20000, 3)
        assert pts.min() >= -0.5 and pts.max() <= 0.5

    def test_deterministic(self):
        a = sample_volume_points(100, np.random.default_rng(7))
        b = sample_volume_points(100, np.random.default_rng(7))
        np.testing.assert_array_equal(a, b)

    def test_mean_clt_bound(self):
        # CLT: |mean| < 3*sigma/sqrt(n), sigma = 1/sqrt(12) ~ 0.2887
        n = 10**6
        pts = sample_volume_points(n, np.random.default_rng(0))
        bound = 3 * (1 / np.sqrt(12)) / np.sqrt(n)
        assert np.all(np.abs(pts.mean(axis=0)) < max(bound, 0.002))

    def test_n_positive(self, rng):
        with pytest.raises(ValueError):
            sample_volume_points(0, rng)


class TestSurfaceSample:
    def test_area_weighting_two_triangles(self):
        # unit square as two equal-area triangles: each gets 50% +- 1%
        m = TriMesh(
            [[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0]],
            [[0, 1, 2], [0, 2, 3]],
        )
        pts = surface_sample(m, 100_000, np.random.default_rng(3))
        # membership test: first triangle has x >= y
        frac = np.mean(pts[:, 0] >= pts[:, 1])
        assert abs(frac - 0.5) < 0.01

    def test_single_point_on_face_plane(self, small_sphere):
        pts, normals = surface_sample(small_sphere, 1, np.random.default_rng(0), return_normals=True)
        # distance along the face normal from any face's vertex must be ~0 for some face
        tri = small_sphere.triangles()
        n = small_sphere.face_normals()
        d = np.abs(np.einsum("fi,fi->f", n, pts[0] - tri[:, 0]))
        assert d.min() < 1e-9
        assert np.linalg.norm(normals[0]) == pytest.approx(1.0)

    def test_deterministic(self, small_sphere):
        a = surface_sample(small_sphere, 64, np.random.default_rng(5))
        b = surface_sample(small_sphere, 64, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_points_lie_on_surface(self, small_sphere, rng):
        pts = surface_sample(small_sphere, 500, rng)
        # every point within 1e-9 of some face plane and inside the sphere shell
        r = np.linalg.norm(pts, axis=1)
        assert np.all(r <= 0.4 + 1e-9)


class TestNearSurface:
    def test_radial_gaussian_band(self, sphere04):
        # 4-sigma band: >= 99% of points within |r - 0.4| < 0.08 for sigma 0.02
        pts = sample_near_surface(sphere04, 20000, 0.02, np.random.default_rng(11))
        r = np.linalg.norm(pts, axis=1)
        frac = np.mean(np.abs(r - 0.4) < 0.08)
        assert frac >= 0.99

    def test_sigma_to_zero_limit(self, small_sphere):
        pts = sample_near_surface(small_sphere, 2000, 1e-9, np.random.default_rng(2))
        # icosphere subdiv-2 faces are chords; allow facet depth plus 1e-6
        r = np.linalg.norm(pts, axis=1)
        assert np.all(r <= 0.4 + 1e-6)

    def test_clamped_to_unit_cube(self):
        from inrdiff.geometry import icosphere

        big = icosphere(2, 0.49)
        pts = sample_near_surface(big, 5000, 0.1, np.random.default_rng(4))
        assert pts.min() >= -0.5 and pts.max() <= 0.5

    def test_deterministic(self, small_sphere):
        a = sample_near_surface(small_sphere, 100, 0.02, np.random.default_rng(9))
        b = sample_near_surface(small_sphere, 100, 0.02, np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)

    def test_sigma_positive(self, small_sphere, rng):
        with pytest.raises(ValueError):
            sample_near_surface(small_sphere, 10, 0.0, rng)
