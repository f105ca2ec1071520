import numpy as np
import pytest

from inrdiff.geometry import TriMesh, icosphere


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def sphere04():
    """Icosphere radius 0.4, subdivision 4: 2562 vertices, 5120 faces."""
    return icosphere(4, 0.4)


@pytest.fixture(scope="session")
def small_sphere():
    """Cheap fixture for brute-force-heavy tests."""
    return icosphere(2, 0.4)


@pytest.fixture
def holed_sphere(small_sphere):
    """Icosphere with one face removed: 3 boundary edges."""
    return TriMesh(small_sphere.vertices.copy(), small_sphere.faces[1:].copy())


@pytest.fixture(scope="session")
def sphere_theta(small_sphere):
    """Flattened weights of a briefly fitted sphere INR (session-cached)."""
    from inrdiff.inr import FitConfig, fit_mlp
    from inrdiff.weightspace import flatten_params

    res = fit_mlp(
        small_sphere,
        FitConfig(epochs=120, volume_points=3000, surface_points=3000, minibatch=512, seed=5),
    )
    return flatten_params(res.params).astype(np.float64)
