"""Monte-Carlo volumetric intersection-over-union between watertight meshes."""

from __future__ import annotations

import numpy as np

from ..geometry import TriMesh, WindingTree, as_rng, winding_numbers
from ..geometry.winding import FAST_PATH_MIN_FACES, HAVE_NUMBA

__all__ = ["viou"]


def _inside(mesh: TriMesh, pts: np.ndarray) -> np.ndarray:
    if HAVE_NUMBA and mesh.n_faces >= FAST_PATH_MIN_FACES:
        w = WindingTree(mesh).query(pts)
    else:
        w = winding_numbers(mesh, pts)
    return w > 0.5


def viou(mesh_a: TriMesh, mesh_b: TriMesh, n_samples: int = 100_000, rng=0) -> float:
    """IoU of the enclosed volumes, sampled uniformly over the joint bbox.

    Inside tests use winding numbers, so both meshes should be closed.
    Raises when neither mesh occupies any sample (IoU undefined).
    """
    if mesh_a.is_empty or mesh_b.is_empty:
        raise ValueError("viou needs two non-empty meshes")
    rng = as_rng(rng)
    lo_a, hi_a = mesh_a.bbox()
    lo_b, hi_b = mesh_b.bbox()
    lo = np.minimum(lo_a, lo_b)
    hi = np.maximum(hi_a, hi_b)
    pts = rng.uniform(lo, hi, size=(n_samples, 3))
    in_a = _inside(mesh_a, pts)
    in_b = _inside(mesh_b, pts)
    union = np.count_nonzero(in_a | in_b)
    if union == 0:
        raise ValueError("both meshes empty over the sampled box; IoU undefined")
    return float(np.count_nonzero(in_a & in_b) / union)
