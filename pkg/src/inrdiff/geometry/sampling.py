"""Seeded point sampling: uniform volume, area-weighted surface, near-surface.

Every sampler is a pure function of its inputs and the random generator
state, so identical seeds give identical points. Draw order is part of
the contract and never reordered.
"""

from __future__ import annotations

import numpy as np

from .mesh import EmptyMeshError, TriMesh

__all__ = ["as_rng", "sample_volume_points", "surface_sample", "sample_near_surface"]

UNIT_CUBE = (-0.5, 0.5)


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator or an int seed."""
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_volume_points(n: int, rng, low: float = UNIT_CUBE[0], high: float = UNIT_CUBE[1]) -> np.ndarray:
    """n i.i.d. uniform points in [low, high]^3."""
    if n <= 0:
        raise ValueError(f"need n > 0, got {n}")
    return as_rng(rng).uniform(low, high, size=(n, 3))


def surface_sample(mesh: TriMesh, n: int, rng, return_normals=False):
    """n area-weighted uniform points on the surface.

    Draws, in order: face picks (one uniform per point against the
    cumulative area), then a (n, 2) block of barycentric uniforms.
    ``return_normals`` may be True/"face" (unit face normals) or
    "vertex" (barycentric-interpolated vertex normals, the smooth-surface
    estimate used by the reconstruction-metric protocol).
    """
    if mesh.is_empty:
        raise EmptyMeshError("cannot sample an empty mesh")
    if n <= 0:
        raise ValueError(f"need n > 0, got {n}")
    rng = as_rng(rng)
    areas = mesh.face_areas()
    total = areas.sum()
    if total <= 0:
        raise ValueError("mesh has zero surface area")
    cum = np.cumsum(areas)
    picks = np.searchsorted(cum, rng.random(n) * total, side="right")
    picks = np.minimum(picks, len(areas) - 1)

    uv = rng.random((n, 2))
    flip = uv.sum(axis=1) > 1.0
    uv[flip] = 1.0 - uv[flip]
    tri = mesh.triangles()[picks]
    pts = tri[:, 0] + uv[:, :1] * (tri[:, 1] - tri[:, 0]) + uv[:, 1:] * (tri[:, 2] - tri[:, 0])
    if not return_normals:
        return pts
    if return_normals == "vertex":
        vn = mesh.vertex_normals()[mesh.faces[picks]]  # (n, 3, 3)
        w = np.column_stack([1.0 - uv.sum(axis=1), uv[:, 0], uv[:, 1]])
        normals = (vn * w[:, :, None]).sum(axis=1)
        norm = np.linalg.norm(normals, axis=1, keepdims=True)
        norm[norm == 0] = 1.0
        return pts, normals / norm
    return pts, mesh.face_normals()[picks]


def sample_near_surface(mesh: TriMesh, n: int, sigma: float, rng) -> np.ndarray:
    """Surface samples plus isotropic N(0, sigma^2) offsets, clamped to the unit cube."""
    if sigma <= 0:
        raise ValueError(f"need sigma > 0, got {sigma}")
    rng = as_rng(rng)
    pts = surface_sample(mesh, n, rng)
    pts = pts + rng.normal(0.0, sigma, size=(n, 3))
    return np.clip(pts, UNIT_CUBE[0], UNIT_CUBE[1])
