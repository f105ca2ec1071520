"""Analytic test solids: icosphere, box, ellipsoid.

These are the watertight fixtures used throughout the tests and demos;
an icosphere at subdivision ``n`` has exactly ``10 * 4**n + 2`` vertices
and ``20 * 4**n`` faces.
"""

from __future__ import annotations

import numpy as np

from .mesh import TriMesh

__all__ = ["icosphere", "box_mesh", "ellipsoid"]


def icosphere(subdivisions: int = 3, radius: float = 0.4, center=(0.0, 0.0, 0.0)) -> TriMesh:
    """Subdivided icosahedron projected onto a sphere."""
    phi = (1.0 + np.sqrt(5.0)) / 2.0
    verts = np.array(
        [
            [-1, phi, 0], [1, phi, 0], [-1, -phi, 0], [1, -phi, 0],
            [0, -1, phi], [0, 1, phi], [0, -1, -phi], [0, 1, -phi],
            [phi, 0, -1], [phi, 0, 1], [-phi, 0, -1], [-phi, 0, 1],
        ],
        dtype=np.float64,
    )
    verts /= np.linalg.norm(verts, axis=1, keepdims=True)
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    verts = [tuple(v) for v in verts]

    for _ in range(subdivisions):
        midpoint_cache: dict[tuple[int, int], int] = {}

        def midpoint(i, j):
            key = (i, j) if i < j else (j, i)
            if key in midpoint_cache:
                return midpoint_cache[key]
            m = np.array(verts[i]) + np.array(verts[j])
            m /= np.linalg.norm(m)
            verts.append(tuple(m))
            midpoint_cache[key] = len(verts) - 1
            return midpoint_cache[key]

        new_faces = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces

    v = np.array(verts) * radius + np.asarray(center, dtype=np.float64)
    return TriMesh(v, np.array(faces))


def box_mesh(center=(0.0, 0.0, 0.0), size=(0.5, 0.5, 0.5)) -> TriMesh:
    """Axis-aligned box as 12 outward-facing triangles."""
    c = np.asarray(center, dtype=np.float64)
    h = np.asarray(size, dtype=np.float64) / 2.0
    corners = np.array(
        [[sx, sy, sz] for sx in (-1, 1) for sy in (-1, 1) for sz in (-1, 1)],
        dtype=np.float64,
    )
    verts = c + corners * h
    # corner index bit layout: 4*(x>0) + 2*(y>0) + (z>0)
    faces = np.array(
        [
            (0, 1, 3), (0, 3, 2),  # -x
            (4, 6, 7), (4, 7, 5),  # +x
            (0, 4, 5), (0, 5, 1),  # -y
            (2, 3, 7), (2, 7, 6),  # +y
            (0, 2, 6), (0, 6, 4),  # -z
            (1, 5, 7), (1, 7, 3),  # +z
        ]
    )
    return TriMesh(verts, faces)


def ellipsoid(semi_axes=(0.4, 0.3, 0.2), center=(0.0, 0.0, 0.0), subdivisions: int = 3) -> TriMesh:
    """Axis-aligned ellipsoid by anisotropic scaling of a unit icosphere."""
    sphere = icosphere(subdivisions=subdivisions, radius=1.0)
    v = sphere.vertices * np.asarray(semi_axes, dtype=np.float64) + np.asarray(center)
    return TriMesh(v, sphere.faces)
