"""Mesh I/O, normalization, sampling, winding numbers, marching cubes, QA."""

from .marching import DEFAULT_EXTENT, OccupancyGrid, marching_cubes
from .mesh import (
    STATUS_DISPLAY,
    EmptyMeshError,
    MeshParseError,
    QaReport,
    TriMesh,
    edge_face_incidence,
    normalize_to_unit_cube,
    qa_report,
    weld_vertices,
)
from .meshio import load_mesh, load_obj, load_stl, save_obj
from .primitives import box_mesh, ellipsoid, icosphere
from .sampling import as_rng, sample_near_surface, sample_volume_points, surface_sample
from .winding import WindingTree, occupancy_labels, winding_number, winding_numbers

__all__ = [
    "DEFAULT_EXTENT",
    "OccupancyGrid",
    "marching_cubes",
    "STATUS_DISPLAY",
    "EmptyMeshError",
    "MeshParseError",
    "QaReport",
    "TriMesh",
    "edge_face_incidence",
    "normalize_to_unit_cube",
    "qa_report",
    "weld_vertices",
    "load_mesh",
    "load_obj",
    "load_stl",
    "save_obj",
    "box_mesh",
    "ellipsoid",
    "icosphere",
    "as_rng",
    "sample_near_surface",
    "sample_volume_points",
    "surface_sample",
    "WindingTree",
    "occupancy_labels",
    "winding_number",
    "winding_numbers",
]
