"""Indexed triangle meshes and mesh-quality analysis.

The :class:`TriMesh` is the unit of all geometry I/O in this library:
vertices are float64 ``(n, 3)`` coordinates in model space, faces are
int64 ``(m, 3)`` vertex-index triples with counter-clockwise orientation
seen from outside.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _cc

__all__ = [
    "TriMesh",
    "QaReport",
    "EmptyMeshError",
    "MeshParseError",
    "STATUS_DISPLAY",
    "normalize_to_unit_cube",
    "weld_vertices",
    "edge_face_incidence",
    "qa_report",
]

# Machine status names -> human-readable category labels used in reports.
STATUS_DISPLAY = {
    "Usable": "Usable",
    "NoFullShape": "No full shape",
    "NotUsable": "Not usable",
    "NotSure": "Not sure",
    "RequiresEditing": "Requires editing",
}


class EmptyMeshError(ValueError):
    """Raised when an operation receives a mesh with no vertices or faces."""


class MeshParseError(ValueError):
    """Raised when a mesh file cannot be parsed; carries file location info."""

    def __init__(self, message: str, path=None, line: int | None = None, offset: int | None = None):
        loc = str(path) if path is not None else "<mesh>"
        if line is not None:
            loc += f":{line}"
        if offset is not None:
            loc += f" (byte {offset})"
        super().__init__(f"{loc}: {message}")
        self.path = path
        self.line = line
        self.offset = offset


@dataclass
class TriMesh:
    """Indexed triangle surface."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        self.vertices = np.ascontiguousarray(self.vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.ascontiguousarray(self.faces, dtype=np.int64).reshape(-1, 3)

    # -- basic accessors -------------------------------------------------

    @property
    def n_vertices(self) -> int:
        return self.vertices.shape[0]

    @property
    def n_faces(self) -> int:
        return self.faces.shape[0]

    @property
    def is_empty(self) -> bool:
        return self.n_vertices == 0 or self.n_faces == 0

    def copy(self) -> "TriMesh":
        return TriMesh(self.vertices.copy(), self.faces.copy())

    def validate(self) -> None:
        """Check index bounds and face non-degeneracy; raise ValueError."""
        if self.n_faces and (self.faces.min() < 0 or self.faces.max() >= self.n_vertices):
            raise ValueError(
                f"face index out of range: max {self.faces.max()} with {self.n_vertices} vertices"
            )
        f = self.faces
        if f.size and (
            np.any(f[:, 0] == f[:, 1]) or np.any(f[:, 1] == f[:, 2]) or np.any(f[:, 0] == f[:, 2])
        ):
            bad = np.flatnonzero(
                (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
            )
            raise ValueError(f"degenerate face(s) with repeated vertex index: {bad[:8].tolist()}")

    # -- derived geometry ------------------------------------------------

    def triangles(self) -> np.ndarray:
        """Per-face vertex coordinates, shape (m, 3, 3)."""
        return self.vertices[self.faces]

    def bbox(self) -> tuple[np.ndarray, np.ndarray]:
        if self.n_vertices == 0:
            raise EmptyMeshError("bbox of empty mesh")
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    def face_cross(self) -> np.ndarray:
        """Unnormalized face normals cross(b-a, c-a); norm = 2*area."""
        t = self.triangles()
        return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_cross(), axis=1)

    def face_normals(self) -> np.ndarray:
        """Unit outward normals (CCW orientation convention)."""
        c = self.face_cross()
        n = np.linalg.norm(c, axis=1, keepdims=True)
        n[n == 0] = 1.0
        return c / n

    def surface_area(self) -> float:
        return float(self.face_areas().sum())

    def volume(self) -> float:
        """Signed enclosed volume via the divergence theorem.

        Positive for a closed mesh with outward CCW orientation.
        """
        t = self.triangles()
        return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)

    def vertex_normals(self) -> np.ndarray:
        """Area-weighted average of incident face normals, unit length.

        Vertices with no incident faces get a zero vector.
        """
        fn = self.face_cross()
        vn = np.zeros_like(self.vertices)
        for k in range(3):
            np.add.at(vn, self.faces[:, k], fn)
        norm = np.linalg.norm(vn, axis=1, keepdims=True)
        norm[norm == 0] = 1.0
        return vn / norm


def normalize_to_unit_cube(mesh: TriMesh, padding: float = 0.95) -> TriMesh:
    """Center the bbox at the origin and scale the longest axis to ``padding``.

    The output fits inside [-0.5, 0.5]^3 with the longest bounding-box
    axis spanning exactly ``padding`` (default 0.95, leaving a margin so
    downstream iso-surfaces stay off the evaluation-grid boundary).
    Aspect ratio is preserved.
    """
    if mesh.is_empty:
        raise EmptyMeshError("cannot normalize an empty mesh")
    lo, hi = mesh.bbox()
    extent = hi - lo
    longest = float(extent.max())
    if longest <= 0.0:
        raise ValueError("zero-extent mesh: all vertices identical")
    center = (lo + hi) / 2.0
    scale = padding / longest
    return TriMesh((mesh.vertices - center) * scale, mesh.faces.copy())


def weld_vertices(vertices: np.ndarray, faces: np.ndarray, tol: float = 1e-7):
    """Merge vertices closer than ``tol`` (grid quantization) and reindex faces.

    Returns (vertices, faces) with duplicate-free vertices in first-seen order.
    """
    vertices = np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    keys = np.round(vertices / tol).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    # keep first-seen order rather than lexicographic key order
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(order.size)
    return vertices[first[order]], rank[inverse][faces]


def edge_face_incidence(faces: np.ndarray):
    """Undirected edges and the number of faces incident to each.

    Returns (edges, counts): edges is (e, 2) with sorted vertex pairs.
    """
    faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    if faces.size == 0:
        return np.zeros((0, 2), dtype=np.int64), np.zeros(0, dtype=np.int64)
    raw = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
    raw.sort(axis=1)
    return np.unique(raw, axis=0, return_counts=True)


def _connected_component_count(mesh: TriMesh) -> int:
    """Components of the vertex graph induced by faces (isolated vertices count)."""
    n = mesh.n_vertices
    if n == 0:
        return 0
    if mesh.n_faces == 0:
        return n
    e = np.concatenate([mesh.faces[:, [0, 1]], mesh.faces[:, [1, 2]], mesh.faces[:, [2, 0]]])
    adj = coo_matrix((np.ones(len(e), dtype=np.int8), (e[:, 0], e[:, 1])), shape=(n, n))
    count, _ = _cc(adj, directed=False)
    return int(count)


def _duplicate_vertex_count(vertices: np.ndarray, tol: float = 1e-7) -> int:
    if len(vertices) == 0:
        return 0
    keys = np.round(np.asarray(vertices, dtype=np.float64) / tol).astype(np.int64)
    uniq = np.unique(keys, axis=0)
    return int(len(vertices) - len(uniq))


@dataclass
class QaReport:
    """Mesh-quality summary with a heuristic status suggestion."""

    boundary_edge_count: int
    connected_components: int
    watertight: bool
    bbox_extent: tuple[float, float, float]
    duplicate_vertex_count: int
    suggested_status: str
    reason: str | None = field(default=None)

    def to_json(self) -> str:
        d = {
            "boundary_edge_count": self.boundary_edge_count,
            "connected_components": self.connected_components,
            "watertight": self.watertight,
            "bbox_extent": list(self.bbox_extent),
            "duplicate_vertex_count": self.duplicate_vertex_count,
            "suggested_status": self.suggested_status,
        }
        if self.reason is not None:
            d["reason"] = self.reason
        return json.dumps(d, sort_keys=True)


def qa_report(mesh: TriMesh) -> QaReport:
    """Analyze a loaded mesh for the defects seen in segmentation exports.

    Boundary edges are edges whose face incidence differs from 2. The
    suggested status is a heuristic only: NotUsable when the mesh falls
    apart (components > 3) or more than 20% of edges are boundary,
    RequiresEditing for any smaller amount of boundary, Usable otherwise.
    NoFullShape and NotSure are human-only labels, never auto-suggested.
    """
    edges, counts = edge_face_incidence(mesh.faces)
    n_edges = len(edges)
    boundary = int(np.count_nonzero(counts != 2))
    watertight = n_edges > 0 and boundary == 0
    components = _connected_component_count(mesh)
    lo, hi = mesh.bbox()
    extent = tuple(float(x) for x in (hi - lo))

    ratio = boundary / n_edges if n_edges else 1.0
    if components > 3 or ratio > 0.2:
        status = "NotUsable"
    elif boundary > 0:
        status = "RequiresEditing"
    else:
        status = "Usable"
    return QaReport(
        boundary_edge_count=boundary,
        connected_components=components,
        watertight=watertight,
        bbox_extent=extent,
        duplicate_vertex_count=_duplicate_vertex_count(mesh.vertices),
        suggested_status=status,
    )
