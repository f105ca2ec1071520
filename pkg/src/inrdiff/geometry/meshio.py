"""OBJ and binary-STL readers, OBJ writer.

OBJ support is deliberately narrow: ``v x y z`` and (1-based) ``f i j k``
records; anything else is skipped. Faces with more than three corners are
fan-triangulated. Binary STL follows the classic layout (80-byte header,
little-endian u32 triangle count, 50-byte records); duplicate vertices
are welded within 1e-7 on load so STL input becomes an indexed mesh.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .mesh import EmptyMeshError, MeshParseError, TriMesh, weld_vertices

__all__ = ["load_mesh", "load_obj", "load_stl", "save_obj"]

_STL_WELD_TOL = 1e-7


def load_mesh(path) -> TriMesh:
    """Load an OBJ or binary-STL file into a validated TriMesh."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    suffix = path.suffix.lower()
    if suffix == ".obj":
        return load_obj(path)
    if suffix == ".stl":
        return load_stl(path)
    raise MeshParseError(f"unsupported mesh format {suffix!r} (expected .obj or .stl)", path)


def _parse_face_index(token: str, n_vertices: int, path, line_no: int) -> int:
    head = token.split("/", 1)[0]
    try:
        idx = int(head)
    except ValueError:
        raise MeshParseError(f"bad face index {token!r}", path, line=line_no) from None
    if idx <= 0:
        raise MeshParseError(
            f"face index {idx} out of range (OBJ indices are 1-based)", path, line=line_no
        )
    if idx > n_vertices:
        raise MeshParseError(
            f"face index {idx} exceeds vertex count {n_vertices}", path, line=line_no
        )
    return idx - 1


def load_obj(path) -> TriMesh:
    path = Path(path)
    vertices: list[tuple[float, float, float]] = []
    faces: list[tuple[int, int, int]] = []
    with open(path, "r", encoding="utf-8", errors="replace") as fh:
        for line_no, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts or parts[0].startswith("#"):
                continue
            tag = parts[0]
            if tag == "v":
                if len(parts) < 4:
                    raise MeshParseError("vertex record needs 3 coordinates", path, line=line_no)
                try:
                    vertices.append((float(parts[1]), float(parts[2]), float(parts[3])))
                except ValueError:
                    raise MeshParseError("non-numeric vertex coordinate", path, line=line_no) from None
            elif tag == "f":
                corners = [_parse_face_index(t, len(vertices), path, line_no) for t in parts[1:]]
                if len(corners) < 3:
                    raise MeshParseError("face record needs at least 3 indices", path, line=line_no)
                for k in range(1, len(corners) - 1):
                    faces.append((corners[0], corners[k], corners[k + 1]))
            # all other record types (vn, vt, o, g, s, usemtl, ...) are ignored
    if not vertices or not faces:
        raise EmptyMeshError(f"{path}: mesh has no {'vertices' if not vertices else 'faces'}")
    mesh = TriMesh(np.array(vertices), np.array(faces))
    mesh.validate()
    return mesh


def load_stl(path) -> TriMesh:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < 84:
        raise MeshParseError("file too short for binary STL", path, offset=len(blob))
    (count,) = struct.unpack_from("<I", blob, 80)
    expected = 84 + 50 * count
    if len(blob) != expected:
        raise MeshParseError(
            f"binary STL size mismatch: header says {count} triangles "
            f"({expected} bytes) but file has {len(blob)} bytes",
            path,
            offset=80,
        )
    if count == 0:
        raise EmptyMeshError(f"{path}: STL contains no triangles")
    records = np.frombuffer(blob, dtype=np.uint8, offset=84).reshape(count, 50)
    tris = (
        records[:, 12:48]
        .view("<f4")
        .reshape(count, 3, 3)
        .astype(np.float64)
    )
    if not np.all(np.isfinite(tris)):
        bad = int(np.flatnonzero(~np.isfinite(tris).all(axis=(1, 2)))[0])
        raise MeshParseError("non-finite vertex coordinate", path, offset=84 + 50 * bad)
    flat = tris.reshape(-1, 3)
    faces = np.arange(len(flat), dtype=np.int64).reshape(-1, 3)
    v, f = weld_vertices(flat, faces, tol=_STL_WELD_TOL)
    mesh = TriMesh(v, f)
    mesh.validate()
    return mesh


def save_obj(mesh: TriMesh, path) -> None:
    """Write vertices/faces as ASCII OBJ (deterministic %.9g formatting)."""
    path = Path(path)
    lines = []
    for x, y, z in mesh.vertices:
        lines.append(f"v {x:.9g} {y:.9g} {z:.9g}")
    for a, b, c in mesh.faces + 1:
        lines.append(f"f {a} {b} {c}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
