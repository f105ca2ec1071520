"""Iso-surface extraction on regular occupancy grids (marching cubes).

Grids store scalar occupancy in ``values[ix, iy, iz]`` (C order, z
fastest in memory) at the lattice of ``resolution`` linspace points per
axis across ``extent``. The default extent is the unit cube itself:
normalization scales shapes to a longest axis of 0.95, so iso-surfaces
keep a 0.025 margin from the grid boundary and stay closed, while the
grid never leaves the region occupancy fields were trained on.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .mc_tables import EDGE_TABLE, TRI_COUNT, TRI_TABLE
from .mesh import TriMesh

__all__ = ["OccupancyGrid", "marching_cubes", "DEFAULT_EXTENT"]

DEFAULT_EXTENT = ((-0.5, -0.5, -0.5), (0.5, 0.5, 0.5))

# cube corner offsets in the Bourke convention (see mc_tables)
_CORNER_OFFSETS = np.array(
    [
        (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
        (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1),
    ],
    dtype=np.int64,
)
_EDGE_CORNERS = np.array(
    [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4), (0, 4), (1, 5), (2, 6), (3, 7)],
    dtype=np.int64,
)
# each cube edge is a lattice edge: base corner offset + axis
_EDGE_BASE = np.array(
    [
        (0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 0),
        (0, 0, 1), (1, 0, 1), (0, 1, 1), (0, 0, 1),
        (0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
    ],
    dtype=np.int64,
)
_EDGE_AXIS = np.array([0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2], dtype=np.int64)


@dataclass
class OccupancyGrid:
    """Scalar occupancy sampled on a regular lattice."""

    resolution: int
    values: np.ndarray
    extent: tuple = field(default=DEFAULT_EXTENT)

    def __post_init__(self):
        if self.resolution < 2:
            raise ValueError(f"grid resolution must be >= 2, got {self.resolution}")
        r = self.resolution
        self.values = np.asarray(self.values, dtype=np.float64).reshape(r, r, r)
        lo = np.asarray(self.extent[0], dtype=np.float64)
        hi = np.asarray(self.extent[1], dtype=np.float64)
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
            raise ValueError(f"invalid extent {self.extent}")
        self.extent = (tuple(lo), tuple(hi))

    def axes(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        lo, hi = self.extent
        r = self.resolution
        return tuple(np.linspace(lo[a], hi[a], r) for a in range(3))

    def lattice_points(self) -> np.ndarray:
        """All R^3 lattice coordinates, shape (R^3, 3), index order matching values.ravel()."""
        ax = self.axes()
        g = np.meshgrid(*ax, indexing="ij")
        return np.stack([a.ravel() for a in g], axis=1)


def marching_cubes(grid: OccupancyGrid, iso: float = 0.5) -> TriMesh:
    """Extract the iso-surface as a closed, outward-oriented triangle mesh.

    Uses the standard 256-case cube lookup with linear interpolation of
    crossing positions along lattice edges. Vertices on shared edges are
    emitted once, so the result is watertight whenever the iso-surface
    stays strictly inside the grid. A constant grid yields an empty mesh
    (with a warning).
    """
    r = grid.resolution
    vals = grid.values
    inside = vals > iso

    # 8-bit case code per cube, corner c contributing bit c
    codes = np.zeros((r - 1, r - 1, r - 1), dtype=np.uint8)
    for c, (dx, dy, dz) in enumerate(_CORNER_OFFSETS):
        codes |= (
            inside[dx : r - 1 + dx, dy : r - 1 + dy, dz : r - 1 + dz].astype(np.uint8) << c
        )

    active = np.flatnonzero((codes.ravel() != 0) & (codes.ravel() != 255))
    if active.size == 0:
        warnings.warn("no iso-crossing in grid; returning empty mesh", RuntimeWarning, stacklevel=2)
        return TriMesh(np.zeros((0, 3)), np.zeros((0, 3), dtype=np.int64))

    side = r - 1
    ci, rem = np.divmod(active, side * side)
    cj, ck = np.divmod(rem, side)
    cube_ijk = np.stack([ci, cj, ck], axis=1)
    cube_codes = codes.ravel()[active]

    # gather triangle edge ids: (n_active, 5, 3) with -1 padding removed by mask
    tri_edges = TRI_TABLE[cube_codes].reshape(-1, 5, 3)
    n_tris = TRI_COUNT[cube_codes].astype(np.int64)
    keep = np.arange(5)[None, :] < n_tris[:, None]
    cube_of_tri = np.repeat(np.arange(len(active)), n_tris)
    tri_local = tri_edges[keep].astype(np.int64)  # (T, 3) local edge ids

    # map (cube, local edge) -> global lattice edge key = axis*r^3 + linear(i,j,k)
    base = cube_ijk[cube_of_tri][:, None, :] + _EDGE_BASE[tri_local]
    axis = _EDGE_AXIS[tri_local]
    keys = axis * r**3 + (base[..., 0] * r + base[..., 1]) * r + base[..., 2]

    uniq_keys, faces_flat = np.unique(keys.ravel(), return_inverse=True)
    faces = faces_flat.reshape(-1, 3)

    # interpolate one vertex per unique lattice edge
    u_axis, u_lin = np.divmod(uniq_keys, r**3)
    ui, urem = np.divmod(u_lin, r * r)
    uj, uk = np.divmod(urem, r)
    p0 = np.stack([ui, uj, uk], axis=1)
    p1 = p0.copy()
    p1[np.arange(len(p1)), u_axis] += 1
    v0 = vals[p0[:, 0], p0[:, 1], p0[:, 2]]
    v1 = vals[p1[:, 0], p1[:, 1], p1[:, 2]]
    denom = v1 - v0
    t = np.where(np.abs(denom) > 1e-300, (iso - v0) / np.where(denom == 0, 1.0, denom), 0.5)
    t = np.clip(t, 0.0, 1.0)

    lo = np.asarray(grid.extent[0])
    hi = np.asarray(grid.extent[1])
    step = (hi - lo) / (r - 1)
    verts = lo + (p0 + t[:, None] * (p1 - p0)) * step

    # the Bourke tables with bit=inside(value>iso) triangulate clockwise
    # seen from outside; swap to CCW so normals point outward
    faces = faces[:, [0, 2, 1]]

    mesh = TriMesh(verts, faces)
    # drop zero-area faces produced when the iso-surface passes exactly
    # through a lattice point (two edge vertices coincide)
    f = mesh.faces
    degen = (f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])
    if degen.any():
        mesh = TriMesh(mesh.vertices, f[~degen])
    return mesh
