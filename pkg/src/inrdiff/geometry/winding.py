"""Generalized winding numbers: robust inside/outside tests for closed meshes.

The reference implementation sums the exact signed solid angle of every
triangle (Van Oosterom & Strackee 1983): w(q) = (1/4pi) * sum_f Omega_f(q).
For a closed, consistently oriented mesh w is ~1 inside and ~0 outside.

Batch queries against large meshes go through an axis-aligned-box
hierarchy whose far field is an area-weighted dipole per node; the
opening criterion is conservative enough that the accelerated result
agrees with the exact sum within 1e-4 (asserted in the test suite).
Both paths accumulate faces in a fixed order, so results are
deterministic and reruns are bitwise identical.
"""

from __future__ import annotations

import numpy as np

from .mesh import EmptyMeshError, TriMesh

try:  # numba is optional at runtime; the numpy path is the fallback
    import numba
    from numba import njit, prange

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap

    prange = range

__all__ = ["winding_number", "winding_numbers", "occupancy_labels", "WindingTree", "HAVE_NUMBA"]

# far-field acceptance: the second-order expansion truncates with error
# ~ area * radius^3 / (4 pi d^5); a node is accepted when that bound is
# below NODE_ERROR_BUDGET (and d > MIN_BETA * radius keeps the series in
# its convergent regime). The budget is set so the worst-case sum across
# a traversal stays well under the 1e-4 agreement bar (asserted in tests).
NODE_ERROR_BUDGET = 2e-6
MIN_BETA = 1.5

# switch the batch path onto the hierarchy above this face count
FAST_PATH_MIN_FACES = 2000


def _winding_exact_numpy(tri: np.ndarray, points: np.ndarray, chunk: int = 4_000_000) -> np.ndarray:
    """Exact solid-angle sum, vectorized over (point, face) pairs in chunks."""
    n, f = len(points), len(tri)
    out = np.zeros(n, dtype=np.float64)
    if f == 0 or n == 0:
        return out
    rows_per_chunk = max(1, chunk // max(f, 1))
    for start in range(0, n, rows_per_chunk):
        p = points[start : start + rows_per_chunk]
        a = tri[None, :, 0, :] - p[:, None, :]
        b = tri[None, :, 1, :] - p[:, None, :]
        c = tri[None, :, 2, :] - p[:, None, :]
        la = np.linalg.norm(a, axis=2)
        lb = np.linalg.norm(b, axis=2)
        lc = np.linalg.norm(c, axis=2)
        det = np.einsum("pfi,pfi->pf", a, np.cross(b, c))
        den = (
            la * lb * lc
            + np.einsum("pfi,pfi->pf", a, b) * lc
            + np.einsum("pfi,pfi->pf", b, c) * la
            + np.einsum("pfi,pfi->pf", c, a) * lb
        )
        out[start : start + rows_per_chunk] = 2.0 * np.arctan2(det, den).sum(axis=1)
    return out / (4.0 * np.pi)


if HAVE_NUMBA:

    @njit(cache=True)
    def _solid_angle_sum(tri, lo, hi, px, py, pz):
        """Sum of signed solid angles of triangles tri[lo:hi] seen from p."""
        acc = 0.0
        for f in range(lo, hi):
            ax = tri[f, 0, 0] - px
            ay = tri[f, 0, 1] - py
            az = tri[f, 0, 2] - pz
            bx = tri[f, 1, 0] - px
            by = tri[f, 1, 1] - py
            bz = tri[f, 1, 2] - pz
            cx = tri[f, 2, 0] - px
            cy = tri[f, 2, 1] - py
            cz = tri[f, 2, 2] - pz
            la = np.sqrt(ax * ax + ay * ay + az * az)
            lb = np.sqrt(bx * bx + by * by + bz * bz)
            lc = np.sqrt(cx * cx + cy * cy + cz * cz)
            det = (
                ax * (by * cz - bz * cy)
                - ay * (bx * cz - bz * cx)
                + az * (bx * cy - by * cx)
            )
            den = (
                la * lb * lc
                + (ax * bx + ay * by + az * bz) * lc
                + (bx * cx + by * cy + bz * cz) * la
                + (cx * ax + cy * ay + cz * az) * lb
            )
            acc += 2.0 * np.arctan2(det, den)
        return acc

    @njit(cache=True)
    def _winding_exact_numba(tri, points, out):
        for i in prange(points.shape[0]):
            out[i] = _solid_angle_sum(tri, 0, tri.shape[0], points[i, 0], points[i, 1], points[i, 2]) / (
                4.0 * np.pi
            )
        return out

    @njit(cache=True)
    def _winding_tree_numba(
        tri, left, right, tri_lo, tri_hi, center, m0, m1, m2, radius, area, points, out, budget
    ):
        # far field: Taylor expansion of G(x) = (x - q)/|x - q|^3 around the
        # node centroid up to second order; m0/m1/m2 are the area-weighted
        # normal moments sum(a_i n_i), sum(a_i n_i d_i^T), sum(a_i n_i d_i d_i^T)
        n_nodes = left.shape[0]
        stack = np.empty(n_nodes + 1, dtype=np.int64)
        for i in range(points.shape[0]):
            px, py, pz = points[i, 0], points[i, 1], points[i, 2]
            acc = 0.0
            top = 0
            stack[0] = 0
            while top >= 0:
                node = stack[top]
                top -= 1
                rx = center[node, 0] - px
                ry = center[node, 1] - py
                rz = center[node, 2] - pz
                d2 = rx * rx + ry * ry + rz * rz
                rad = radius[node]
                d = np.sqrt(d2)
                d3 = d2 * d
                d5 = d3 * d2
                if (
                    d > MIN_BETA * rad
                    and area[node] * rad * rad * rad < budget * (4.0 * np.pi) * d5
                ):
                    d7 = d5 * d2
                    # zeroth order: m0 . r / d^3
                    term = (m0[node, 0] * rx + m0[node, 1] * ry + m0[node, 2] * rz) / d3
                    # first order: tr(M1)/d^3 - 3 r^T M1 r / d^5
                    tr1 = m1[node, 0, 0] + m1[node, 1, 1] + m1[node, 2, 2]
                    rm1r = (
                        rx * (m1[node, 0, 0] * rx + m1[node, 0, 1] * ry + m1[node, 0, 2] * rz)
                        + ry * (m1[node, 1, 0] * rx + m1[node, 1, 1] * ry + m1[node, 1, 2] * rz)
                        + rz * (m1[node, 2, 0] * rx + m1[node, 2, 1] * ry + m1[node, 2, 2] * rz)
                    )
                    term += tr1 / d3 - 3.0 * rm1r / d5
                    # second order: -3(2 u.r + t.r)/(2 d^5) + 15 rrr:M2/(2 d^7)
                    ux = m2[node, 0, 0, 0] + m2[node, 1, 1, 0] + m2[node, 2, 2, 0]
                    uy = m2[node, 0, 0, 1] + m2[node, 1, 1, 1] + m2[node, 2, 2, 1]
                    uz = m2[node, 0, 0, 2] + m2[node, 1, 1, 2] + m2[node, 2, 2, 2]
                    tx = m2[node, 0, 0, 0] + m2[node, 0, 1, 1] + m2[node, 0, 2, 2]
                    ty = m2[node, 1, 0, 0] + m2[node, 1, 1, 1] + m2[node, 1, 2, 2]
                    tz = m2[node, 2, 0, 0] + m2[node, 2, 1, 1] + m2[node, 2, 2, 2]
                    ur = ux * rx + uy * ry + uz * rz
                    tr_ = tx * rx + ty * ry + tz * rz
                    triple = 0.0
                    rv = (rx, ry, rz)
                    for a in range(3):
                        s = 0.0
                        for b in range(3):
                            for c in range(3):
                                s += m2[node, a, b, c] * rv[b] * rv[c]
                        triple += rv[a] * s
                    term += -1.5 * (2.0 * ur + tr_) / d5 + 7.5 * triple / d7
                    acc += term
                elif left[node] < 0:
                    acc += _solid_angle_sum(tri, tri_lo[node], tri_hi[node], px, py, pz)
                else:
                    top += 1
                    stack[top] = left[node]
                    top += 1
                    stack[top] = right[node]
            out[i] = acc / (4.0 * np.pi)
        return out


class WindingTree:
    """Median-split AABB hierarchy over triangles with dipole far fields.

    Nodes store the area-weighted centroid, the aggregated area-weighted
    normal (dipole moment: the solid angle of a far patch is
    m . (c - q) / |c - q|^3), and a bounding radius around the centroid.
    """

    def __init__(self, mesh: TriMesh, leaf_size: int = 16):
        tri = mesh.triangles()
        cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
        centroids = tri.mean(axis=1)

        order = np.arange(len(tri))
        left, right, tri_lo, tri_hi = [], [], [], []
        center, dipole, radius = [], [], []

        # iterative build; children are appended after their parent so
        # node 0 is the root
        stack = [(0, len(tri), -1, False)]
        spans: list[tuple[int, int]] = []
        while stack:
            lo, hi, parent, is_right = stack.pop()
            node = len(left)
            if parent >= 0:
                if is_right:
                    right[parent] = node
                else:
                    left[parent] = node
            left.append(-1)
            right.append(-1)
            tri_lo.append(lo)
            tri_hi.append(hi)
            spans.append((lo, hi))
            center.append(np.zeros(3))
            dipole.append(np.zeros(3))
            radius.append(0.0)
            if hi - lo > leaf_size:
                sub = order[lo:hi]
                cen = centroids[sub]
                axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
                mid = (hi - lo) // 2
                part = np.argpartition(cen[:, axis], mid)
                order[lo:hi] = sub[part]
                stack.append((lo, lo + mid, node, False))
                stack.append((lo + mid, hi, node, True))

        tri_sorted = np.ascontiguousarray(tri[order])
        cross_sorted = cross[order]
        areas = 0.5 * np.linalg.norm(cross_sorted, axis=1)
        tri_centroids = tri_sorted.mean(axis=1)

        self.tri = tri_sorted
        self.left = np.array(left, dtype=np.int64)
        self.right = np.array(right, dtype=np.int64)
        self.tri_lo = np.array(tri_lo, dtype=np.int64)
        self.tri_hi = np.array(tri_hi, dtype=np.int64)
        n_nodes = len(left)
        self.center = np.zeros((n_nodes, 3))
        self.m0 = np.zeros((n_nodes, 3))
        self.m1 = np.zeros((n_nodes, 3, 3))
        self.m2 = np.zeros((n_nodes, 3, 3, 3))
        self.radius = np.zeros(n_nodes)
        self.area = np.zeros(n_nodes)
        for node, (lo, hi) in enumerate(spans):
            a = areas[lo:hi]
            w = a.sum()
            if w > 0:
                c = (tri_centroids[lo:hi] * a[:, None]).sum(axis=0) / w
            else:
                c = tri_centroids[lo:hi].mean(axis=0)
            an = 0.5 * cross_sorted[lo:hi]  # area-weighted normals
            delta = tri_centroids[lo:hi] - c
            self.center[node] = c
            self.m0[node] = an.sum(axis=0)
            self.m1[node] = np.einsum("ia,ib->ab", an, delta)
            # second area moment: centroid-offset outer products plus each
            # triangle's own central covariance (x = v0 + u e1 + v e2 with
            # Var(u) = Var(v) = 1/18, Cov(u, v) = -1/36 under uniform area)
            e1 = tri_sorted[lo:hi, 1] - tri_sorted[lo:hi, 0]
            e2 = tri_sorted[lo:hi, 2] - tri_sorted[lo:hi, 0]
            cov = (
                (np.einsum("ib,ic->ibc", e1, e1) + np.einsum("ib,ic->ibc", e2, e2)) / 18.0
                - (np.einsum("ib,ic->ibc", e1, e2) + np.einsum("ib,ic->ibc", e2, e1)) / 36.0
            )
            self.m2[node] = np.einsum("ia,ib,ic->abc", an, delta, delta) + np.einsum(
                "ia,ibc->abc", an, cov
            )
            self.radius[node] = np.sqrt(((tri_sorted[lo:hi] - c) ** 2).sum(axis=2).max())
            self.area[node] = a.sum()

    def query(self, points: np.ndarray, budget: float = NODE_ERROR_BUDGET) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
        out = np.empty(len(points), dtype=np.float64)
        if not HAVE_NUMBA:  # pragma: no cover - exercised only without numba
            return _winding_exact_numpy(self.tri, points)
        return _winding_tree_numba(
            self.tri,
            self.left,
            self.right,
            self.tri_lo,
            self.tri_hi,
            self.center,
            self.m0,
            self.m1,
            self.m2,
            self.radius,
            self.area,
            points,
            out,
            budget,
        )


def winding_number(mesh: TriMesh, point) -> float:
    """Exact generalized winding number of one point."""
    if mesh.is_empty:
        raise EmptyMeshError("winding number of empty mesh")
    p = np.asarray(point, dtype=np.float64).reshape(1, 3)
    return float(_winding_exact_numpy(mesh.triangles(), p)[0])


def winding_numbers(mesh: TriMesh, points, method: str = "auto", tree: WindingTree | None = None) -> np.ndarray:
    """Batch winding numbers, ordered by input index.

    method "exact" forces the per-triangle sum; "fast" forces the
    hierarchy; "auto" picks the hierarchy for large meshes when numba
    is available. A prebuilt ``tree`` may be passed to amortize
    construction over several batches.
    """
    if mesh.is_empty:
        raise EmptyMeshError("winding numbers of empty mesh")
    points = np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 3)
    if method not in ("auto", "exact", "fast"):
        raise ValueError(f"unknown method {method!r}")
    use_fast = method == "fast" or (
        method == "auto" and HAVE_NUMBA and mesh.n_faces >= FAST_PATH_MIN_FACES
    )
    if use_fast:
        if tree is None:
            tree = WindingTree(mesh)
        return tree.query(points)
    tri = np.ascontiguousarray(mesh.triangles())
    if HAVE_NUMBA and len(points) * len(tri) > 200_000:
        out = np.empty(len(points), dtype=np.float64)
        return _winding_exact_numba(tri, points, out)
    return _winding_exact_numpy(tri, points)


def occupancy_labels(mesh: TriMesh, points, method: str = "auto", warn_non_watertight: bool = True) -> np.ndarray:
    """Ground-truth occupancy bits: 1 where the winding number exceeds 0.5.

    Non-watertight input degrades gracefully (winding numbers become
    fractional near defects); a warning is recorded so callers can flag
    the shape.
    """
    if warn_non_watertight:
        from .mesh import qa_report

        if not qa_report(mesh).watertight:
            import warnings

            warnings.warn(
                "occupancy labels requested for a non-watertight mesh; "
                "winding numbers degrade gracefully but labels may be noisy near defects",
                RuntimeWarning,
                stacklevel=2,
            )
    w = winding_numbers(mesh, points, method=method)
    return (w > 0.5).astype(np.int8)
