"""Domain descriptions and 2D triangulations.

Three mesh families are produced here: polygonal disks (fan plus rings),
structured rectangles, and the unit square with a periodic lattice of
circular holes. All generators return validated, immutable meshes with
counter-clockwise triangles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence, Union

import numpy as np
from scipy.spatial import cKDTree

OUTER_TAG = 0
MIN_ANGLE_DEG = 20.0


class MeshError(ValueError):
    """Raised when a mesh violates one of its structural invariants."""


class DegenerateTriangleError(MeshError):
    def __init__(self, index: int, area: float):
        super().__init__(f"triangle {index} has non-positive signed area {area:.3e}")
        self.index = index
        self.area = area


# --------------------------------------------------------------------------
# domain descriptions


@dataclass(frozen=True)
class Ball:
    radius: float
    dim: int = 2

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError(f"ball radius must be positive, got {self.radius}")
        if self.dim < 2:
            raise ValueError(f"ball dimension must be >= 2, got {self.dim}")

    @property
    def measure(self) -> float:
        from .radial import unit_ball_volume

        return unit_ball_volume(self.dim) * self.radius**self.dim

    def ident(self) -> str:
        return f"ball(r={self.radius:g},d={self.dim})"


@dataclass(frozen=True)
class Rectangle:
    width: float
    height: float

    def __post_init__(self):
        if not (self.width > 0 and self.height > 0):
            raise ValueError(f"rectangle sides must be positive, got {self.width}x{self.height}")

    dim = 2

    @property
    def measure(self) -> float:
        return self.width * self.height

    def ident(self) -> str:
        return f"rect({self.width:g}x{self.height:g})"


@dataclass(frozen=True)
class PerforatedSquare:
    N: int
    k: float
    dim: int = 2

    def __post_init__(self):
        # raises on overlapping holes
        hole_radius(self.N, self.k, self.dim)

    @property
    def hole_radius(self) -> float:
        return hole_radius(self.N, self.k, self.dim)

    @property
    def measure(self) -> float:
        from .radial import unit_ball_volume

        d = self.dim
        return 1.0 - self.N**d * unit_ball_volume(d) * self.hole_radius**d

    def ident(self) -> str:
        return f"perforated(N={self.N},k={self.k:g},d={self.dim})"


@dataclass(frozen=True)
class DisjointUnion:
    parts: tuple

    def __post_init__(self):
        if len(self.parts) == 0:
            raise ValueError("a disjoint union needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))
        dims = {p.dim for p in self.parts}
        if len(dims) != 1:
            raise ValueError(f"parts of a disjoint union must share a dimension, got {sorted(dims)}")

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    @property
    def measure(self) -> float:
        return sum(p.measure for p in self.parts)

    def ident(self) -> str:
        return "union[" + "+".join(p.ident() for p in self.parts) + "]"


DomainSpec = Union[Ball, Rectangle, PerforatedSquare, DisjointUnion]


def hole_radius(N: int, k: float, d: int) -> float:
    """Radius ``k * N**(-d/(d-1))`` of the holes in the perforated cube.

    Raises ``ValueError`` when two neighbouring holes would touch, i.e. when
    ``2 r >= 1/N``.
    """
    if N < 1 or int(N) != N:
        raise ValueError(f"N must be a positive integer, got {N}")
    if not k > 0:
        raise ValueError(f"k must be positive, got {k}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    r = k * float(N) ** (-d / (d - 1))
    if 2.0 * r >= 1.0 / N:
        raise ValueError(
            f"holes of radius {r:.6g} do not fit in cells of side {1.0 / N:.6g} (N={N}, k={k}, d={d})"
        )
    return r


# --------------------------------------------------------------------------
# meshes


def _frozen(a, dtype):
    arr = np.ascontiguousarray(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Mesh:
    """Triangle mesh with tagged boundary edges.

    ``boundary_tags`` holds one integer per boundary edge: ``OUTER_TAG`` (0)
    for the outer boundary and ``1 + i`` for the i-th hole.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary_edges: np.ndarray
    boundary_tags: np.ndarray = field(default=None)

    def __post_init__(self):
        object.__setattr__(self, "vertices", _frozen(self.vertices, np.float64).reshape(-1, 2))
        object.__setattr__(self, "triangles", _frozen(self.triangles, np.int64).reshape(-1, 3))
        object.__setattr__(self, "boundary_edges", _frozen(self.boundary_edges, np.int64).reshape(-1, 2))
        tags = self.boundary_tags
        if tags is None:
            tags = np.zeros(len(self.boundary_edges), dtype=np.int64)
        object.__setattr__(self, "boundary_tags", _frozen(tags, np.int64))
        if len(self.boundary_tags) != len(self.boundary_edges):
            raise MeshError("boundary_tags and boundary_edges differ in length")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_triangles(self) -> int:
        return len(self.triangles)

    def boundary_vertices(self) -> np.ndarray:
        return np.unique(self.boundary_edges)

    def interior_vertices(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary_edges.ravel()] = False
        return np.flatnonzero(mask)

    def edges(self) -> np.ndarray:
        t = self.triangles
        e = np.concatenate([t[:, [0, 1]], t[:, [1, 2]], t[:, [2, 0]]])
        return np.unique(np.sort(e, axis=1), axis=0)

    def n_holes(self) -> int:
        return int(len(np.unique(self.boundary_tags[self.boundary_tags != OUTER_TAG])))

    def same_as(self, other: "Mesh") -> bool:
        return (
            np.array_equal(self.vertices, other.vertices)
            and np.array_equal(self.triangles, other.triangles)
            and np.array_equal(self.boundary_edges, other.boundary_edges)
            and np.array_equal(self.boundary_tags, other.boundary_tags)
        )


@dataclass(frozen=True)
class MeshStats:
    area: float
    perimeter: float
    h_max: float
    min_angle: float


def signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p0 = vertices[triangles[:, 0]]
    p1 = vertices[triangles[:, 1]]
    p2 = vertices[triangles[:, 2]]
    return 0.5 * ((p1[:, 0] - p0[:, 0]) * (p2[:, 1] - p0[:, 1]) - (p2[:, 0] - p0[:, 0]) * (p1[:, 1] - p0[:, 1]))


def triangle_angles(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    """Interior angles in degrees, shape (m, 3)."""
    p = vertices[triangles]
    out = np.empty(triangles.shape)
    for i in range(3):
        a = p[:, (i + 1) % 3] - p[:, i]
        b = p[:, (i + 2) % 3] - p[:, i]
        cross = a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0]
        dot = np.einsum("ij,ij->i", a, b)
        out[:, i] = np.degrees(np.arctan2(np.abs(cross), dot))
    return out


def mesh_stats(mesh: Mesh) -> MeshStats:
    areas = signed_areas(mesh.vertices, mesh.triangles)
    bad = np.flatnonzero(areas <= 0.0)
    if bad.size:
        raise DegenerateTriangleError(int(bad[0]), float(areas[bad[0]]))
    v = mesh.vertices
    be = mesh.boundary_edges
    perimeter = float(np.sum(np.hypot(*(v[be[:, 1]] - v[be[:, 0]]).T)))
    e = mesh.edges()
    h_max = float(np.max(np.hypot(*(v[e[:, 1]] - v[e[:, 0]]).T)))
    min_angle = float(triangle_angles(v, mesh.triangles).min())
    return MeshStats(area=float(areas.sum()), perimeter=perimeter, h_max=h_max, min_angle=min_angle)


def validate_mesh(mesh: Mesh, min_angle: float = MIN_ANGLE_DEG) -> MeshStats:
    """Check the structural invariants of ``mesh`` and return its stats.

    Raises ``MeshError`` (or ``DegenerateTriangleError``) with a diagnostic on
    the first violated invariant.
    """
    stats = mesh_stats(mesh)
    n = mesh.n_vertices
    tri = mesh.triangles
    if tri.min() < 0 or tri.max() >= n:
        raise MeshError("triangle references a vertex index out of range")

    all_edges = np.sort(np.concatenate([tri[:, [0, 1]], tri[:, [1, 2]], tri[:, [2, 0]]]), axis=1)
    uniq, counts = np.unique(all_edges, axis=0, return_counts=True)
    if counts.max() > 2:
        raise MeshError("an edge is shared by more than two triangles")
    free = {tuple(e) for e in uniq[counts == 1]}
    given = {tuple(e) for e in np.sort(mesh.boundary_edges, axis=1)}
    if len(given) != len(mesh.boundary_edges):
        raise MeshError("duplicate boundary edges")
    if free != given:
        missing = len(free - given)
        extra = len(given - free)
        raise MeshError(f"boundary edges do not match free triangle edges ({missing} missing, {extra} extra)")

    deg = np.bincount(mesh.boundary_edges.ravel(), minlength=n)
    if np.any((deg != 0) & (deg != 2)):
        raise MeshError("boundary edges do not form closed loops")

    tol = 1e-12 * stats.h_max
    pairs = cKDTree(mesh.vertices).query_pairs(tol)
    if pairs:
        i, j = next(iter(pairs))
        raise MeshError(f"duplicate vertices {i} and {j}")

    if stats.min_angle < min_angle:
        raise MeshError(f"minimum angle {stats.min_angle:.2f} deg is below the {min_angle:g} deg target")
    return stats


def _orient_ccw(vertices, triangles):
    tri = np.array(triangles, dtype=np.int64)
    flip = signed_areas(vertices, tri) < 0
    tri[flip] = tri[flip][:, [0, 2, 1]]
    return tri


def _zip_rings(inner_idx, inner_ang, outer_idx, outer_ang):
    """Triangulate the annulus between two closed vertex rings by angle order."""
    n_in, n_out = len(inner_idx), len(outer_idx)
    a = np.append(inner_ang, inner_ang[0] + 2 * np.pi)
    b = np.append(outer_ang, outer_ang[0] + 2 * np.pi)
    tris = []
    i = k = 0
    while i < n_in or k < n_out:
        if k == n_out or (i < n_in and a[i + 1] <= b[k + 1]):
            tris.append((inner_idx[i], outer_idx[k % n_out], inner_idx[(i + 1) % n_in]))
            i += 1
        else:
            tris.append((inner_idx[i % n_in], outer_idx[k], outer_idx[(k + 1) % n_out]))
            k += 1
    return tris


def make_disk_mesh(radius: float, n_boundary: int, n_rings: int) -> Mesh:
    """Fan-plus-rings triangulation of the inscribed regular ``n_boundary``-gon.

    Ring ``j`` (``1 <= j <= n_rings``) sits at radius ``radius*j/n_rings`` and
    carries about ``n_boundary*j/n_rings`` vertices; the outermost ring is the
    polygon boundary itself.
    """
    if n_boundary < 8:
        raise ValueError(f"n_boundary must be >= 8, got {n_boundary}")
    if n_rings < 2:
        raise ValueError(f"n_rings must be >= 2, got {n_rings}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")

    verts = [(0.0, 0.0)]
    rings = []
    for j in range(1, n_rings + 1):
        n_j = n_boundary if j == n_rings else max(4, int(round(n_boundary * j / n_rings)))
        ang = 2 * np.pi * np.arange(n_j) / n_j
        rho = radius * j / n_rings
        start = len(verts)
        verts.extend(zip(rho * np.cos(ang), rho * np.sin(ang)))
        rings.append((np.arange(start, start + n_j), ang))
    verts = np.array(verts)

    first_idx, _ = rings[0]
    tris = [(0, first_idx[i], first_idx[(i + 1) % len(first_idx)]) for i in range(len(first_idx))]
    for (ii, ia), (oi, oa) in zip(rings[:-1], rings[1:]):
        tris.extend(_zip_rings(ii, ia, oi, oa))

    bidx = rings[-1][0]
    bedges = np.column_stack([bidx, np.roll(bidx, -1)])
    mesh = Mesh(verts, _orient_ccw(verts, tris), bedges)
    validate_mesh(mesh)
    return mesh


def make_rect_mesh(width: float, height: float, nx: int, ny: int) -> Mesh:
    """Structured mesh of ``[0,width] x [0,height]`` with alternating diagonals."""
    if nx < 1 or ny < 1:
        raise ValueError(f"nx, ny must be >= 1, got {nx}, {ny}")
    if not (width > 0 and height > 0):
        raise ValueError("rectangle sides must be positive")
    xs = np.linspace(0.0, width, nx + 1)
    ys = np.linspace(0.0, height, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="xy")
    verts = np.column_stack([X.ravel(), Y.ravel()])

    def vid(i, j):
        return j * (nx + 1) + i

    tris = []
    for j in range(ny):
        for i in range(nx):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            if (i + j) % 2 == 0:
                tris += [(a, b, c), (a, c, d)]
            else:
                tris += [(a, b, d), (b, c, d)]

    loop = [vid(i, 0) for i in range(nx)]
    loop += [vid(nx, j) for j in range(ny)]
    loop += [vid(i, ny) for i in range(nx, 0, -1)]
    loop += [vid(0, j) for j in range(ny, 0, -1)]
    bedges = np.column_stack([loop, np.roll(loop, -1)])
    mesh = Mesh(verts, np.array(tris), bedges)
    validate_mesh(mesh)
    return mesh


def _perforated_cell(h: float, r: float, n: int):
    """Template cell ``[-h/2,h/2]^2`` minus a centred hole of radius ``r``.

    Rays at ``n`` angles (offset by pi/4 so the cell corners lie on rays) join
    the hole polygon to the cell boundary; radial layers are blended
    geometrically, which keeps the quads close to square from the small hole
    out to the cell edge.
    """
    theta = np.pi / 4 + 2 * np.pi * np.arange(n) / n
    c, s = np.cos(theta), np.sin(theta)
    outer_rho = 0.5 * h / np.maximum(np.abs(c), np.abs(s))
    layers = max(2, int(math.ceil(n * math.log(0.5 * h / r) / (2 * np.pi))))
    t = np.arange(layers + 1)[:, None] / layers
    rho = r ** (1 - t) * outer_rho[None, :] ** t
    pts = np.stack([rho * c[None, :], rho * s[None, :]], axis=-1)
    # outer ring: snap onto the square exactly
    outer = pts[-1]
    on_x = np.abs(np.abs(c)) >= np.abs(s) - 1e-15
    outer[on_x, 0] = np.sign(c[on_x]) * 0.5 * h
    on_y = np.abs(s) >= np.abs(c) - 1e-15
    outer[on_y, 1] = np.sign(s[on_y]) * 0.5 * h
    verts = pts.reshape(-1, 2)

    def vid(layer, i):
        return layer * n + (i % n)

    tris = []
    for L in range(layers):
        for i in range(n):
            a, b, cc, d = vid(L, i), vid(L, i + 1), vid(L + 1, i + 1), vid(L + 1, i)
            # split along the shorter diagonal
            if np.sum((verts[a] - verts[cc]) ** 2) <= np.sum((verts[b] - verts[d]) ** 2) * (1 - 1e-12):
                tris += [(a, b, cc), (a, cc, d)]
            else:
                tris += [(a, b, d), (b, cc, d)]
    hole = [vid(0, i) for i in range(n)]
    outer_ring = [vid(layers, i) for i in range(n)]
    return verts, np.array(tris), np.array(hole), np.array(outer_ring)


def make_perforated_square_mesh(N: int, k: float, cell_resolution: int, d: int = 2) -> Mesh:
    """Mesh of the unit square with ``N x N`` holes of radius ``k/N**2``.

    Each hole is a regular polygon with ``cell_resolution`` sides (a multiple of
    4, so that the cell corners are mesh vertices). Hole ``i`` (row-major over
    cells) carries boundary tag ``1 + i``; the outer square carries tag 0.
    """
    if d != 2:
        raise ValueError(f"perforated square meshes are 2D only, got d={d}")
    if cell_resolution < 8:
        raise ValueError(f"cell_resolution must be >= 8, got {cell_resolution}")
    if cell_resolution % 4:
        raise ValueError(f"cell_resolution must be a multiple of 4, got {cell_resolution}")
    r = hole_radius(N, k, 2)
    h = 1.0 / N
    n = cell_resolution
    cverts, ctris, chole, couter = _perforated_cell(h, r, n)
    nv = len(cverts)

    all_verts = []
    all_tris = []
    hole_edges = []
    hole_tags = []
    outer_rings = []
    for cy in range(N):
        for cx in range(N):
            cell = cy * N + cx
            off = cell * nv
            all_verts.append(cverts + ((cx + 0.5) * h, (cy + 0.5) * h))
            all_tris.append(ctris + off)
            ring = chole + off
            hole_edges.append(np.column_stack([ring, np.roll(ring, -1)]))
            hole_tags.append(np.full(n, 1 + cell))
            outer_rings.append(couter + off)
    verts = np.concatenate(all_verts)
    tris = np.concatenate(all_tris)

    # merge the vertices shared by neighbouring cells
    keys = np.round(verts / (h * 1e-9)).astype(np.int64)
    _, first, inverse = np.unique(keys, axis=0, return_index=True, return_inverse=True)
    inverse = inverse.ravel()
    order = np.argsort(first)
    remap = np.empty_like(order)
    remap[order] = np.arange(len(order))
    new_index = remap[inverse]
    verts = verts[first[order]]
    verts[np.abs(verts) < 1e-12] = 0.0
    verts[np.abs(verts - 1.0) < 1e-12] = 1.0
    tris = new_index[tris]

    hole_edges = new_index[np.concatenate(hole_edges)]
    hole_tags = np.concatenate(hole_tags)

    outer_edges = []
    for ring in outer_rings:
        ring = new_index[ring]
        for a, b in zip(ring, np.roll(ring, -1)):
            pa, pb = verts[a], verts[b]
            for ax in (0, 1):
                if (pa[ax] == pb[ax]) and pa[ax] in (0.0, 1.0):
                    outer_edges.append((a, b))
                    break
    outer_edges = np.array(outer_edges, dtype=np.int64)

    bedges = np.concatenate([outer_edges, hole_edges])
    tags = np.concatenate([np.full(len(outer_edges), OUTER_TAG), hole_tags])
    mesh = Mesh(verts, _orient_ccw(verts, tris), bedges, tags)
    validate_mesh(mesh)
    return mesh


def scale_mesh(mesh: Mesh, t: float) -> Mesh:
    if not t > 0:
        raise ValueError(f"scale factor must be positive, got {t}")
    if t == 1:
        return mesh
    return Mesh(mesh.vertices * t, mesh.triangles, mesh.boundary_edges, mesh.boundary_tags)


def mesh_for_domain(domain: DomainSpec, resolution: int = 64) -> Mesh:
    """Default FEM mesh for a connected 2D domain at a given resolution.

    ``resolution`` is the number of boundary segments of a disk, the number of
    cells along the longer side of a rectangle, or the hole polygon size of a
    perforated square.
    """
    if isinstance(domain, Ball):
        if domain.dim != 2:
            raise ValueError("FEM meshes are 2D only")
        return make_disk_mesh(domain.radius, resolution, max(2, int(round(resolution / (2 * np.pi)))))
    if isinstance(domain, Rectangle):
        long_side = max(domain.width, domain.height)
        nx = max(1, int(round(resolution * domain.width / long_side)))
        ny = max(1, int(round(resolution * domain.height / long_side)))
        return make_rect_mesh(domain.width, domain.height, nx, ny)
    if isinstance(domain, PerforatedSquare):
        return make_perforated_square_mesh(domain.N, domain.k, resolution, domain.dim)
    raise TypeError(f"no mesh generator for {type(domain).__name__}; disjoint unions are solved per part")


# --------------------------------------------------------------------------
# mesh text format


def write_mesh(mesh: Mesh, path) -> None:
    lines = [f"vertices {mesh.n_vertices}"]
    lines += [f"{x:.17g} {y:.17g}" for x, y in mesh.vertices]
    lines.append(f"triangles {mesh.n_triangles}")
    lines += [f"{i} {j} {k}" for i, j, k in mesh.triangles]
    lines.append(f"boundary {len(mesh.boundary_edges)}")
    lines += [f"{i} {j} {t}" for (i, j), t in zip(mesh.boundary_edges, mesh.boundary_tags)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_mesh(path) -> Mesh:
    lines = Path(path).read_text(encoding="utf-8").split("\n")
    pos = 0

    def section(name):
        nonlocal pos
        head = lines[pos].split()
        if len(head) != 2 or head[0] != name:
            raise MeshError(f"expected '{name} <count>' on line {pos + 1}, got {lines[pos]!r}")
        count = int(head[1])
        body = lines[pos + 1 : pos + 1 + count]
        pos += 1 + count
        return [ln.split() for ln in body]

    v = np.array(section("vertices"), dtype=np.float64).reshape(-1, 2)
    t = np.array(section("triangles"), dtype=np.int64).reshape(-1, 3)
    b = np.array(section("boundary"), dtype=np.int64).reshape(-1, 3)
    return Mesh(v, t, b[:, :2], b[:, 2])


def perimeter_of_inscribed_polygon(radius: float, n: int) -> float:
    return 2 * n * radius * math.sin(math.pi / n)


def area_of_inscribed_polygon(radius: float, n: int) -> float:
    return 0.5 * n * radius**2 * math.sin(2 * math.pi / n)


__all__: Sequence[str] = [
    "Ball",
    "Rectangle",
    "PerforatedSquare",
    "DisjointUnion",
    "DomainSpec",
    "Mesh",
    "MeshStats",
    "MeshError",
    "DegenerateTriangleError",
    "hole_radius",
    "make_disk_mesh",
    "make_rect_mesh",
    "make_perforated_square_mesh",
    "scale_mesh",
    "mesh_stats",
    "validate_mesh",
    "mesh_for_domain",
    "write_mesh",
    "read_mesh",
]
