"""Oriented simplicial meshes of the supported flat domains.

Conventions:
* top-dimensional simplices are stored positively oriented (2D: CCW vertex
  order, checked by determinant after index sort; 1D: edges follow the
  coordinate/cycle direction);
* lower simplices are stored with increasing vertex indices;
* incidence matrices are exact integer sparse matrices with D_{p+1} D_p = 0;
* boundary markers are derived from facet adjacency and are closed under
  taking faces;
* periodic domains (circle, flat torus) keep coordinates in the fundamental
  cell; per-element coordinates are unwrapped so element geometry is correct
  across the seam.

Curved boundaries (disk, annulus) place boundary vertices exactly on the
analytic curve, and refinement re-snaps the new boundary vertices.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sparse

from .domains import DomainSpec, DomainValidationError

__all__ = [
    "SimplicialComplex",
    "BoundaryGeometry",
    "generate_mesh",
    "refine",
    "incidence_matrix",
    "boundary_geometry",
    "ear_clip_triangulation",
    "read_off",
    "write_off",
]


@dataclass
class SimplicialComplex:
    dim: int
    vertex_coords: np.ndarray              # (nv, n)
    simplices: dict                        # p -> (ns, p+1) int array
    boundary_marker: dict = field(default_factory=dict)  # p -> bool array
    mesh_size_h: float = 0.0
    spec: DomainSpec | None = None
    periodic_lengths: tuple | None = None  # per-axis period or None

    def __post_init__(self):
        self.vertex_coords = np.asarray(self.vertex_coords, dtype=float)
        if 0 not in self.simplices:
            self.simplices[0] = np.arange(self.vertex_coords.shape[0])[:, None]
        for p in self.simplices:
            self.simplices[p] = np.asarray(self.simplices[p], dtype=int)
        if not self.boundary_marker:
            self._derive_boundary_markers()
        if self.mesh_size_h == 0.0:
            self.mesh_size_h = float(self.edge_lengths().max())

    # -- basic accessors -----------------------------------------------------
    @property
    def n(self) -> int:
        return self.vertex_coords.shape[1]

    def num(self, p: int) -> int:
        return self.simplices[p].shape[0]

    def element_coords(self, p: int) -> np.ndarray:
        """Per-simplex vertex coordinates, unwrapped across periodic seams."""
        coords = self.vertex_coords[self.simplices[p]]
        if self.periodic_lengths is None:
            return coords
        out = coords.copy()
        for ax, L in enumerate(self.periodic_lengths):
            if L is None:
                continue
            anchor = out[:, :1, ax]
            delta = out[:, :, ax] - anchor
            delta -= L * np.round(delta / L)
            out[:, :, ax] = anchor + delta
        return out

    def edge_lengths(self) -> np.ndarray:
        ec = self.element_coords(1)
        return np.linalg.norm(ec[:, 1, :] - ec[:, 0, :], axis=1)

    def top_volumes(self, signed: bool = False) -> np.ndarray:
        """Lengths (1D) or areas (2D) of top simplices."""
        ec = self.element_coords(self.dim)
        if self.dim == 1:
            v = ec[:, 1, 0] - ec[:, 0, 0]
            return v if signed else np.abs(v)
        a = ec[:, 1, :] - ec[:, 0, :]
        b = ec[:, 2, :] - ec[:, 0, :]
        v = 0.5 * (a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])
        return v if signed else np.abs(v)

    def _derive_boundary_markers(self):
        nv = self.vertex_coords.shape[0]
        if self.dim == 1:
            deg = np.zeros(nv, dtype=int)
            for (a, b) in self.simplices[1]:
                deg[a] += 1
                deg[b] += 1
            self.boundary_marker = {
                0: deg == 1,
                1: np.zeros(self.num(1), dtype=bool),
            }
            return
        # 2D: boundary edges have exactly one incident triangle
        edge_pos = {tuple(sorted(e)): i for i, e in enumerate(self.simplices[1])}
        count = np.zeros(self.num(1), dtype=int)
        for t in self.simplices[2]:
            for (a, b) in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                count[edge_pos[tuple(sorted((a, b)))]] += 1
        bedge = count == 1
        bvert = np.zeros(nv, dtype=bool)
        for i in np.nonzero(bedge)[0]:
            bvert[self.simplices[1][i]] = True
        self.boundary_marker = {
            0: bvert,
            1: bedge,
            2: np.zeros(self.num(2), dtype=bool),
        }

    def validate(self):
        """Structural invariants: faces present, orientation, marker closure."""
        if self.dim == 2:
            edge_pos = {tuple(sorted(e)) for e in map(tuple, self.simplices[1])}
            for t in self.simplices[2]:
                for (a, b) in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                    assert tuple(sorted((a, b))) in edge_pos, "missing face edge"
            assert np.all(self.top_volumes(signed=True) > 0), "negatively oriented triangle"
            for i, marked in enumerate(self.boundary_marker[1]):
                if marked:
                    assert all(self.boundary_marker[0][v] for v in self.simplices[1][i]), \
                        "boundary markers not closed under faces"
        else:
            assert np.all(self.top_volumes(signed=True) > 0), "reversed 1D edge"
        D_list = [incidence_matrix(self, p).entries for p in range(self.dim)]
        for k in range(len(D_list) - 1):
            prod = D_list[k + 1] @ D_list[k]
            assert prod.nnz == 0 or np.all(prod.data == 0), "D D != 0"
        return True


@dataclass
class IncidenceMatrix:
    degree: int
    entries: sparse.csr_matrix  # integer entries in {-1, 0, +1}


def incidence_matrix(cplx: SimplicialComplex, p: int) -> IncidenceMatrix:
    """Signed incidence D_p mapping p-cochains to (p+1)-cochains."""
    if p < 0 or p >= cplx.dim:
        raise ValueError(f"incidence degree p={p} out of range for dim {cplx.dim}")
    if p == 0:
        edges = cplx.simplices[1]
        ne, nv = edges.shape[0], cplx.vertex_coords.shape[0]
        rows = np.repeat(np.arange(ne), 2)
        cols = edges.ravel()
        vals = np.tile(np.array([-1, 1]), ne)
        D = sparse.csr_matrix((vals, (rows, cols)), shape=(ne, nv), dtype=np.int64)
        return IncidenceMatrix(0, D)
    # p == 1, dim == 2
    edge_pos = {}
    for i, e in enumerate(cplx.simplices[1]):
        edge_pos[tuple(e)] = (i, 1)
        edge_pos[tuple(e[::-1])] = (i, -1)
    tris = cplx.simplices[2]
    rows, cols, vals = [], [], []
    for ti, t in enumerate(tris):
        for (a, b) in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            ei, s = edge_pos[(a, b)]
            rows.append(ti)
            cols.append(ei)
            vals.append(s)
    D = sparse.csr_matrix((vals, (rows, cols)),
                          shape=(tris.shape[0], cplx.simplices[1].shape[0]), dtype=np.int64)
    return IncidenceMatrix(1, D)


# ---------------------------------------------------------------------------
# Mesh generation
# ---------------------------------------------------------------------------

def generate_mesh(spec: DomainSpec, target_h: float) -> SimplicialComplex:
    if target_h <= 0:
        raise DomainValidationError("target_h", "must be positive")
    p = spec.parameters
    if spec.kind == "interval":
        return _interval_mesh(p[0], p[1], target_h, spec)
    if spec.kind == "circle":
        return _periodic_interval_mesh(2 * np.pi * p[0], target_h, spec)
    if spec.kind == "flat_torus" and spec.ambient_dim == 1:
        return _periodic_interval_mesh(p[0], target_h, spec)
    if spec.kind == "polygon":
        return _polygon_mesh(np.asarray(spec.vertices), target_h, spec)
    builders = {
        "rectangle": lambda s: _rectangle_mesh(p, target_h / s, spec),
        "flat_torus": lambda s: _torus_mesh(p, target_h / s, spec),
        "disk": lambda s: _disk_mesh(p[0], np.array(p[1:3]), target_h / s, spec),
        "annulus": lambda s: _annulus_mesh(p[0], p[1], np.array(p[2:4]), target_h / s, spec),
    }
    if spec.kind not in builders:
        raise DomainValidationError("kind", spec.kind)
    # 2D cells have diagonals longer than their pitch; scale the pitch until
    # the longest edge meets the contract mesh_size_h <= target_h
    scale = 1.0
    for _ in range(40):
        cplx = builders[spec.kind](scale)
        if cplx.mesh_size_h <= target_h:
            return cplx
        scale *= max(1.05, cplx.mesh_size_h / target_h)
    raise DomainValidationError("target_h", "could not reach requested resolution")


def _interval_mesh(a, b, h, spec):
    ne = max(1, int(np.ceil((b - a) / h)))
    x = np.linspace(a, b, ne + 1)
    edges = np.column_stack([np.arange(ne), np.arange(1, ne + 1)])
    return SimplicialComplex(1, x[:, None], {1: edges}, spec=spec)


def _periodic_interval_mesh(L, h, spec):
    ne = max(3, int(np.ceil(L / h)))
    x = np.arange(ne) * (L / ne)
    edges = np.column_stack([np.arange(ne), (np.arange(ne) + 1) % ne])
    return SimplicialComplex(1, x[:, None], {1: edges}, spec=spec, periodic_lengths=(L,))


def _grid_triangles(nx, ny, vid):
    tris = []
    for i in range(nx):
        for j in range(ny):
            v00, v10 = vid(i, j), vid(i + 1, j)
            v01, v11 = vid(i, j + 1), vid(i + 1, j + 1)
            tris.append((v00, v10, v11))
            tris.append((v00, v11, v01))
    return np.asarray(tris, dtype=int)


def _rectangle_mesh(p, h, spec):
    ax, bx, ay, by = p
    nx = max(1, int(np.ceil((bx - ax) / h)))
    ny = max(1, int(np.ceil((by - ay) / h)))
    xs = np.linspace(ax, bx, nx + 1)
    ys = np.linspace(ay, by, ny + 1)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    tris = _grid_triangles(nx, ny, lambda i, j: i * (ny + 1) + j)
    return _from_triangles(verts, tris, spec)


def _torus_mesh(p, h, spec):
    L1, L2 = p
    nx = max(3, int(np.ceil(L1 / h)))
    ny = max(3, int(np.ceil(L2 / h)))
    xs = np.arange(nx) * (L1 / nx)
    ys = np.arange(ny) * (L2 / ny)
    X, Y = np.meshgrid(xs, ys, indexing="ij")
    verts = np.column_stack([X.ravel(), Y.ravel()])
    tris = _grid_triangles(nx, ny, lambda i, j: (i % nx) * ny + (j % ny))
    return _from_triangles(verts, tris, spec, periodic=(L1, L2))


def _disk_mesh(R, center, h, spec):
    K = max(2, int(np.round(R / h)))
    verts = [center.copy()]
    rings = [[0]]
    for k in range(1, K + 1):
        m = 6 * k
        th = 2 * np.pi * np.arange(m) / m
        r = R * k / K
        ring = list(range(len(verts), len(verts) + m))
        verts.extend(np.column_stack([center[0] + r * np.cos(th),
                                      center[1] + r * np.sin(th)]))
        rings.append(ring)
    tris = []
    for k in range(1, K + 1):
        tris.extend(_bridge_rings(rings[k - 1], rings[k]))
    return _from_triangles(np.asarray(verts), np.asarray(tris, dtype=int), spec)


def _bridge_rings(inner, outer):
    """Triangulate the strip between two concentric uniformly spaced rings."""
    mA, mB = len(inner), len(outer)
    if mA == 1:
        return [(inner[0], outer[j], outer[(j + 1) % mB]) for j in range(mB)]
    tris = []
    i = j = 0
    while i < mA or j < mB:
        a_next = (i + 1) / mA
        b_next = (j + 1) / mB
        if j >= mB or (i < mA and a_next <= b_next):
            tris.append((inner[i % mA], outer[j % mB], inner[(i + 1) % mA]))
            i += 1
        else:
            tris.append((inner[i % mA], outer[j % mB], outer[(j + 1) % mB]))
            j += 1
    return tris


def _annulus_mesh(r0, r1, center, h, spec):
    nr = max(1, int(np.ceil((r1 - r0) / h)))
    nth = max(8, int(np.ceil(np.pi * (r0 + r1) / h)))
    radii = np.linspace(r0, r1, nr + 1)
    th = 2 * np.pi * np.arange(nth) / nth
    verts = []
    for r in radii:
        verts.append(np.column_stack([center[0] + r * np.cos(th),
                                      center[1] + r * np.sin(th)]))
    verts = np.vstack(verts)
    vid = lambda i, j: i * nth + (j % nth)
    tris = []
    for i in range(nr):
        for j in range(nth):
            tris.append((vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)))
            tris.append((vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)))
    return _from_triangles(verts, np.asarray(tris, dtype=int), spec)


def _polygon_mesh(vertices, h, spec):
    tris = np.asarray(ear_clip_triangulation(vertices), dtype=int)
    cplx = _from_triangles(vertices.copy(), tris, spec)
    while cplx.mesh_size_h > h:
        cplx = refine(cplx)
    return cplx


def ear_clip_triangulation(verts: np.ndarray) -> list[tuple[int, int, int]]:
    """Ear clipping of a simple CCW polygon; O(m^2), fine at preset scale."""
    verts = np.asarray(verts, dtype=float)
    idx = list(range(len(verts)))
    tris = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    def point_in_tri(p, a, b, c):
        d1, d2, d3 = cross(a, b, p), cross(b, c, p), cross(c, a, p)
        return (d1 >= -1e-14) and (d2 >= -1e-14) and (d3 >= -1e-14)

    guard = 0
    while len(idx) > 3 and guard < 10000:
        guard += 1
        m = len(idx)
        clipped = False
        for k in range(m):
            i0, i1, i2 = idx[(k - 1) % m], idx[k], idx[(k + 1) % m]
            a, b, c = verts[i0], verts[i1], verts[i2]
            if cross(a, b, c) <= 1e-14:
                continue  # reflex or degenerate corner
            if any(point_in_tri(verts[j], a, b, c)
                   for j in idx if j not in (i0, i1, i2)):
                continue
            tris.append((i0, i1, i2))
            idx.pop(k)
            clipped = True
            break
        if not clipped:
            raise DomainValidationError("vertices", "ear clipping failed; polygon degenerate?")
    tris.append(tuple(idx))
    return tris


def _from_triangles(verts, tris, spec, periodic=None) -> SimplicialComplex:
    """Canonicalize triangles (positive orientation), derive edges."""
    periods = tuple(periodic) if periodic is not None else None
    tris = np.asarray(tris, dtype=int)
    tris = np.sort(tris, axis=1)

    def unwrapped(tri):
        c = verts[list(tri)].astype(float)
        if periods is not None:
            for ax, L in enumerate(periods):
                d = c[:, ax] - c[0, ax]
                d -= L * np.round(d / L)
                c[:, ax] = c[0, ax] + d
        return c

    oriented = []
    for t in tris:
        c = unwrapped(t)
        det = (c[1, 0] - c[0, 0]) * (c[2, 1] - c[0, 1]) - (c[1, 1] - c[0, 1]) * (c[2, 0] - c[0, 0])
        oriented.append((t[0], t[1], t[2]) if det > 0 else (t[0], t[2], t[1]))
    tris = np.asarray(oriented, dtype=int)
    pairs = set()
    for t in tris:
        for (a, b) in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
            pairs.add((min(a, b), max(a, b)))
    edges = np.asarray(sorted(pairs), dtype=int)
    return SimplicialComplex(2, verts, {1: edges, 2: tris}, spec=spec,
                             periodic_lengths=periods)


# ---------------------------------------------------------------------------
# Refinement
# ---------------------------------------------------------------------------

def refine(cplx: SimplicialComplex) -> SimplicialComplex:
    """Uniform refinement (1D bisection / 2D 1-to-4); re-snaps curved boundaries."""
    if cplx.dim == 1:
        return _refine_1d(cplx)
    return _refine_2d(cplx)


def _midpoint(cplx, a, b):
    pa = cplx.vertex_coords[a].copy()
    pb = cplx.vertex_coords[b].copy()
    if cplx.periodic_lengths is not None:
        for ax, L in enumerate(cplx.periodic_lengths):
            d = pb[ax] - pa[ax]
            d -= L * np.round(d / L)
            pb[ax] = pa[ax] + d
    mid = 0.5 * (pa + pb)
    if cplx.periodic_lengths is not None:
        for ax, L in enumerate(cplx.periodic_lengths):
            mid[ax] = mid[ax] % L
    return mid


def _refine_1d(cplx):
    verts = [cplx.vertex_coords]
    nv = cplx.vertex_coords.shape[0]
    new_edges = []
    mids = []
    for (a, b) in cplx.simplices[1]:
        mid_id = nv + len(mids)
        mids.append(_midpoint(cplx, a, b))
        new_edges.append((a, mid_id))
        new_edges.append((mid_id, b))
    verts = np.vstack([cplx.vertex_coords, np.asarray(mids)])
    return SimplicialComplex(1, verts, {1: np.asarray(new_edges, dtype=int)},
                             spec=cplx.spec, periodic_lengths=cplx.periodic_lengths)


def _snap_to_boundary(spec: DomainSpec, pts: np.ndarray) -> np.ndarray:
    """Project points onto the analytic curved boundary (disk/annulus only)."""
    if spec is None or spec.kind not in ("disk", "annulus"):
        return pts
    p = spec.parameters
    if spec.kind == "disk":
        center, radii = np.array(p[1:3]), [p[0]]
    else:
        center, radii = np.array(p[2:4]), [p[0], p[1]]
    out = pts.copy()
    d = np.linalg.norm(out - center, axis=1)
    target = np.array(radii)[np.argmin(np.abs(d[:, None] - np.array(radii)[None, :]), axis=1)]
    out = center + (out - center) * (target / d)[:, None]
    return out


def _refine_2d(cplx):
    nv = cplx.vertex_coords.shape[0]
    edge_pos = {tuple(sorted(e)): i for i, e in enumerate(cplx.simplices[1])}
    mids = np.array([_midpoint(cplx, a, b) for (a, b) in cplx.simplices[1]])
    if cplx.spec is not None and cplx.spec.has_boundary:
        on_bdy = cplx.boundary_marker[1]
        if on_bdy.any():
            mids[on_bdy] = _snap_to_boundary(cplx.spec, mids[on_bdy])
    verts = np.vstack([cplx.vertex_coords, mids])

    def mid_id(a, b):
        return nv + edge_pos[tuple(sorted((a, b)))]

    tris = []
    for (a, b, c) in cplx.simplices[2]:
        mab, mbc, mca = mid_id(a, b), mid_id(b, c), mid_id(c, a)
        tris.extend([(a, mab, mca), (mab, b, mbc), (mca, mbc, c), (mab, mbc, mca)])
    return _from_triangles(verts, np.asarray(tris, dtype=int), cplx.spec,
                           periodic=cplx.periodic_lengths)


# ---------------------------------------------------------------------------
# Mesh-attached boundary geometry
# ---------------------------------------------------------------------------

@dataclass
class BoundaryGeometry:
    """Per boundary-facet quadrature with analytic normals and curvature."""

    points: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    k1: np.ndarray
    trace_k1: np.ndarray
    facet_ids: np.ndarray

    @property
    def empty(self) -> bool:
        return self.points.shape[0] == 0

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


def boundary_geometry(cplx: SimplicialComplex, spec: DomainSpec | None,
                      quad_order: int = 4) -> BoundaryGeometry:
    """Quadrature on boundary facets; normals/K1 from the analytic spec.

    Weights integrate polynomials of degree quad_order exactly on each
    (straight) boundary facet.  Empty boundary gives an empty geometry.
    """
    if quad_order < 1:
        raise ValueError("quad_order >= 1 required")
    n = cplx.n
    if cplx.dim == 1:
        bverts = np.nonzero(cplx.boundary_marker[0])[0]
        if len(bverts) == 0:
            z = np.zeros(0)
            return BoundaryGeometry(np.zeros((0, 1)), z, np.zeros((0, 1)), z, z,
                                    np.zeros(0, dtype=int))
        pts = cplx.vertex_coords[bverts]
        interior_mean = cplx.vertex_coords.mean()
        normals = np.sign(pts - interior_mean)
        z = np.zeros(len(bverts))
        return BoundaryGeometry(pts, np.ones(len(bverts)), normals, z, z, bverts)

    bedges = np.nonzero(cplx.boundary_marker[1])[0]
    if len(bedges) == 0:
        z = np.zeros(0)
        return BoundaryGeometry(np.zeros((0, 2)), z, np.zeros((0, 2)), z, z,
                                np.zeros(0, dtype=int))
    m = max(1, (quad_order + 2) // 2)
    xg, wg = np.polynomial.legendre.leggauss(m)
    t = 0.5 * (xg + 1.0)
    # outward normal per boundary edge from its unique adjacent triangle
    edge_pos = {tuple(sorted(e)): i for i, e in enumerate(cplx.simplices[1])}
    opposite = {}
    for tri in cplx.simplices[2]:
        for (a, b, c) in ((tri[0], tri[1], tri[2]), (tri[1], tri[2], tri[0]),
                          (tri[2], tri[0], tri[1])):
            ei = edge_pos[tuple(sorted((a, b)))]
            if cplx.boundary_marker[1][ei]:
                opposite[ei] = c
    pts, wts, nrm, fid = [], [], [], []
    for ei in bedges:
        a, b = cplx.simplices[1][ei]
        pa, pb = cplx.vertex_coords[a], cplx.vertex_coords[b]
        L = np.linalg.norm(pb - pa)
        tang = (pb - pa) / L
        nu = np.array([tang[1], -tang[0]])
        pc = cplx.vertex_coords[opposite[ei]]
        if np.dot(nu, pa - pc) < 0:
            nu = -nu
        P = pa[None, :] + t[:, None] * (pb - pa)[None, :]
        pts.append(P)
        wts.append(0.5 * wg * L)
        nrm.append(np.tile(nu, (m, 1)))
        fid.append(np.full(m, ei))
    pts = np.vstack(pts)
    wts = np.concatenate(wts)
    nrm = np.vstack(nrm)
    fid = np.concatenate(fid)
    k1 = np.zeros(len(wts))
    if spec is not None and spec.kind in ("disk", "annulus"):
        p = spec.parameters
        if spec.kind == "disk":
            center, radii = np.array(p[1:3]), np.array([p[0]])
        else:
            center, radii = np.array(p[2:4]), np.array([p[0], p[1]])
        rel = pts - center
        d = np.linalg.norm(rel, axis=1)
        which = np.argmin(np.abs(d[:, None] - radii[None, :]), axis=1)
        radial = rel / d[:, None]
        for kk, R in enumerate(radii):
            sel = which == kk
            inner = spec.kind == "annulus" and kk == 0
            nrm[sel] = -radial[sel] if inner else radial[sel]
            k1[sel] = (+1.0 / R) if inner else (-1.0 / R)
    return BoundaryGeometry(pts, wts, nrm, k1, k1.copy(), fid)


# ---------------------------------------------------------------------------
# OFF import/export
# ---------------------------------------------------------------------------

def write_off(cplx: SimplicialComplex, path):
    with open(path, "w") as f:
        f.write("OFF\n")
        nv, nf = cplx.vertex_coords.shape[0], cplx.num(cplx.dim) if cplx.dim == 2 else 0
        f.write(f"{nv} {nf} 0\n")
        for v in cplx.vertex_coords:
            coords = list(v) + [0.0] * (3 - len(v))
            f.write(" ".join(repr(float(c)) for c in coords) + "\n")
        if cplx.dim == 2:
            for t in cplx.simplices[2]:
                f.write(f"3 {t[0]} {t[1]} {t[2]}\n")


def read_off(path) -> SimplicialComplex:
    """Import an ASCII OFF triangle mesh; boundary inferred from adjacency."""
    with open(path) as f:
        tokens = []
        for line in f:
            line = line.split("#")[0].strip()
            if line:
                tokens.extend(line.split())
    if tokens[0] != "OFF":
        raise ValueError("not an OFF file")
    nv, nf = int(tokens[1]), int(tokens[2])
    pos = 4
    verts = np.array(tokens[pos:pos + 3 * nv], dtype=float).reshape(nv, 3)[:, :2]
    pos += 3 * nv
    tris = []
    for _ in range(nf):
        cnt = int(tokens[pos])
        if cnt != 3:
            raise ValueError("only triangle faces supported")
        tris.append(tuple(int(t) for t in tokens[pos + 1:pos + 4]))
        pos += cnt + 1
    return _from_triangles(verts, np.asarray(tris, dtype=int), spec=None)
