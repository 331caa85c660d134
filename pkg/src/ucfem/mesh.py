"""Uniform criss-cross triangulations of axis-aligned rectangles.

Each grid square is split along its anti-diagonal (top-left to
bottom-right), matching the construction used by the necessity
counterexample, which depends on the node adjacency of this particular
pattern.
"""

from dataclasses import dataclass, field

import numpy as np

BOTTOM, RIGHT, TOP, LEFT = "bottom", "right", "top", "left"


class MeshError(ValueError):
    pass


@dataclass(frozen=True)
class InteriorFace:
    vertices: tuple  # (va, vb) global vertex indices
    left: int        # element owning the stored normal orientation
    right: int
    normal: np.ndarray  # unit normal, outward for the left element


@dataclass(frozen=True)
class BoundaryEdge:
    vertices: tuple
    element: int
    normal: np.ndarray  # outward unit normal
    side: str           # one of bottom/right/top/left


@dataclass(frozen=True)
class Mesh:
    vertices: np.ndarray      # (nv, 2)
    triangles: np.ndarray     # (nt, 3) counterclockwise
    interior_faces: tuple     # of InteriorFace
    boundary_edges: tuple     # of BoundaryEdge
    h: float                  # max element diameter
    n: int                    # grid points per side
    bounds: tuple = ((0.0, 1.0), (0.0, 1.0))

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_triangles(self):
        return len(self.triangles)

    def signed_areas(self):
        p = self.vertices[self.triangles]
        d1 = p[:, 1] - p[:, 0]
        d2 = p[:, 2] - p[:, 0]
        return 0.5 * (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0])

    def barycenters(self):
        return self.vertices[self.triangles].mean(axis=1)

    def dump(self):
        """Plain-text dump: header `nv nt nb ni`, vertex lines, triangle lines."""
        lines = ["%d %d %d %d" % (self.num_vertices, self.num_triangles,
                                  len(self.boundary_edges), len(self.interior_faces))]
        for x, y in self.vertices:
            lines.append("%.17g %.17g" % (x, y))
        for i, j, k in self.triangles:
            lines.append("%d %d %d" % (i, j, k))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SubdomainMarking:
    omega_elements: frozenset
    omega_rect: tuple  # ((x0, x1), (y0, y1))

    @property
    def element_array(self):
        return np.array(sorted(self.omega_elements), dtype=int)


def build_uniform_mesh(n, bounds=((0.0, 1.0), (0.0, 1.0))):
    """Uniform criss-cross mesh with n grid points per side.

    Vertex (i, j) sits at index j*n + i; every grid square is split by
    the anti-diagonal into a lower-left and an upper-right triangle.
    """
    if n < 2:
        raise MeshError("need n >= 2 grid points per side, got %r" % (n,))
    (x0, x1), (y0, y1) = bounds
    xs = np.linspace(x0, x1, n)
    ys = np.linspace(y0, y1, n)
    X, Y = np.meshgrid(xs, ys)
    vertices = np.column_stack([X.ravel(), Y.ravel()])

    tris = []
    for j in range(n - 1):
        for i in range(n - 1):
            bl = j * n + i
            br = j * n + i + 1
            tl = (j + 1) * n + i
            tr = (j + 1) * n + i + 1
            tris.append((bl, br, tl))   # lower-left, cut edge tl-br
            tris.append((br, tr, tl))   # upper-right
    triangles = np.array(tris, dtype=int)

    interior, boundary = _face_topology(vertices, triangles, bounds)
    p = vertices[triangles]
    diam = max(
        np.linalg.norm(p[:, 0] - p[:, 1], axis=1).max(),
        np.linalg.norm(p[:, 1] - p[:, 2], axis=1).max(),
        np.linalg.norm(p[:, 2] - p[:, 0], axis=1).max(),
    )
    return Mesh(vertices=vertices, triangles=triangles,
                interior_faces=tuple(interior), boundary_edges=tuple(boundary),
                h=float(diam), n=n, bounds=bounds)


def _face_topology(vertices, triangles, bounds):
    """Classify element edges into interior faces and boundary edges."""
    edge_map = {}
    for e, tri in enumerate(triangles):
        for a in range(3):
            va, vb = tri[a], tri[(a + 1) % 3]
            key = (min(va, vb), max(va, vb))
            edge_map.setdefault(key, []).append((e, va, vb))

    (x0, x1), (y0, y1) = bounds
    tol = 1e-12 * max(x1 - x0, y1 - y0)
    interior, boundary = [], []
    for key in sorted(edge_map):
        owners = edge_map[key]
        if len(owners) == 2:
            (e1, va, vb), (e2, _, _) = owners
            t = vertices[vb] - vertices[va]
            nrm = np.array([t[1], -t[0]])  # outward for CCW element e1
            nrm /= np.linalg.norm(nrm)
            interior.append(InteriorFace(vertices=key, left=e1, right=e2, normal=nrm))
        elif len(owners) == 1:
            (e1, va, vb) = owners[0]
            t = vertices[vb] - vertices[va]
            nrm = np.array([t[1], -t[0]])
            nrm /= np.linalg.norm(nrm)
            mid = 0.5 * (vertices[va] + vertices[vb])
            if abs(mid[1] - y0) <= tol:
                side = BOTTOM
            elif abs(mid[0] - x1) <= tol:
                side = RIGHT
            elif abs(mid[1] - y1) <= tol:
                side = TOP
            elif abs(mid[0] - x0) <= tol:
                side = LEFT
            else:
                raise MeshError("boundary edge %r not on a rectangle side" % (key,))
            boundary.append(BoundaryEdge(vertices=key, element=e1, normal=nrm, side=side))
        else:
            raise MeshError("non-conforming mesh: edge %r shared by %d elements"
                            % (key, len(owners)))
    return interior, boundary


def mark_omega(mesh, rect):
    """Mark the elements whose barycenter lies inside an axis-aligned rectangle."""
    (rx0, rx1), (ry0, ry1) = rect
    (x0, x1), (y0, y1) = mesh.bounds
    if rx0 < x0 - 1e-12 or rx1 > x1 + 1e-12 or ry0 < y0 - 1e-12 or ry1 > y1 + 1e-12:
        raise MeshError("omega rectangle %r not contained in the domain" % (rect,))
    bc = mesh.barycenters()
    inside = ((bc[:, 0] > rx0) & (bc[:, 0] < rx1)
              & (bc[:, 1] > ry0) & (bc[:, 1] < ry1))
    marked = frozenset(np.nonzero(inside)[0].tolist())
    if not marked:
        raise MeshError("omega rectangle %r marks no elements; the data term "
                        "would vanish" % (rect,))
    return SubdomainMarking(omega_elements=marked, omega_rect=rect)
