"""Lagrange P1/P2 spaces, reference basis evaluation and quadrature rules."""

from dataclasses import dataclass

import numpy as np

# Reference triangle: vertices (0,0), (1,0), (0,1); barycentric
# coordinates (l0, l1, l2) = (1-x-y, x, y).

_GRAD_LAMBDA = np.array([[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]])

# P2 local ordering: vertices 0,1,2 then midpoints of edges (0,1), (1,2), (0,2).
_P2_EDGES = ((0, 1), (1, 2), (0, 2))


class FeSpaceError(ValueError):
    pass


def ref_values(degree, pts):
    """Reference basis values at points pts[..., 2] given as (x, y)."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[..., 0], pts[..., 1]
    lam = np.stack([1.0 - x - y, x, y], axis=-1)
    if degree == 1:
        return lam
    vals = np.empty(pts.shape[:-1] + (6,))
    for i in range(3):
        vals[..., i] = lam[..., i] * (2.0 * lam[..., i] - 1.0)
    for k, (a, b) in enumerate(_P2_EDGES):
        vals[..., 3 + k] = 4.0 * lam[..., a] * lam[..., b]
    return vals


def ref_grads(degree, pts):
    """Reference basis gradients at pts[..., 2]; shape (..., ndl, 2)."""
    pts = np.asarray(pts, dtype=float)
    x, y = pts[..., 0], pts[..., 1]
    lam = np.stack([1.0 - x - y, x, y], axis=-1)
    if degree == 1:
        return np.broadcast_to(_GRAD_LAMBDA, pts.shape[:-1] + (3, 2)).copy()
    g = np.empty(pts.shape[:-1] + (6, 2))
    for i in range(3):
        g[..., i, :] = (4.0 * lam[..., i] - 1.0)[..., None] * _GRAD_LAMBDA[i]
    for k, (a, b) in enumerate(_P2_EDGES):
        g[..., 3 + k, :] = 4.0 * (lam[..., a][..., None] * _GRAD_LAMBDA[b]
                                  + lam[..., b][..., None] * _GRAD_LAMBDA[a])
    return g


def ref_hessians(degree):
    """Constant reference Hessians, shape (ndl, 2, 2)."""
    if degree == 1:
        return np.zeros((3, 2, 2))
    H = np.empty((6, 2, 2))
    for i in range(3):
        H[i] = 4.0 * np.outer(_GRAD_LAMBDA[i], _GRAD_LAMBDA[i])
    for k, (a, b) in enumerate(_P2_EDGES):
        H[3 + k] = 4.0 * (np.outer(_GRAD_LAMBDA[a], _GRAD_LAMBDA[b])
                          + np.outer(_GRAD_LAMBDA[b], _GRAD_LAMBDA[a]))
    return H


@dataclass(frozen=True)
class QuadratureRule:
    points: np.ndarray   # triangle: (nq, 3) barycentric; edge: (nq,) in [0,1]
    weights: np.ndarray  # sum to the reference measure (1/2 resp. 1)
    exactness_degree: int


# Symmetric triangle rules, (barycentric orbit generator, weight on the
# unit-area triangle); weights are scaled by 1/2 below.
_TRIANGLE_RULES = {
    1: [((1 / 3, 1 / 3, 1 / 3), 1.0)],
    2: [((2 / 3, 1 / 6, 1 / 6), 1 / 3)],
    3: [((1 / 3, 1 / 3, 1 / 3), -27 / 48),
        ((0.6, 0.2, 0.2), 25 / 48)],
    4: [((0.108103018168070, 0.445948490915965, 0.445948490915965), 0.223381589678011),
        ((0.816847572980459, 0.091576213509771, 0.091576213509771), 0.109951743655322)],
    5: [((1 / 3, 1 / 3, 1 / 3), 0.225),
        ((0.059715871789770, 0.470142064105115, 0.470142064105115), 0.132394152788506),
        ((0.797426985353087, 0.101286507323456, 0.101286507323456), 0.125939180544827)],
    6: [((0.501426509658179, 0.249286745170910, 0.249286745170910), 0.116786275726379),
        ((0.873821971016996, 0.063089014491502, 0.063089014491502), 0.050844906370207),
        ((0.053145049844816, 0.310352451033785, 0.636502499121399), 0.082851075618374)],
}


def triangle_rule(exactness):
    """Symmetric quadrature on the reference triangle, exact up to degree 6."""
    if exactness not in _TRIANGLE_RULES:
        raise FeSpaceError("no triangle rule of exactness %r (supported: 1..6)"
                           % (exactness,))
    pts, wts = [], []
    for gen, w in _TRIANGLE_RULES[exactness]:
        orbit = {tuple(np.roll(gen, r)) for r in range(3)}
        orbit |= {tuple(reversed(p)) for p in orbit}
        for p in sorted(orbit):
            pts.append(p)
            wts.append(0.5 * w)
    return QuadratureRule(points=np.array(pts), weights=np.array(wts),
                          exactness_degree=exactness)


def edge_rule(exactness):
    """Gauss-Legendre rule on [0, 1] exact for the requested polynomial degree."""
    if exactness < 0:
        raise FeSpaceError("edge rule exactness must be >= 0, got %r" % (exactness,))
    m = exactness // 2 + 1
    x, w = np.polynomial.legendre.leggauss(m)
    return QuadratureRule(points=0.5 * (x + 1.0), weights=0.5 * w,
                          exactness_degree=2 * m - 1)


@dataclass(frozen=True)
class FeSpace:
    mesh: object
    degree: int
    dof_coords: np.ndarray
    cell_dofs: np.ndarray      # (nt, 3) or (nt, 6)
    boundary_dofs: frozenset
    ndof: int
    jac: np.ndarray            # per-element affine Jacobian (nt, 2, 2)
    detj: np.ndarray
    jinv: np.ndarray

    def physical_points(self, elements, ref_pts):
        """Map reference points (nq, 2) into elements (ne,) -> (ne, nq, 2)."""
        p0 = self.mesh.vertices[self.mesh.triangles[elements, 0]]
        return p0[:, None, :] + np.einsum("eij,qj->eqi", self.jac[elements], ref_pts)

    def reference_coords(self, element, x):
        """Inverse affine map of physical points x[..., 2] into one element."""
        p0 = self.mesh.vertices[self.mesh.triangles[element, 0]]
        return np.einsum("ij,...j->...i", self.jinv[element], np.asarray(x) - p0)


def build_space(mesh, degree):
    if degree not in (1, 2):
        raise FeSpaceError("only P1 and P2 elements are supported, got degree %r"
                           % (degree,))
    verts = mesh.vertices
    tris = mesh.triangles
    p = verts[tris]
    jac = np.stack([p[:, 1] - p[:, 0], p[:, 2] - p[:, 0]], axis=-1)
    detj = jac[:, 0, 0] * jac[:, 1, 1] - jac[:, 0, 1] * jac[:, 1, 0]
    if np.any(detj <= 0):
        raise FeSpaceError("degenerate or inverted element encountered")
    jinv = np.empty_like(jac)
    jinv[:, 0, 0] = jac[:, 1, 1] / detj
    jinv[:, 0, 1] = -jac[:, 0, 1] / detj
    jinv[:, 1, 0] = -jac[:, 1, 0] / detj
    jinv[:, 1, 1] = jac[:, 0, 0] / detj

    bverts = set()
    for be in mesh.boundary_edges:
        bverts.update(be.vertices)

    if degree == 1:
        return FeSpace(mesh=mesh, degree=1, dof_coords=verts.copy(),
                       cell_dofs=tris.copy(), boundary_dofs=frozenset(bverts),
                       ndof=len(verts), jac=jac, detj=detj, jinv=jinv)

    # P2: vertex dofs first (vertex order), then edge-midpoint dofs in
    # sorted edge-key order.
    edge_keys = sorted([f.vertices for f in mesh.interior_faces]
                       + [b.vertices for b in mesh.boundary_edges])
    edge_index = {k: len(verts) + i for i, k in enumerate(edge_keys)}
    mid_coords = np.array([0.5 * (verts[a] + verts[b]) for a, b in edge_keys])
    dof_coords = np.vstack([verts, mid_coords])

    cell_dofs = np.empty((len(tris), 6), dtype=int)
    cell_dofs[:, :3] = tris
    for e, tri in enumerate(tris):
        for k, (a, b) in enumerate(_P2_EDGES):
            va, vb = tri[a], tri[b]
            cell_dofs[e, 3 + k] = edge_index[(min(va, vb), max(va, vb))]

    bdofs = set(bverts)
    for be in mesh.boundary_edges:
        bdofs.add(edge_index[be.vertices])
    return FeSpace(mesh=mesh, degree=2, dof_coords=dof_coords, cell_dofs=cell_dofs,
                   boundary_dofs=frozenset(bdofs), ndof=len(dof_coords),
                   jac=jac, detj=detj, jinv=jinv)


def eval_basis(space, element, bary):
    """Basis values and physical gradients at one barycentric point."""
    bary = np.asarray(bary, dtype=float)
    pt = np.array([bary[1], bary[2]])
    vals = ref_values(space.degree, pt)
    gref = ref_grads(space.degree, pt)
    grads = np.einsum("ji,aj->ai", space.jinv[element], gref)
    return vals, grads


def element_laplacians(space):
    """Per-element basis Laplacians (constant for affine P1/P2), shape (nt, ndl)."""
    H = ref_hessians(space.degree)
    # physical Hessian = Jinv^T H Jinv; Laplacian is its trace
    return np.einsum("eki,akl,elj->eaij", space.jinv, H, space.jinv).trace(
        axis1=2, axis2=3)


def interpolate_nodal(space, f):
    """Coefficients of the nodal interpolant of a scalar field f(x, y)."""
    x, y = space.dof_coords[:, 0], space.dof_coords[:, 1]
    return np.asarray(f(x, y), dtype=float) + np.zeros(space.ndof)
