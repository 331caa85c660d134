"""Tabulation of finite element traces and normal derivatives on the
domain boundary, shared by the moment computation and the boundary forms."""

from dataclasses import dataclass

import numpy as np

from .fe_space import ref_values, ref_grads, edge_rule

EDGE_EXACTNESS = 23  # 12-point Gauss; resolves cos(N pi x) moments up to N=64


@dataclass(frozen=True)
class BoundaryTabulation:
    dofs: np.ndarray     # (nb, ndl) owning-element dofs per boundary edge
    vals: np.ndarray     # (nb, nq, ndl) trace values
    dnu: np.ndarray      # (nb, nq, ndl) normal derivatives
    points: np.ndarray   # (nb, nq, 2) physical quadrature points
    weights: np.ndarray  # (nb, nq) quadrature weight * edge length
    sides: tuple         # per-edge side tag
    normals: np.ndarray  # (nb, 2)


def tabulate_boundary(space, rule=None):
    mesh = space.mesh
    if rule is None:
        rule = edge_rule(EDGE_EXACTNESS)
    t = np.asarray(rule.points)
    nb = len(mesh.boundary_edges)
    nq = len(t)
    ndl = space.cell_dofs.shape[1]

    dofs = np.empty((nb, ndl), dtype=int)
    vals = np.empty((nb, nq, ndl))
    dnu = np.empty((nb, nq, ndl))
    pts = np.empty((nb, nq, 2))
    wts = np.empty((nb, nq))
    normals = np.empty((nb, 2))
    sides = []
    for b, be in enumerate(mesh.boundary_edges):
        va, vb = be.vertices
        pa, pb = mesh.vertices[va], mesh.vertices[vb]
        length = float(np.linalg.norm(pb - pa))
        xq = pa[None, :] + t[:, None] * (pb - pa)[None, :]
        ref = space.reference_coords(be.element, xq)
        vals[b] = ref_values(space.degree, ref)
        g = ref_grads(space.degree, ref)                       # (nq, ndl, 2)
        gphys = np.einsum("ji,qaj->qai", space.jinv[be.element], g)
        dnu[b] = gphys @ be.normal
        dofs[b] = space.cell_dofs[be.element]
        pts[b] = xq
        wts[b] = rule.weights * length
        normals[b] = be.normal
        sides.append(be.side)
    return BoundaryTabulation(dofs=dofs, vals=vals, dnu=dnu, points=pts,
                              weights=wts, sides=tuple(sides), normals=normals)


def accumulate_vector(space, tab, integrand):
    """Vector b_i = sum over boundary quadrature of integrand * basis trace.

    integrand has shape (nb, nq); uses the trace values of the owning
    element's basis functions.
    """
    out = np.zeros(space.ndof)
    contrib = np.einsum("bq,bqa,bq->ba", integrand, tab.vals, tab.weights)
    np.add.at(out, tab.dofs.ravel(), contrib.ravel())
    return out


def accumulate_flux_vector(space, tab, integrand):
    """Vector c_i = sum over boundary quadrature of integrand * d_nu psi_i."""
    out = np.zeros(space.ndof)
    contrib = np.einsum("bq,bqa,bq->ba", integrand, tab.dnu, tab.weights)
    np.add.at(out, tab.dofs.ravel(), contrib.ravel())
    return out
