"""Vectorized element-loop integrals shared by the form assembly and the
Gram utilities."""

import numpy as np
import scipy.sparse as sp

from .fe_space import ref_values, ref_grads, triangle_rule


def _rule_points_xy(rule):
    pts = np.asarray(rule.points)
    return pts[:, 1:3]


def _scatter(space, local, elements):
    """Accumulate per-element dense blocks (ne, ndl, ndl) into a CSC matrix."""
    dofs = space.cell_dofs[elements]
    ne, ndl = dofs.shape
    rows = np.repeat(dofs, ndl, axis=1).ravel()
    cols = np.tile(dofs, (1, ndl)).ravel()
    A = sp.coo_matrix((local.ravel(), (rows, cols)),
                      shape=(space.ndof, space.ndof))
    return A.tocsc()


def stiffness_matrix(space, exactness=None, elements=None):
    """(grad psi_i, grad psi_j) over the listed elements (default: all)."""
    if exactness is None:
        exactness = max(2 * (space.degree - 1), 1)
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    xy = _rule_points_xy(rule)
    gref = ref_grads(space.degree, xy)            # (nq, ndl, 2)
    gphys = np.einsum("eji,qaj->eqai", space.jinv[elements], gref)
    local = np.einsum("eqai,eqbi,q,e->eab", gphys, gphys,
                      rule.weights, space.detj[elements])
    return _scatter(space, local, elements)


def mass_matrix(space, exactness=None, elements=None):
    """(psi_i, psi_j) over the listed elements (default: all)."""
    if exactness is None:
        exactness = 2 * space.degree
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    xy = _rule_points_xy(rule)
    vals = ref_values(space.degree, xy)           # (nq, ndl)
    local = np.einsum("qa,qb,q,e->eab", vals, vals,
                      rule.weights, space.detj[elements])
    return _scatter(space, local, elements)


def load_vector(space, f, exactness=None, elements=None):
    """(f, psi_i) over the listed elements for a scalar field f(x, y)."""
    if exactness is None:
        exactness = 2 * space.degree + 2
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    xy = _rule_points_xy(rule)
    vals = ref_values(space.degree, xy)
    phys = space.physical_points(elements, xy)    # (ne, nq, 2)
    fvals = f(phys[..., 0], phys[..., 1])
    local = np.einsum("eq,qa,q,e->ea", fvals, vals,
                      rule.weights, space.detj[elements])
    out = np.zeros(space.ndof)
    np.add.at(out, space.cell_dofs[elements].ravel(), local.ravel())
    return out


def integrate(space, f, exactness=6, elements=None):
    """Integral of f(x, y) over the listed elements."""
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    phys = space.physical_points(elements, _rule_points_xy(rule))
    fvals = f(phys[..., 0], phys[..., 1])
    return float(np.einsum("eq,q,e->", fvals, rule.weights, space.detj[elements]))
