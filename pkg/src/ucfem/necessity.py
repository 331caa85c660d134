"""Counterexample to naive data fitting on the uniform P1 mesh.

Constructs a nonzero discrete-harmonic function whose boundary load has
zero mean and which vanishes at every interior node, hence on the whole
measurement region; least-squares data fitting cannot distinguish its
multiples.
"""

from dataclasses import dataclass

import numpy as np

from . import linalg
from .element_integrals import stiffness_matrix
from .fe_space import build_space, ref_values, triangle_rule
from .mesh import build_uniform_mesh, mark_omega


class NecessityError(AssertionError):
    pass


@dataclass
class PartitionedStiffness:
    A_int: np.ndarray       # interior x interior
    B_cpl: np.ndarray       # interior equations x boundary coefficients
    D_bnd: np.ndarray       # boundary x boundary
    interior_dofs: np.ndarray
    boundary_dofs: np.ndarray
    mesh: object
    space: object


@dataclass
class GhostFunction:
    coefficients: np.ndarray
    null_dim: int
    coupling_rank: int
    interior_residual: float
    load_mean_residual: float


def partition_stiffness(n):
    """P1 stiffness matrix split into interior/boundary blocks."""
    if n <= 3:
        raise ValueError("construction needs n > 3, got %r" % (n,))
    mesh = build_uniform_mesh(n)
    space = build_space(mesh, 1)
    K = stiffness_matrix(space).toarray()
    bnd = np.array(sorted(space.boundary_dofs), dtype=int)
    interior = np.array(sorted(set(range(space.ndof)) - set(bnd.tolist())),
                        dtype=int)
    return PartitionedStiffness(
        A_int=K[np.ix_(interior, interior)],
        B_cpl=K[np.ix_(interior, bnd)],
        D_bnd=K[np.ix_(bnd, bnd)],
        interior_dofs=interior, boundary_dofs=bnd, mesh=mesh, space=space)


def coupling_nonzero_rows(part, tol=1e-12):
    scale = np.abs(part.B_cpl).max() or 1.0
    return np.nonzero(np.abs(part.B_cpl).max(axis=1) > tol * scale)[0]


def find_ghost(n, tol=1e-10):
    """Nonzero boundary coefficients solving B a = 0 with zero-mean load."""
    part = partition_stiffness(n)
    rows = coupling_nonzero_rows(part)
    e = np.ones(len(part.boundary_dofs))
    stacked = np.vstack([part.B_cpl[rows], (e @ part.D_bnd)[None, :]])
    basis = linalg.nullspace(stacked, tol=tol)
    if basis.shape[1] < 7:
        raise NecessityError(
            "null space dimension %d < 7 at n=%d" % (basis.shape[1], n))
    alpha2 = basis[:, 0]

    coeffs = np.zeros(part.space.ndof)
    coeffs[part.boundary_dofs] = alpha2
    load = part.D_bnd @ alpha2
    scale = np.abs(part.B_cpl).max() or 1.0
    interior_residual = float(np.abs(part.B_cpl @ alpha2).max() / scale)
    denom = np.abs(load).sum() or 1.0
    ghost = GhostFunction(
        coefficients=coeffs,
        null_dim=basis.shape[1],
        coupling_rank=int(np.linalg.matrix_rank(part.B_cpl, tol=1e-10)),
        interior_residual=interior_residual,
        load_mean_residual=float(abs(e @ load) / denom),
    )
    if not np.any(coeffs):
        raise NecessityError("ghost function is identically zero")
    if ghost.interior_residual > tol:
        raise NecessityError("interior equations not satisfied: residual %.3e"
                             % ghost.interior_residual)
    return part, ghost


def fit_objective(space, coeffs, q, marking):
    """||w_h - q||_{L2(omega)} by element quadrature."""
    rule = triangle_rule(6)
    elements = marking.element_array
    xy = np.asarray(rule.points)[:, 1:3]
    vals = ref_values(space.degree, xy)
    wh = np.einsum("ea,qa->eq", coeffs[space.cell_dofs[elements]], vals)
    phys = space.physical_points(elements, xy)
    dq = wh - q(phys[..., 0], phys[..., 1])
    sq = np.einsum("eq,q,e->", dq * dq, rule.weights, space.detj[elements])
    return float(np.sqrt(max(sq, 0.0)))


def naive_fit_demo(n, q=None, multiples=(0.0, 1.0, 100.0)):
    """Objective invariance of least-squares fitting under ghost multiples."""
    part, ghost = find_ghost(n)
    hprime = 1.0 / (n - 1)
    marking = mark_omega(part.mesh, ((hprime, 1.0 - hprime),
                                     (hprime, 1.0 - hprime)))
    if q is None:
        q = lambda x, y: x + 2.0 * y
    objectives = [fit_objective(part.space, m * ghost.coefficients, q, marking)
                  for m in multiples]
    ref = max(abs(o) for o in objectives) or 1.0
    spread = (max(objectives) - min(objectives)) / ref
    return {
        "n": n,
        "null_dim": ghost.null_dim,
        "coupling_rank": ghost.coupling_rank,
        "coupling_nonzero_rows": int(len(coupling_nonzero_rows(part))),
        "interior_residual": ghost.interior_residual,
        "load_mean_residual": ghost.load_mean_residual,
        "multiples": list(multiples),
        "objectives": objectives,
        "objective_spread": float(spread),
    }
