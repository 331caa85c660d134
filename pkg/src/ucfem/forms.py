"""Assembly of the bilinear forms and load functionals of the stabilized
saddle-point method.

All forms carry their mesh-parameter scalings explicitly:

  a(u, z)      = h^2 (grad u, grad z) - h^2 (P dnu u, z)_bnd
  b(u, v)      = h^3 (Q dnu u, Q dnu v)_bnd
  s_jump(u, v) = sum over interior faces of hc^3 (jump dnu u, jump dnu v)_F
  s_gls(u, v)  = h^4 sum over elements of (lap u, lap v)_K
  s*(z, w)     = h^2 [(z, w) + (grad z, grad w)]
  atilde(u, r) = h^2 (grad u, grad r) - h^2 (dnu u, r)_bnd

The jump form is assembled with one visit per interior face, using the
element circumradius hc = h/2 of the uniform right-isosceles mesh as
its local mesh factor (a standard choice of "local h" in interior
penalty codes; the element diameter over-weights the stabilizer and
visibly degrades the convergence of the primal variable).  The
stabilizer scale gamma multiplies only s_jump + s_gls and is applied at
system-build time, never here.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .boundary import tabulate_boundary
from .element_integrals import (mass_matrix, stiffness_matrix, load_vector,
                                integrate)
from .fe_space import ref_grads, edge_rule, element_laplacians
from .trace_space import compute_moments


@dataclass
class ProblemData:
    f: object                      # source field f(x, y)
    q: object                      # measurement field on omega
    q_delta: object = None         # deterministic data perturbation on omega
    noise_eps: float = 0.0
    noise_seed: int = 0
    exact_solution: object = None  # optional ExactSolution for error reporting


@dataclass
class FormBlocks:
    space: object
    trace: object
    marking: object
    h: float
    gamma: float
    M_omega: sp.csc_matrix     # h^2 * mass on omega
    A: sp.csc_matrix           # a-form, trial u / test z as z^T A u
    B_pen: sp.csc_matrix
    S_jump: sp.csc_matrix
    S_gls: sp.csc_matrix
    S_star: sp.csc_matrix
    A_tilde: sp.csc_matrix
    K_stiff: sp.csc_matrix     # unscaled (grad, grad)
    mass: sp.csc_matrix        # unscaled full mass
    moments: object            # MomentVectors (C, D rows)
    tab: object                # boundary tabulation
    E_bnd: sp.csc_matrix       # (dnu psi_i, dnu psi_j)_bnd
    N_bnd: sp.csc_matrix       # (dnu psi_j, psi_i)_bnd
    bnd_trace_int: np.ndarray  # integral of psi_i over the boundary
    bnd_flux_int: np.ndarray   # integral of dnu psi_i over the boundary
    laplacians: np.ndarray     # per-element basis Laplacians (nt, ndl)

    @property
    def gram_h1(self):
        return (self.mass + self.K_stiff).tocsc()

    def stabilizer(self):
        return (self.S_jump + self.S_gls).tocsc()


def _scatter_pairs(ndof, dofs, local):
    """dofs (ne, k), local (ne, k, k) -> CSC."""
    k = dofs.shape[1]
    rows = np.repeat(dofs, k, axis=1).ravel()
    cols = np.tile(dofs, (1, k)).ravel()
    return sp.coo_matrix((local.ravel(), (rows, cols)),
                         shape=(ndof, ndof)).tocsc()


def _lowrank_correction(left, right, gram, orthonormal):
    """Sparse left^T gram^-1 right for stacked row vectors (N, ndof)."""
    proj = right if orthonormal else np.linalg.solve(gram, right)
    cols_l = np.nonzero(np.abs(left).max(axis=0) > 0)[0]
    cols_r = np.nonzero(np.abs(proj).max(axis=0) > 0)[0]
    block = left[:, cols_l].T @ proj[:, cols_r]
    rows = np.repeat(cols_l, len(cols_r))
    cols = np.tile(cols_r, len(cols_l))
    ndof = left.shape[1]
    return sp.coo_matrix((block.ravel(), (rows, cols)),
                         shape=(ndof, ndof)).tocsc()


def assemble_jump(space):
    """Gradient-jump penalty matrix: s_jump(u, u) = J(u).

    Each interior face is visited once and weighted by hc^3 with
    hc = h/2 the circumradius of the (congruent) mesh elements.
    """
    mesh = space.mesh
    faces = mesh.interior_faces
    nf = len(faces)
    ndl = space.cell_dofs.shape[1]
    rule = edge_rule(3)
    t = rule.points
    nq = len(t)

    left = np.fromiter((f.left for f in faces), dtype=int, count=nf)
    right = np.fromiter((f.right for f in faces), dtype=int, count=nf)
    va = np.fromiter((f.vertices[0] for f in faces), dtype=int, count=nf)
    vb = np.fromiter((f.vertices[1] for f in faces), dtype=int, count=nf)
    normal = np.array([f.normal for f in faces])
    pa, pb = mesh.vertices[va], mesh.vertices[vb]
    lengths = np.linalg.norm(pb - pa, axis=1)
    xq = pa[:, None, :] + t[None, :, None] * (pb - pa)[:, None, :]

    def side_dnu(elems):
        p0 = mesh.vertices[mesh.triangles[elems, 0]]
        ref = np.einsum("eij,eqj->eqi", space.jinv[elems], xq - p0[:, None, :])
        g = ref_grads(space.degree, ref)                  # (nf, nq, ndl, 2)
        gphys = np.einsum("eji,eqaj->eqai", space.jinv[elems], g)
        return np.einsum("eqai,ei->eqa", gphys, normal)

    jump = np.concatenate([side_dnu(left), -side_dnu(right)], axis=2)
    local = (0.5 * mesh.h)**3 * np.einsum("eqa,eqb,q,e->eab", jump, jump,
                                          rule.weights, lengths)
    dofs = np.concatenate([space.cell_dofs[left], space.cell_dofs[right]], axis=1)
    return _scatter_pairs(space.ndof, dofs, local)


def assemble_blocks(space, trace, marking, gamma=1.0):
    """Assemble every matrix block of the two- and three-field systems."""
    mesh = space.mesh
    h = mesh.h
    omega = marking.element_array

    K = stiffness_matrix(space)
    M = mass_matrix(space)
    M_omega = (h**2 * mass_matrix(space, elements=omega)).tocsc()
    S_star = (h**2 * (M + K)).tocsc()
    S_jump = assemble_jump(space)

    lap = element_laplacians(space)
    areas = 0.5 * space.detj
    if space.degree == 1:
        S_gls = sp.csc_matrix((space.ndof, space.ndof))
    else:
        local = h**4 * np.einsum("ea,eb,e->eab", lap, lap, areas)
        S_gls = _scatter_pairs(space.ndof, space.cell_dofs, local)

    tab = tabulate_boundary(space)
    ndl = tab.dofs.shape[1]
    localE = np.einsum("bqa,bqc,bq->bac", tab.dnu, tab.dnu, tab.weights)
    E_bnd = _scatter_pairs(space.ndof, tab.dofs, localE)
    localN = np.einsum("bqa,bqc,bq->bac", tab.vals, tab.dnu, tab.weights)
    N_bnd = _scatter_pairs(space.ndof, tab.dofs, localN)

    bnd_trace_int = np.zeros(space.ndof)
    np.add.at(bnd_trace_int, tab.dofs.ravel(),
              np.einsum("bqa,bq->ba", tab.vals, tab.weights).ravel())
    bnd_flux_int = np.zeros(space.ndof)
    np.add.at(bnd_flux_int, tab.dofs.ravel(),
              np.einsum("bqa,bq->ba", tab.dnu, tab.weights).ravel())

    mom = compute_moments(space, trace, tab)
    D, C = mom.trace_moments, mom.flux_moments
    A = (h**2 * (K - _lowrank_correction(D, C, trace.gram, trace.orthonormal))).tocsc()
    B_pen = (h**3 * (E_bnd
                     - _lowrank_correction(C, C, trace.gram, trace.orthonormal))).tocsc()
    A_tilde = (h**2 * (K - N_bnd)).tocsc()

    return FormBlocks(space=space, trace=trace, marking=marking, h=h, gamma=gamma,
                      M_omega=M_omega, A=A, B_pen=B_pen, S_jump=S_jump,
                      S_gls=S_gls, S_star=S_star, A_tilde=A_tilde,
                      K_stiff=K.tocsc(), mass=M.tocsc(), moments=mom, tab=tab,
                      E_bnd=E_bnd, N_bnd=N_bnd, bnd_trace_int=bnd_trace_int,
                      bnd_flux_int=bnd_flux_int, laplacians=lap)


def gls_load(blocks, f):
    """Consistency-preserving GLS load: -h^4 (f, lap psi_i) per element."""
    space = blocks.space
    if space.degree == 1:
        return np.zeros(space.ndof)
    h = blocks.h
    omega_all = np.arange(space.mesh.num_triangles)
    # per-element integral of f, then weight by the constant basis Laplacians
    from .fe_space import triangle_rule
    rule = triangle_rule(2 * space.degree + 2)
    xy = np.asarray(rule.points)[:, 1:3]
    phys = space.physical_points(omega_all, xy)
    fint = np.einsum("eq,q,e->e", f(phys[..., 0], phys[..., 1]),
                     rule.weights, space.detj)
    out = np.zeros(space.ndof)
    np.add.at(out, space.cell_dofs.ravel(),
              (-h**4 * blocks.laplacians * fint[:, None]).ravel())
    return out


def assemble_rhs(blocks, data):
    """Load vectors for the test slots v (data), w (multiplier) and t (flux)."""
    space, trace, marking, h = blocks.space, blocks.trace, blocks.marking, blocks.h
    omega = marking.element_array

    def q_total(x, y):
        val = np.asarray(data.q(x, y), dtype=float)
        if data.q_delta is not None:
            val = val + data.q_delta(x, y)
        return val

    rhs_v = h**2 * load_vector(space, q_total, exactness=6, elements=omega)
    beta = trace.beta
    if beta != 0.0:
        proj_means = trace.project_moments(trace.basis_means)
        qflux = blocks.bnd_flux_int - blocks.moments.flux_moments.T @ proj_means
        rhs_v += h**3 * beta * qflux
    rhs_v += blocks.gamma * gls_load(blocks, data.f)

    rhs_w = h**2 * load_vector(space, data.f, exactness=6)
    if beta != 0.0:
        rhs_w += h**2 * beta * blocks.bnd_trace_int

    rhs_t = h**2 * load_vector(space, data.f, exactness=6)
    return rhs_v, rhs_w, rhs_t


def apply_noise(load, eps, seed):
    """Multiplicative sign noise on an assembled load vector.

    The perturbed load is F + eps * (delta/|delta|) * |F| with a single
    draw delta ~ N(0, 1), i.e. every entry is moved by eps times its own
    magnitude with one common random sign.
    """
    if eps == 0.0:
        return load.copy()
    rng = np.random.default_rng(seed)
    sign = np.sign(rng.standard_normal()) or 1.0
    return load + eps * sign * np.abs(load)
