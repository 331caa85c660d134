import numpy as np
import pytest

from ucfem.element_integrals import load_vector
from ucfem.fe_space import (build_space, eval_basis, interpolate_nodal,
                            ref_grads, triangle_rule)
from ucfem.forms import (ProblemData, apply_noise, assemble_blocks,
                         assemble_rhs, gls_load)
from ucfem.mesh import build_uniform_mesh, mark_omega
from ucfem.solutions import cosine_solution
from ucfem.solver import two_field_matrix
from ucfem.trace_space import build_trace_space

OMEGA = ((0.1, 0.9), (0.25, 0.75))


def _blocks(n=6, degree=1, trace_n=3, gamma=1.0, beta=0.0):
    mesh = build_uniform_mesh(n)
    space = build_space(mesh, degree)
    marking = mark_omega(mesh, ((0.0, 1.0), (0.0, 1.0)))
    trace = build_trace_space(trace_n, beta=beta)
    return assemble_blocks(space, trace, marking, gamma=gamma)


def _edge_quadrature(mesh, be, npts=20):
    """Gauss points/weights along one boundary edge, physical frame."""
    x, w = np.polynomial.legendre.leggauss(npts)
    pa, pb = mesh.vertices[list(be.vertices)]
    length = np.linalg.norm(pb - pa)
    t = 0.5 * (x + 1.0)
    return pa[None, :] + t[:, None] * (pb - pa)[None, :], 0.5 * w * length


def _dnu_at(space, element, normal, xq, coeffs):
    out = np.empty(len(xq))
    for i, p in enumerate(xq):
        ref = space.reference_coords(element, p)
        _, grads = eval_basis(space, element, (1.0 - ref[0] - ref[1],
                                               ref[0], ref[1]))
        out[i] = (coeffs[space.cell_dofs[element]] @ grads) @ normal
    return out


def _value_at(space, element, xq, coeffs):
    out = np.empty(len(xq))
    for i, p in enumerate(xq):
        ref = space.reference_coords(element, p)
        vals, _ = eval_basis(space, element, (1.0 - ref[0] - ref[1],
                                              ref[0], ref[1]))
        out[i] = coeffs[space.cell_dofs[element]] @ vals
    return out


def test_constants_annihilated():
    blocks = _blocks()
    ones = np.ones(blocks.space.ndof)
    assert np.abs(blocks.A @ ones).max() <= 1e-12
    assert np.abs(blocks.B_pen @ ones).max() <= 1e-12
    assert np.abs(blocks.A_tilde @ ones).max() <= 1e-12
    assert np.abs(blocks.S_jump @ ones).max() <= 1e-12


def test_a_form_green_identity():
    """a(u, w) = h^2 (f, w) for the manufactured solution (exact flux in V_N)."""
    sol = cosine_solution(1)
    mesh = build_uniform_mesh(21)
    space = build_space(mesh, 1)
    blocks = _blocks(21, trace_n=8)
    h = mesh.h

    # volume part: integral of grad u . grad psi_i by element quadrature
    rule = triangle_rule(6)
    xy = np.asarray(rule.points)[:, 1:3]
    gref = ref_grads(1, xy)
    elements = np.arange(mesh.num_triangles)
    gphys = np.einsum("eji,qaj->eqai", space.jinv[elements], gref)
    phys = space.physical_points(elements, xy)
    gx, gy = sol.grad(phys[..., 0], phys[..., 1])
    contrib = np.einsum("eqai,eqi,q,e->ea", gphys,
                        np.stack([gx, gy], axis=-1), rule.weights, space.detj)
    vol = np.zeros(space.ndof)
    np.add.at(vol, space.cell_dofs.ravel(), contrib.ravel())

    # boundary part: integral of (P dnu u) psi_i; the exact flux lies in V_N
    tab = blocks.tab
    x, y = tab.points[..., 0], tab.points[..., 1]
    nx = np.broadcast_to(tab.normals[:, None, 0], x.shape)
    ny = np.broadcast_to(tab.normals[:, None, 1], x.shape)
    flux = sol.normal_flux(x, y, nx, ny)
    bnd = np.zeros(space.ndof)
    np.add.at(bnd, tab.dofs.ravel(),
              np.einsum("bq,bqa,bq->ba", flux, tab.vals, tab.weights).ravel())

    lhs = h ** 2 * (vol - bnd)
    rhs = h ** 2 * load_vector(space, sol.f, exactness=6)
    assert np.linalg.norm(lhs - rhs) <= 1e-8 * np.linalg.norm(rhs)


def test_b_form_against_edge_oracle():
    """u^T B_pen u = h^3 [ |dnu u|^2_bnd - sum_n (dnu u, phi_n)^2 ]."""
    blocks = _blocks(n=5, trace_n=2)
    space, mesh, trace = blocks.space, blocks.space.mesh, blocks.trace
    rng = np.random.default_rng(21)
    for _ in range(5):
        u = rng.standard_normal(space.ndof)
        full = 0.0
        moments = np.zeros(trace.N)
        for be in mesh.boundary_edges:
            xq, wq = _edge_quadrature(mesh, be)
            dnu = _dnu_at(space, be.element, be.normal, xq, u)
            full += np.sum(wq * dnu * dnu)
            for k, phi in enumerate(trace.basis):
                moments[k] += np.sum(wq * dnu * phi(xq[:, 0], be.side))
        oracle = mesh.h ** 3 * (full - moments @ moments)
        val = u @ (blocks.B_pen @ u)
        assert val == pytest.approx(oracle, rel=1e-9, abs=1e-12)


def test_jump_hand_computation_n2():
    """Single-face mesh: J(hat at origin) = hc^3 * jump^2 * |F| = 1."""
    mesh = build_uniform_mesh(2)
    space = build_space(mesh, 1)
    trace = build_trace_space(1)
    marking = mark_omega(mesh, ((0.0, 1.0), (0.0, 1.0)))
    blocks = assemble_blocks(space, trace, marking)
    u = np.zeros(space.ndof)
    u[0] = 1.0  # hat at (0, 0)
    # grad on the lower-left triangle is (-1, -1), zero on the other;
    # face normal (1,1)/sqrt(2) gives jump -sqrt(2); |F| = sqrt(2); h = sqrt(2)
    hand = (mesh.h / 2.0) ** 3 * 2.0 * np.sqrt(2.0)
    assert hand == pytest.approx(1.0, abs=1e-14)
    assert u @ (blocks.S_jump @ u) == pytest.approx(hand, abs=1e-13)


@pytest.mark.parametrize("n,degree", [(6, 1), (4, 2)])
def test_jump_element_loop_oracle(n, degree):
    """Face-based assembly vs an element-based loop over dK \\ bnd."""
    blocks = _blocks(n=n, degree=degree)
    space, mesh = blocks.space, blocks.space.mesh
    x, w = np.polynomial.legendre.leggauss(6)
    t, wt = 0.5 * (x + 1.0), 0.5 * w

    elem_faces = {}
    for face in mesh.interior_faces:
        elem_faces.setdefault(face.left, []).append(face)
        elem_faces.setdefault(face.right, []).append(face)

    def jump_on_face(face, xq, coeffs):
        return (_dnu_at(space, face.left, face.normal, xq, coeffs)
                - _dnu_at(space, face.right, face.normal, xq, coeffs))

    rng = np.random.default_rng(degree)
    hc = 0.5 * mesh.h
    for _ in range(10):
        u = rng.standard_normal(space.ndof)
        total = 0.0
        for k in range(mesh.num_triangles):
            for face in elem_faces.get(k, ()):
                pa, pb = mesh.vertices[list(face.vertices)]
                xq = pa[None, :] + t[:, None] * (pb - pa)[None, :]
                length = np.linalg.norm(pb - pa)
                j = jump_on_face(face, xq, u)
                # each face is visited from both sides; weight half per visit
                total += 0.5 * hc ** 3 * length * np.sum(wt * j * j)
        val = u @ (blocks.S_jump @ u)
        assert val == pytest.approx(total, rel=1e-12, abs=1e-14)


def test_jump_annihilates_smooth_functions():
    blocks = _blocks(n=6, degree=1)
    aff = interpolate_nodal(blocks.space, lambda x, y: 1.0 + x + 2.0 * y)
    assert np.abs(blocks.S_jump @ aff).max() <= 1e-13

    blocks2 = _blocks(n=5, degree=2)
    quad = interpolate_nodal(blocks2.space, lambda x, y: x * x - 0.5 * y * y)
    scale = abs(blocks2.S_jump).max()
    assert np.abs(blocks2.S_jump @ quad).max() <= 1e-12 * max(scale, 1.0)


def test_gls_p1_vanishes():
    blocks = _blocks(n=5, degree=1)
    assert blocks.S_gls.nnz == 0
    assert np.abs(gls_load(blocks, lambda x, y: 1.0 + 0.0 * x)).max() == 0.0


def test_gls_quadratic_form_value():
    """For u = x^2 (lap = 2): u' S_gls u = h^4 * 4 * total area."""
    blocks = _blocks(n=3, degree=2)
    u = interpolate_nodal(blocks.space, lambda x, y: x * x)
    val = u @ (blocks.S_gls @ u)
    assert val == pytest.approx(4.0 * blocks.h ** 4, rel=1e-12)


def test_gls_stationarity():
    """S_gls u equals the GLS load of f = -lap u for a global quadratic."""
    blocks = _blocks(n=4, degree=2)
    u = interpolate_nodal(blocks.space, lambda x, y: x * x + y * y)
    load = gls_load(blocks, lambda x, y: -4.0 + 0.0 * x)
    resid = blocks.S_gls @ u - load
    assert np.abs(resid).max() <= 1e-10 * max(np.abs(load).max(), 1.0)


def test_sstar_properties():
    blocks = _blocks(n=6)
    S = blocks.S_star
    ones = np.ones(blocks.space.ndof)
    assert ones @ (S @ ones) == pytest.approx(blocks.h ** 2, abs=1e-12)
    assert abs(S - S.T).max() == 0.0
    rng = np.random.default_rng(4)
    for _ in range(10):
        v = rng.standard_normal(blocks.space.ndof)
        assert v @ (S @ v) > 0.0


def test_atilde_against_edge_oracle():
    """r^T A_tilde u = h^2 [(grad u, grad r) - (dnu u, r)_bnd]."""
    blocks = _blocks(n=5, degree=1, trace_n=2)
    space, mesh = blocks.space, blocks.space.mesh
    rng = np.random.default_rng(17)
    K = blocks.K_stiff
    for _ in range(5):
        u = rng.standard_normal(space.ndof)
        r = rng.standard_normal(space.ndof)
        bnd = 0.0
        for be in mesh.boundary_edges:
            xq, wq = _edge_quadrature(mesh, be)
            dnu = _dnu_at(space, be.element, be.normal, xq, u)
            rv = _value_at(space, be.element, xq, r)
            bnd += np.sum(wq * dnu * rv)
        oracle = mesh.h ** 2 * (r @ (K @ u) - bnd)
        assert r @ (blocks.A_tilde @ u) == pytest.approx(oracle, rel=1e-9,
                                                         abs=1e-12)


def test_a_equals_atilde_for_interior_function():
    blocks = _blocks(n=7)
    space = blocks.space
    # hat at an interior node far from the boundary
    j = int(np.nonzero((np.abs(space.dof_coords[:, 0] - 0.5) < 1e-12)
                       & (np.abs(space.dof_coords[:, 1] - 0.5) < 1e-12))[0][0])
    u = np.zeros(space.ndof)
    u[j] = 1.0
    assert np.abs(blocks.A @ u - blocks.A_tilde @ u).max() <= 1e-13


def test_rhs_zero_data():
    blocks = _blocks(n=5)
    data = ProblemData(f=lambda x, y: 0.0 * x, q=lambda x, y: 0.0 * x)
    rhs_v, rhs_w, rhs_t = assemble_rhs(blocks, data)
    assert np.abs(rhs_v).max() == 0.0
    assert np.abs(rhs_w).max() == 0.0
    assert np.abs(rhs_t).max() == 0.0


def test_rhs_beta_compatibility():
    """f = 1 with auto beta = 1/4: (rhs_w, 1) = h^2 (int f + beta |bnd|)."""
    blocks = _blocks(n=5, beta=0.25)
    data = ProblemData(f=lambda x, y: 1.0 + 0.0 * x, q=lambda x, y: 0.0 * x)
    _, rhs_w, _ = assemble_rhs(blocks, data)
    ones = np.ones(blocks.space.ndof)
    assert rhs_w @ ones == pytest.approx(2.0 * blocks.h ** 2, rel=1e-12)


def test_noise_model():
    rng = np.random.default_rng(0)
    load = rng.standard_normal(40)
    assert np.array_equal(apply_noise(load, 0.0, 3), load)
    b1 = apply_noise(load, 0.12, 3)
    b2 = apply_noise(load, 0.12, 3)
    assert np.array_equal(b1, b2)  # seeded determinism, bit-exact
    diff = b1 - load
    # every entry moves by eps times its own magnitude, one common sign
    assert np.abs(np.abs(diff) - 0.12 * np.abs(load)).max() <= 1e-15
    assert len(set(np.sign(diff / np.abs(load)).tolist())) == 1


def test_stabilizers_positive_semidefinite():
    blocks = _blocks(n=5, degree=2)
    rng = np.random.default_rng(8)
    for M in (blocks.M_omega, blocks.B_pen, blocks.S_jump, blocks.S_gls,
              blocks.S_star):
        scale = abs(M).max() if M.nnz else 0.0
        for _ in range(10):
            v = rng.standard_normal(blocks.space.ndof)
            assert v @ (M @ v) >= -1e-12 * max(scale, 1.0) * (v @ v)


def test_gamma_scales_only_stabilizer():
    mesh = build_uniform_mesh(5)
    space = build_space(mesh, 1)
    marking = mark_omega(mesh, OMEGA)
    trace = build_trace_space(2)
    b0 = assemble_blocks(space, trace, marking, gamma=0.0)
    b2 = assemble_blocks(space, trace, marking, gamma=2.0)
    M0 = two_field_matrix(b0)
    M2 = two_field_matrix(b2)
    d = (M2 - M0).tocsc()
    n = space.ndof
    stab = b0.stabilizer()
    assert abs(d[:n, :n] - 2.0 * stab).max() <= 1e-14
    assert abs(d[n:, :]).max() == 0.0
    assert abs(d[:n, n:]).max() == 0.0
