"""Error norms, the boundary dual norm, the a posteriori estimator and
convergence tables."""

import io
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .boundary import accumulate_vector
from .element_integrals import _rule_points_xy
from .fe_space import build_space, ref_values, ref_grads, triangle_rule
from .forms import assemble_blocks, ProblemData
from .mesh import build_uniform_mesh, mark_omega, TOP
from .solver import solve_two_field, solve_three_field
from .trace_space import build_trace_space
from . import solutions as _solutions

CSV_HEADER = ("level,n,h,ndof,err_h1,err_l2_omega,err_flux_dual,"
              "est_data,est_jump,est_neumann,est_gls,est_dual,est_total,"
              "c_ratio,rate_h1")

DEFAULT_OMEGA = ((0.1, 0.9), (0.25, 0.75))


def _fe_at_quadrature(space, coeffs, rule, elements=None):
    """Values and gradients of a discrete function at element quadrature points."""
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    xy = _rule_points_xy(rule)
    vals = ref_values(space.degree, xy)
    gref = ref_grads(space.degree, xy)
    ce = coeffs[space.cell_dofs[elements]]                       # (ne, ndl)
    uh = np.einsum("ea,qa->eq", ce, vals)
    gphys = np.einsum("eji,qaj->eqai", space.jinv[elements], gref)
    guh = np.einsum("ea,eqai->eqi", ce, gphys)
    return uh, guh


def h1_error(space, coeffs, exact, elements=None, exactness=6):
    """Quadrature evaluation of ||u - u_h||_{H1} over the listed elements."""
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    uh, guh = _fe_at_quadrature(space, coeffs, rule, elements)
    phys = space.physical_points(elements, _rule_points_xy(rule))
    x, y = phys[..., 0], phys[..., 1]
    du = exact.u(x, y) - uh
    gx, gy = exact.grad(x, y)
    dgx, dgy = gx - guh[..., 0], gy - guh[..., 1]
    sq = np.einsum("eq,q,e->", du * du + dgx * dgx + dgy * dgy,
                   rule.weights, space.detj[elements])
    return float(np.sqrt(max(sq, 0.0)))


def l2_error(space, coeffs, f_exact, elements=None, exactness=6):
    rule = triangle_rule(exactness)
    if elements is None:
        elements = np.arange(space.mesh.num_triangles)
    uh, _ = _fe_at_quadrature(space, coeffs, rule, elements)
    phys = space.physical_points(elements, _rule_points_xy(rule))
    du = f_exact(phys[..., 0], phys[..., 1]) - uh
    sq = np.einsum("eq,q,e->", du * du, rule.weights, space.detj[elements])
    return float(np.sqrt(max(sq, 0.0)))


def h2_norm(space, exact, exactness=6):
    """||u||_{H2} of an exact solution by quadrature (full Hessian)."""
    rule = triangle_rule(exactness)
    elements = np.arange(space.mesh.num_triangles)
    phys = space.physical_points(elements, _rule_points_xy(rule))
    x, y = phys[..., 0], phys[..., 1]
    u = exact.u(x, y)
    gx, gy = exact.grad(x, y)
    uxx, uxy, uyy = exact.hess(x, y)
    dens = u * u + gx * gx + gy * gy + uxx * uxx + 2.0 * uxy * uxy + uyy * uyy
    sq = np.einsum("eq,q,e->", dens, rule.weights, space.detj)
    return float(np.sqrt(max(sq, 0.0)))


def dual_norm_boundary(mu_loads, gram, gram_factor=None):
    """sup over V_h of (mu, w)_bnd / ||w||_{H1} = sqrt(b^T G^-1 b)."""
    b = np.asarray(mu_loads, dtype=float)
    if not np.any(b):
        return 0.0
    if gram_factor is None:
        gram_factor = linalg.factorize(gram)
    return float(np.sqrt(max(b @ gram_factor.solve(b), 0.0)))


def _flux_values(blocks, coeffs):
    tab = blocks.tab
    ce = coeffs[tab.dofs]                                   # (nb, ndl)
    return np.einsum("bqa,ba->bq", tab.dnu, ce)


def flux_error(blocks, result, exact, gram_factor=None):
    """Discrete dual-norm error of the recovered boundary flux (3-field)."""
    tab = blocks.tab
    x, y = tab.points[..., 0], tab.points[..., 1]
    nx = np.broadcast_to(tab.normals[:, None, 0], x.shape)
    ny = np.broadcast_to(tab.normals[:, None, 1], x.shape)
    mu = exact.normal_flux(x, y, nx, ny) - _flux_values(blocks, result.u)
    loads = accumulate_vector(blocks.space, tab, mu)
    return dual_norm_boundary(loads, blocks.gram_h1, gram_factor)


def aposteriori(blocks, result, data):
    """The five computable estimator terms and their sum."""
    space, trace, h = blocks.space, blocks.trace, blocks.h
    omega = blocks.marking.element_array

    def q_meas(x, y):
        val = np.asarray(data.q(x, y), dtype=float)
        if data.q_delta is not None:
            val = val + data.q_delta(x, y)
        return val

    est_data = h * l2_error(space, result.u, q_meas, elements=omega)
    est_jump = float(np.sqrt(max(result.u @ (blocks.S_jump @ result.u), 0.0)))

    # h^{3/2} || Q dnu u_h - beta ||_{L2(bnd)} by edge quadrature
    tab = blocks.tab
    g = _flux_values(blocks, result.u)
    mom = blocks.moments.flux_moments @ result.u
    coeff = trace.project_moments(mom)
    side_arr = np.array(tab.sides)[:, None] == TOP
    pg = np.zeros_like(g)
    for c, phi in zip(coeff, trace.basis):
        pg += c * np.where(side_arr, phi(tab.points[..., 0], TOP), 0.0)
    dens = (g - pg - trace.beta) ** 2
    est_neumann = h**1.5 * float(np.sqrt(max(np.sum(dens * tab.weights), 0.0)))

    # elementwise residual [h^2 lap u_h + h^2 f]
    rule = triangle_rule(6)
    elements = np.arange(space.mesh.num_triangles)
    lap_uh = np.einsum("ea,ea->e", blocks.laplacians,
                       result.u[space.cell_dofs])
    phys = space.physical_points(elements, _rule_points_xy(rule))
    res = lap_uh[:, None] + data.f(phys[..., 0], phys[..., 1])
    est_gls = h**2 * float(np.sqrt(max(
        np.einsum("eq,q,e->", res * res, rule.weights, space.detj), 0.0)))

    G = blocks.gram_h1
    est_dual = h * float(np.sqrt(max(result.z @ (G @ result.z), 0.0)))
    if result.r is not None:
        est_dual += h * float(np.sqrt(max(result.r @ (G @ result.r), 0.0)))

    terms = {"est_data": est_data, "est_jump": est_jump,
             "est_neumann": est_neumann, "est_gls": est_gls,
             "est_dual": est_dual}
    terms["est_total"] = sum(terms.values())
    return terms


def fitted_slope(hs, errs):
    """Least-squares slope of log(err) against log(h)."""
    lh = np.log(np.asarray(hs, dtype=float))
    le = np.log(np.asarray(errs, dtype=float))
    A = np.column_stack([lh, np.ones_like(lh)])
    slope, _ = np.linalg.lstsq(A, le, rcond=None)[0]
    return float(slope)


@dataclass
class ErrorReport:
    level: int
    n: int
    h: float
    ndof: int
    err_h1: float
    err_l2_omega: float
    err_flux_dual: object     # None for two-field runs
    estimator: dict
    c_ratio: float


@dataclass
class ConvergenceTable:
    rows: list = field(default_factory=list)

    def rates(self, key="err_h1"):
        vals = [getattr(r, key) for r in self.rows]
        out = [None]
        for prev, cur, hp, hc in zip(vals, vals[1:],
                                     (r.h for r in self.rows),
                                     (r.h for r in self.rows[1:])):
            out.append(float(np.log(prev / cur) / np.log(hp / hc)))
        return out

    def slope(self, key="err_h1"):
        return fitted_slope([r.h for r in self.rows],
                            [getattr(r, key) for r in self.rows])

    def to_csv(self):
        def fmt(x):
            return "" if x is None else "%.17g" % x

        out = io.StringIO()
        out.write(CSV_HEADER + "\n")
        rates = self.rates()
        for row, rate in zip(self.rows, rates):
            est = row.estimator
            cells = [str(row.level), str(row.n), fmt(row.h), str(row.ndof),
                     fmt(row.err_h1), fmt(row.err_l2_omega),
                     fmt(row.err_flux_dual),
                     fmt(est["est_data"]), fmt(est["est_jump"]),
                     fmt(est["est_neumann"]), fmt(est["est_gls"]),
                     fmt(est["est_dual"]), fmt(est["est_total"]),
                     fmt(row.c_ratio), fmt(rate)]
            out.write(",".join(cells) + "\n")
        return out.getvalue()


def run_level(solution, n, method="two_field", degree=1, gamma=1.0, trace_n=8,
              eps=0.0, seed=0, omega_rect=DEFAULT_OMEGA, q_delta=None):
    """Solve one mesh level and compute its error/estimator report."""
    mesh = build_uniform_mesh(n)
    space = build_space(mesh, degree)
    marking = mark_omega(mesh, omega_rect)
    trace = build_trace_space(trace_n, beta=solution.beta)
    blocks = assemble_blocks(space, trace, marking, gamma=gamma)
    data = ProblemData(f=solution.f, q=solution.u, q_delta=q_delta,
                       noise_eps=eps, noise_seed=seed, exact_solution=solution)
    if method == "two_field":
        result = solve_two_field(blocks, data)
    elif method == "three_field":
        result = solve_three_field(blocks, data)
    else:
        raise ValueError("unknown method %r" % (method,))

    err_h1 = h1_error(space, result.u, solution)
    err_l2 = l2_error(space, result.u, solution.u,
                      elements=marking.element_array)
    flux = None
    if method == "three_field":
        flux = flux_error(blocks, result, solution)
    est = aposteriori(blocks, result, data)
    h2 = h2_norm(space, solution)
    c_ratio = err_h1 / (mesh.h * h2) if h2 > 0 else 0.0
    report = ErrorReport(level=0, n=n, h=mesh.h, ndof=space.ndof,
                         err_h1=err_h1, err_l2_omega=err_l2,
                         err_flux_dual=flux, estimator=est, c_ratio=c_ratio)
    return report, result, blocks


def convergence_study(solution, ns, method="two_field", degree=1, gamma=1.0,
                      trace_n=8, eps=0.0, seed=0, omega_rect=DEFAULT_OMEGA,
                      q_delta=None):
    """Solve a refinement sequence and collect the convergence table."""
    if isinstance(solution, str):
        solution = _solutions.by_name(solution)
    table = ConvergenceTable()
    for level, n in enumerate(ns):
        report, _, _ = run_level(solution, n, method=method, degree=degree,
                                 gamma=gamma, trace_n=trace_n, eps=eps,
                                 seed=seed, omega_rect=omega_rect,
                                 q_delta=q_delta)
        report.level = level
        table.rows.append(report)
    return table
