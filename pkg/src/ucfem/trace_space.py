"""The finite-dimensional Neumann trace space and its projection.

The default basis puts sqrt(2) cos(n pi x) on the top edge of the unit
square and zero on the remaining sides; it is orthonormal in
L2(boundary) and has zero mean, which is verified at construction.  A
non-orthonormal basis is still handled by solving the small Gram system
when projecting.
"""

from dataclasses import dataclass

import numpy as np

from .boundary import tabulate_boundary, accumulate_vector, accumulate_flux_vector
from .fe_space import edge_rule
from .mesh import TOP


class TraceSpaceError(ValueError):
    pass


def cosine_basis(n):
    def phi(x, side):
        x = np.asarray(x, dtype=float)
        out = np.sqrt(2.0) * np.cos(n * np.pi * x)
        return np.where(side == TOP, out, 0.0) if isinstance(side, np.ndarray) \
            else (out if side == TOP else np.zeros_like(out))
    return phi


def _top_quadrature(panels=80, exactness=23):
    """Composite Gauss rule on [0, 1] for integrals against the cosine modes."""
    rule = edge_rule(exactness)
    edges = np.linspace(0.0, 1.0, panels + 1)
    x = (edges[:-1, None] + np.diff(edges)[:, None] * rule.points[None, :]).ravel()
    w = (np.diff(edges)[:, None] * rule.weights[None, :]).ravel()
    return x, w


@dataclass(frozen=True)
class TraceSpace:
    N: int
    basis: tuple          # callables phi_n(x, side)
    beta: float
    gram: np.ndarray      # (N, N) boundary Gram of the basis
    orthonormal: bool
    basis_means: np.ndarray  # integral of each phi_n over the boundary

    def project_moments(self, moments):
        """Coefficients of P g from raw moments (g, phi_n)."""
        moments = np.asarray(moments, dtype=float)
        if self.orthonormal:
            return moments.copy()
        return np.linalg.solve(self.gram, moments)


@dataclass(frozen=True)
class MomentVectors:
    trace_moments: np.ndarray  # D[n, j] = (psi_j, phi_n) on the boundary
    flux_moments: np.ndarray   # C[n, j] = (d_nu psi_j, phi_n) on the boundary


def build_trace_space(N, beta=0.0, basis=None):
    if N < 1:
        raise TraceSpaceError("trace dimension must be >= 1, got %r" % (N,))
    if basis is None:
        basis = tuple(cosine_basis(n) for n in range(1, N + 1))
    x, w = _top_quadrature()
    vals = np.array([phi(x, TOP) for phi in basis])      # top edge carries all mass
    gram = np.einsum("nq,mq,q->nm", vals, vals, w)
    means = vals @ w
    if np.abs(means).max() > 1e-10:
        raise TraceSpaceError("trace basis is not zero-mean on the boundary")
    orthonormal = np.abs(gram - np.eye(N)).max() <= 1e-10
    return TraceSpace(N=N, basis=basis, beta=float(beta), gram=gram,
                      orthonormal=orthonormal, basis_means=means)


def beta_from_source(space_2d, f):
    """Compatibility constant: (integral of f over the domain) / |boundary|."""
    from .element_integrals import integrate

    (x0, x1), (y0, y1) = space_2d.mesh.bounds
    perimeter = 2.0 * ((x1 - x0) + (y1 - y0))
    return integrate(space_2d, f) / perimeter


def compute_moments(space, T, tab=None):
    """Boundary moments of the FE basis against the trace basis."""
    if tab is None:
        tab = tabulate_boundary(space)
    side_arr = np.array(tab.sides)[:, None] == TOP
    D = np.empty((T.N, space.ndof))
    C = np.empty((T.N, space.ndof))
    for n, phi in enumerate(T.basis):
        phivals = np.where(side_arr, phi(tab.points[..., 0], TOP), 0.0)
        D[n] = accumulate_vector(space, tab, phivals)
        C[n] = accumulate_flux_vector(space, tab, phivals)
    return MomentVectors(trace_moments=D, flux_moments=C)


def boundary_moments_of(T, g):
    """Raw moments (g, phi_n) of a boundary field g(x, side).

    The default basis is supported on the top edge, so only the top-edge
    restriction of g enters.
    """
    x, w = _top_quadrature()
    gtop = np.asarray(g(x, TOP), dtype=float)
    return np.array([np.sum(w * gtop * phi(x, TOP)) for phi in T.basis])


def apply_P(T, g_moments):
    """Boundary field P g from the moment vector (g, phi_n)."""
    coeff = T.project_moments(g_moments)

    def pg(x, side):
        x = np.asarray(x, dtype=float)
        return sum(c * phi(x, side) for c, phi in zip(coeff, T.basis))
    return pg


def apply_Q(T, g):
    """Boundary field Q g = g - P g for a callable boundary field g(x, side)."""
    pg = apply_P(T, boundary_moments_of(T, g))

    def qg(x, side):
        return np.asarray(g(x, side), dtype=float) - pg(x, side)
    return qg
