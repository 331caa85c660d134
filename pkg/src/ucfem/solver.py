"""Monolithic solves of the two-field and three-field saddle systems.

Unknown ordering is (u, z) resp. (u, z, r).  The assembled block matrix
is symmetric; uniqueness is underwritten by the coercivity identity
triple_norm(u, z)^2 = g(u, z, u, -z).
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import linalg
from .forms import assemble_rhs, apply_noise


class SolverError(RuntimeError):
    pass


@dataclass
class SolveResult:
    u: np.ndarray
    z: np.ndarray
    r: object             # None for the two-field system
    residual: float       # relative algebraic residual
    triple_norm_parts: dict
    loads: tuple          # the (un-noised) load vectors actually used


def _primal_block(blocks):
    return (blocks.M_omega + blocks.B_pen
            + blocks.gamma * (blocks.S_jump + blocks.S_gls)).tocsc()


def two_field_matrix(blocks):
    C = _primal_block(blocks)
    return sp.bmat([[C, blocks.A.T],
                    [blocks.A, -blocks.S_star]], format="csc")


def three_field_matrix(blocks):
    C = _primal_block(blocks)
    n = blocks.space.ndof
    zero = sp.csc_matrix((n, n))
    return sp.bmat([[C, blocks.A.T, blocks.A_tilde.T],
                    [blocks.A, -blocks.S_star, zero],
                    [blocks.A_tilde, zero, -blocks.S_star]], format="csc")


def _solve(M, rhs, eps, seed):
    b = apply_noise(rhs, eps, seed)
    F = linalg.factorize(M)
    x = linalg.solve(F, b)
    nb = np.linalg.norm(b)
    res = np.linalg.norm(M @ x - b) / (nb if nb > 0 else 1.0)
    if res > 1e-6:
        raise SolverError("relative algebraic residual %.3e above 1e-6" % res)
    return x, res


def solve_two_field(blocks, data):
    rhs_v, rhs_w, _ = assemble_rhs(blocks, data)
    M = two_field_matrix(blocks)
    x, res = _solve(M, np.concatenate([rhs_v, rhs_w]),
                    data.noise_eps, data.noise_seed)
    n = blocks.space.ndof
    u, z = x[:n], x[n:]
    _, parts = triple_norm(blocks, u, z)
    return SolveResult(u=u, z=z, r=None, residual=res,
                       triple_norm_parts=parts, loads=(rhs_v, rhs_w))


def solve_three_field(blocks, data):
    rhs_v, rhs_w, rhs_t = assemble_rhs(blocks, data)
    M = three_field_matrix(blocks)
    x, res = _solve(M, np.concatenate([rhs_v, rhs_w, rhs_t]),
                    data.noise_eps, data.noise_seed)
    n = blocks.space.ndof
    u, z, r = x[:n], x[n:2 * n], x[2 * n:]
    _, parts = triple_norm(blocks, u, z)
    parts["sstar_r"] = float(r @ (blocks.S_star @ r))
    return SolveResult(u=u, z=z, r=r, residual=res,
                       triple_norm_parts=parts, loads=(rhs_v, rhs_w, rhs_t))


def triple_norm(blocks, u, z):
    """The mesh-dependent norm of the stability analysis, with its parts.

    Returns (value, parts); parts hold the unscaled quadratic forms
    B(u), h^2|u|_omega^2, J(u), GLS(u) and S*(z); the jump and GLS parts
    enter the norm multiplied by gamma, matching the assembled system.
    """
    parts = {
        "b_pen": float(u @ (blocks.B_pen @ u)),
        "mass_omega": float(u @ (blocks.M_omega @ u)),
        "jump": float(u @ (blocks.S_jump @ u)),
        "gls": float(u @ (blocks.S_gls @ u)),
        "sstar": float(z @ (blocks.S_star @ z)),
    }
    sq = (parts["b_pen"] + parts["mass_omega"]
          + blocks.gamma * (parts["jump"] + parts["gls"]) + parts["sstar"])
    return float(np.sqrt(max(sq, 0.0))), parts


def g_form(blocks, u, z, v, w):
    """Evaluate g(u, z, v, w) from the assembled blocks."""
    C = _primal_block(blocks)
    return float(v @ (C @ u) + v @ (blocks.A.T @ z) + w @ (blocks.A @ u)
                 - w @ (blocks.S_star @ z))


def gtilde_form(blocks, u, z, r, v, w, t):
    return float(g_form(blocks, u, z, v, w)
                 + r @ (blocks.A_tilde @ v) + t @ (blocks.A_tilde @ u)
                 - t @ (blocks.S_star @ r))
