"""Sparse symmetric assembly, direct solves and null-space extraction.

Sparse factorization is delegated to SuperLU via scipy; a hand-rolled
dense Gaussian elimination is kept as an independent oracle path for
systems of moderate size.
"""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

DENSE_LIMIT = 2000


class SingularSystemError(RuntimeError):
    pass


def assemble(rows, cols, vals, dim):
    """COO triplets (duplicates summed) -> CSC matrix."""
    return sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim)).tocsc()


def check_symmetric(A, rtol=1e-12):
    d = abs(A - A.T)
    scale = abs(A).max() or 1.0
    return d.max() <= rtol * scale


@dataclass
class FactorizedSystem:
    lu: object
    dim: int
    matrix: object

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        x = self.lu.solve(b)
        if not np.all(np.isfinite(x)):
            raise SingularSystemError("factorization produced non-finite solution")
        res = np.linalg.norm(self.matrix @ x - b)
        scale = _matrix_scale(self.matrix) * np.linalg.norm(x) + np.linalg.norm(b)
        if res > 1e-8 * max(scale, 1e-300):
            raise SingularSystemError(
                "residual %.3e exceeds tolerance (scale %.3e)" % (res, scale))
        return x


def _matrix_scale(A):
    return abs(A).max() if A.nnz else 0.0


def factorize(A):
    """LU factorization with pivoting of a (symmetric indefinite) sparse matrix."""
    A = sp.csc_matrix(A)
    try:
        lu = spla.splu(A)
    except RuntimeError as err:
        raise SingularSystemError("factorization failed: %s" % err) from err
    U_diag = lu.U.diagonal()
    bad = np.nonzero(np.abs(U_diag) <= 1e-14 * (np.abs(U_diag).max() or 1.0))[0]
    if bad.size:
        raise SingularSystemError("singular to tolerance at pivot index %d" % bad[0])
    return FactorizedSystem(lu=lu, dim=A.shape[0], matrix=A)


def solve(F, b):
    return F.solve(b)


def dense_solve(A, b):
    """Gaussian elimination with partial pivoting; oracle path for dim <= %d."""
    A = np.array(sp.csc_matrix(A).toarray() if sp.issparse(A) else A, dtype=float)
    b = np.array(b, dtype=float)
    n = A.shape[0]
    if n > DENSE_LIMIT:
        raise ValueError("dense path limited to dimension %d" % DENSE_LIMIT)
    for k in range(n):
        p = k + np.argmax(np.abs(A[k:, k]))
        if abs(A[p, k]) <= 1e-14 * max(np.abs(A).max(), 1.0):
            raise SingularSystemError("singular to tolerance at pivot index %d" % k)
        if p != k:
            A[[k, p]] = A[[p, k]]
            b[[k, p]] = b[[p, k]]
        m = A[k + 1:, k] / A[k, k]
        A[k + 1:, k:] -= np.outer(m, A[k, k:])
        b[k + 1:] -= m * b[k]
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = (b[k] - A[k, k + 1:] @ x[k + 1:]) / A[k, k]
    return x


dense_solve.__doc__ = dense_solve.__doc__ % DENSE_LIMIT


def nullspace(M, tol=1e-10):
    """Orthonormal basis of the null space of a dense matrix via SVD.

    A singular value counts as zero when it is <= tol times the largest
    singular value.  Returns an (n, k) array; k may be zero.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    _, s, Vt = np.linalg.svd(M, full_matrices=True)
    smax = s[0] if s.size else 0.0
    rank = int(np.sum(s > tol * smax)) if smax > 0 else 0
    return Vt[rank:].T.copy()


def h1_gram(space):
    """H1(Omega) Gram matrix G_ij = (psi_i, psi_j) + (grad psi_i, grad psi_j)."""
    from .element_integrals import mass_matrix, stiffness_matrix

    return (mass_matrix(space) + stiffness_matrix(space)).tocsc()
