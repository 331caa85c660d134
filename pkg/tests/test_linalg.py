import numpy as np
import pytest
import scipy.sparse as sp

from ucfem import linalg
from ucfem.fe_space import build_space, interpolate_nodal
from ucfem.mesh import build_uniform_mesh


def test_identity_solve():
    F = linalg.factorize(sp.eye(4, format="csc"))
    e1 = np.array([1.0, 0.0, 0.0, 0.0])
    assert np.array_equal(F.solve(e1), e1)


def test_saddle_2x2():
    A = sp.csc_matrix(np.array([[1.0, 1.0], [1.0, 0.0]]))
    x = linalg.factorize(A).solve(np.array([2.0, 1.0]))
    assert np.abs(x - 1.0).max() <= 1e-14


def _random_symmetric(rng, dim):
    R = rng.standard_normal((dim, dim))
    A = R + R.T
    # indefinite but safely nonsingular
    A += np.diag(rng.choice([-1.0, 1.0], size=dim) * (dim + 1.0))
    return A


def test_sparse_vs_dense_oracle_50_systems():
    """Pivoted SuperLU path against the hand-rolled Gaussian elimination."""
    rng = np.random.default_rng(1234)
    for _ in range(50):
        dim = int(rng.integers(10, 60))
        A = _random_symmetric(rng, dim)
        b = rng.standard_normal(dim)
        x_sparse = linalg.factorize(sp.csc_matrix(A)).solve(b)
        x_dense = linalg.dense_solve(A, b)
        denom = max(np.linalg.norm(x_dense), 1.0)
        assert np.linalg.norm(x_sparse - x_dense) <= 1e-10 * denom


def test_singular_raises():
    with pytest.raises(linalg.SingularSystemError):
        linalg.factorize(sp.csc_matrix(np.array([[1.0, 1.0], [1.0, 1.0]])))
    with pytest.raises(linalg.SingularSystemError):
        linalg.dense_solve(np.ones((3, 3)), np.ones(3))


def test_dense_limit():
    dim = linalg.DENSE_LIMIT + 1
    with pytest.raises(ValueError):
        linalg.dense_solve(np.eye(dim), np.zeros(dim))


def test_residual_invariant_random_rhs():
    rng = np.random.default_rng(5)
    A = sp.csc_matrix(_random_symmetric(rng, 40))
    F = linalg.factorize(A)
    for _ in range(10):
        b = rng.standard_normal(40)
        x = F.solve(b)
        assert np.linalg.norm(A @ x - b) <= 1e-8 * (
            abs(A).max() * np.linalg.norm(x) + np.linalg.norm(b))


def test_assemble_and_symmetry_check():
    A = linalg.assemble([0, 1, 0, 0], [1, 0, 0, 0], [2.0, 2.0, 1.0, 1.0], 2)
    assert A[0, 0] == 2.0 and A[0, 1] == 2.0 and A[1, 0] == 2.0
    assert linalg.check_symmetric(A)
    B = linalg.assemble([0, 1], [1, 0], [1.0, 2.0], 2)
    assert not linalg.check_symmetric(B)


def test_nullspace_trivial_cases():
    basis = linalg.nullspace(np.zeros((3, 3)))
    assert basis.shape == (3, 3)
    basis = linalg.nullspace(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))
    assert basis.shape == (3, 1)
    assert np.abs(np.abs(basis[:, 0]) - np.array([0.0, 0.0, 1.0])).max() <= 1e-12


def test_nullspace_constructed_rank():
    rng = np.random.default_rng(9)
    M = rng.standard_normal((8, 5)) @ rng.standard_normal((5, 12))
    basis = linalg.nullspace(M)
    assert basis.shape == (12, 7)
    assert np.abs(M @ basis).max() <= 1e-10 * np.abs(M).max()
    assert np.abs(basis.T @ basis - np.eye(7)).max() <= 1e-10


def test_h1_gram():
    mesh = build_uniform_mesh(9)
    space = build_space(mesh, 1)
    G = linalg.h1_gram(space)
    ones = np.ones(space.ndof)
    assert ones @ (G @ ones) == pytest.approx(1.0, abs=1e-10)
    xv = interpolate_nodal(space, lambda x, y: x)
    assert xv @ (G @ xv) == pytest.approx(4.0 / 3.0, abs=1e-10)
    rng = np.random.default_rng(3)
    for _ in range(10):
        v = rng.standard_normal(space.ndof)
        assert v @ (G @ v) > 0.0
