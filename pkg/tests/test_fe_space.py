import math

import numpy as np
import pytest

from ucfem.fe_space import (FeSpaceError, build_space, edge_rule, eval_basis,
                            interpolate_nodal, ref_grads, ref_values,
                            triangle_rule)
from ucfem.mesh import build_uniform_mesh


def _random_ref_points(rng, m):
    a = rng.random((m, 2))
    flip = a.sum(axis=1) > 1.0
    a[flip] = 1.0 - a[flip]
    return a


@pytest.mark.parametrize("degree", [1, 2])
def test_partition_of_unity(degree):
    rng = np.random.default_rng(0)
    pts = _random_ref_points(rng, 20)
    vals = ref_values(degree, pts)
    assert np.abs(vals.sum(axis=-1) - 1.0).max() <= 1e-14
    grads = ref_grads(degree, pts)
    assert np.abs(grads.sum(axis=-2)).max() <= 1e-13


def test_p1_barycenter_values():
    mesh = build_uniform_mesh(3)
    space = build_space(mesh, 1)
    vals, _ = eval_basis(space, 0, (1 / 3, 1 / 3, 1 / 3))
    assert np.abs(vals - 1 / 3).max() <= 1e-14


def test_p2_gradients_match_finite_differences():
    rng = np.random.default_rng(1)
    pts = _random_ref_points(rng, 10) * 0.8 + 0.05
    step = 1e-6
    g = ref_grads(2, pts)
    for d, e in enumerate(np.eye(2)):
        fd = (ref_values(2, pts + step * e) - ref_values(2, pts - step * e)) \
            / (2.0 * step)
        scale = np.abs(g[..., d]).max()
        assert np.abs(fd - g[..., d]).max() <= 1e-6 * max(scale, 1.0)


def _triangle_monomial_exact(a, b):
    # integral of x^a y^b over the reference triangle = a! b! / (a+b+2)!
    return math.factorial(a) * math.factorial(b) / math.factorial(a + b + 2)


@pytest.mark.parametrize("exactness", [1, 2, 3, 4, 5, 6])
def test_triangle_rule_monomial_battery(exactness):
    rule = triangle_rule(exactness)
    assert rule.weights.sum() == pytest.approx(0.5, abs=1e-14)
    xy = np.asarray(rule.points)[:, 1:3]
    for a in range(exactness + 1):
        for b in range(exactness + 1 - a):
            val = np.sum(rule.weights * xy[:, 0] ** a * xy[:, 1] ** b)
            assert val == pytest.approx(_triangle_monomial_exact(a, b),
                                        abs=1e-14)


def test_triangle_rule_examples_and_errors():
    rule = triangle_rule(4)
    xy = np.asarray(rule.points)[:, 1:3]
    assert np.sum(rule.weights) == pytest.approx(0.5, abs=1e-15)
    assert np.sum(rule.weights * xy[:, 0] ** 2 * xy[:, 1]) == \
        pytest.approx(1.0 / 60.0, abs=1e-15)
    with pytest.raises(FeSpaceError):
        triangle_rule(7)


@pytest.mark.parametrize("exactness", [0, 1, 3, 5, 9, 11, 23])
def test_edge_rule_monomial_battery(exactness):
    rule = edge_rule(exactness)
    for k in range(rule.exactness_degree + 1):
        val = np.sum(rule.weights * rule.points ** k)
        assert val == pytest.approx(1.0 / (k + 1), abs=1e-13)


def test_edge_rule_cosine_composite():
    # int_0^1 2 cos^2(3 pi x) dx = 1, composite 6-point Gauss on 20 panels
    rule = edge_rule(11)  # 6 points
    assert len(rule.points) == 6
    edges = np.linspace(0.0, 1.0, 21)
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        x = a + (b - a) * rule.points
        total += (b - a) * np.sum(rule.weights * 2.0 * np.cos(3 * np.pi * x) ** 2)
    assert abs(total - 1.0) <= 1e-10
    with pytest.raises(FeSpaceError):
        edge_rule(-1)


def test_dof_counts():
    mesh = build_uniform_mesh(5)
    s1 = build_space(mesh, 1)
    assert s1.ndof == mesh.num_vertices
    s2 = build_space(mesh, 2)
    nedges = len(mesh.interior_faces) + len(mesh.boundary_edges)
    assert s2.ndof == mesh.num_vertices + nedges
    with pytest.raises(FeSpaceError):
        build_space(mesh, 3)


def test_element_map_round_trip():
    mesh = build_uniform_mesh(4)
    space = build_space(mesh, 1)
    rng = np.random.default_rng(2)
    ref = _random_ref_points(rng, 6)
    elements = np.arange(mesh.num_triangles)
    phys = space.physical_points(elements, ref)
    for e in (0, 5, 11):
        back = space.reference_coords(e, phys[e])
        assert np.abs(back - ref).max() <= 1e-13


def _h1_seminorm_error(space, coeffs, grad_exact):
    rule = triangle_rule(6)
    xy = np.asarray(rule.points)[:, 1:3]
    gref = ref_grads(space.degree, xy)
    elements = np.arange(space.mesh.num_triangles)
    gphys = np.einsum("eji,qaj->eqai", space.jinv[elements], gref)
    guh = np.einsum("ea,eqai->eqi", coeffs[space.cell_dofs[elements]], gphys)
    phys = space.physical_points(elements, xy)
    gx, gy = grad_exact(phys[..., 0], phys[..., 1])
    d2 = (gx - guh[..., 0]) ** 2 + (gy - guh[..., 1]) ** 2
    return float(np.sqrt(np.einsum("eq,q,e->", d2, rule.weights, space.detj)))


def test_interpolation_exactness():
    mesh = build_uniform_mesh(6)
    s1 = build_space(mesh, 1)
    c = interpolate_nodal(s1, lambda x, y: 3.5 + 0.0 * x)
    assert np.abs(c - 3.5).max() == 0.0
    c = interpolate_nodal(s1, lambda x, y: x + 2.0 * y)
    assert _h1_seminorm_error(
        s1, c, lambda x, y: (1.0 + 0.0 * x, 2.0 + 0.0 * x)) <= 1e-13

    s2 = build_space(mesh, 2)
    c = interpolate_nodal(s2, lambda x, y: x * x - y * y)
    assert _h1_seminorm_error(
        s2, c, lambda x, y: (2.0 * x, -2.0 * y)) <= 1e-12
