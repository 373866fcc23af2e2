import math

import numpy as np
import pytest

from esagraph import catalog
from esagraph import sequences as sq
from esagraph.errors import HorizonTooSmall, NonPositiveWeight, NotSphericallyHomogeneous
from esagraph.graph_core import (
    EndFamily,
    StarLikeSpec,
    TreeSpec,
    WeightedGraph,
    build_truncation,
    degree_bound,
    radial_reduce,
    radial_u_coefficients,
)
from esagraph.weyl import radial_characteristic_roots


def test_example1_truncation():
    g = build_truncation(catalog.example1(), 5)
    assert g.n_vertices == 6
    assert g.edges.tolist() == [[i, i + 1] for i in range(5)]
    np.testing.assert_allclose(g.conductance, [1, 8, 27, 64, 125])
    np.testing.assert_allclose(g.omega, [1, 1 / 2, 1 / 3, 1 / 4, 1 / 5, 1 / 6])
    assert g.frontier == (5,)


def test_tree_truncation_depth_two():
    g = build_truncation(TreeSpec.standard(2, max_depth=2), 2)
    assert g.n_vertices == 7
    np.testing.assert_allclose(g.omega, 2.0 ** -g.depth)
    parents = np.minimum(g.edges[:, 0], g.edges[:, 1])
    np.testing.assert_allclose(g.conductance, 2.0 ** g.depth[parents])
    assert len(g.frontier) == 4


def test_unit_end():
    g = build_truncation(EndFamily.raw(sq.ONE, sq.ONE), 3)
    assert g.n_vertices == 4
    assert np.all(g.omega == 1) and np.all(g.conductance == 1)


def test_degree_bound(unit_path):
    assert degree_bound(unit_path(4)) == 2
    assert degree_bound(build_truncation(TreeSpec.standard(2), 3)) == 3
    assert degree_bound(unit_path(2)) == 1


def test_validation_errors():
    with pytest.raises(NonPositiveWeight):
        WeightedGraph(2, np.array([[0, 1]]), np.array([1.0, 0.0]), np.array([1.0]))
    with pytest.raises(NonPositiveWeight):
        WeightedGraph(2, np.array([[0, 1]]), np.ones(2), np.array([-1.0]))
    with pytest.raises(ValueError):
        WeightedGraph(2, np.array([[0, 0]]), np.ones(2), np.array([1.0]))
    with pytest.raises(HorizonTooSmall):
        build_truncation(catalog.example1(), 1)


def test_graph_is_immutable():
    g = build_truncation(catalog.example1(), 5)
    with pytest.raises(ValueError):
        g.omega[0] = 2.0


def test_starlike_truncation_layout():
    core = WeightedGraph(2, np.array([[0, 1]]), np.ones(2), np.ones(1))
    spec = StarLikeSpec(core, (catalog.example1(), catalog.example1()), (0, 1))
    g = build_truncation(spec, 4)
    assert g.n_vertices == 2 + 2 * 5
    assert len(g.frontier) == 2
    assert degree_bound(g) == 2


def test_radial_recurrence_n1():
    """-2N u_{n+1} + (N + 1/2) u_n - 1/4 u_{n-1} = 0 after dividing by the common 2**(3n) factor."""
    co = radial_u_coefficients(TreeSpec.standard(1))
    for n in (2, 3, 5):
        scale = 2.0 ** (3 * n)
        assert co["forward"](float(n)) / scale == pytest.approx(-2.0 * 1, rel=1e-12)
        assert co["diag"](float(n)) / scale == pytest.approx(1 + 0.5, rel=1e-12)
        assert co["backward"](float(n)) / scale == pytest.approx(-0.25, rel=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 8])
def test_radial_root_product(N):
    roots = radial_characteristic_roots(TreeSpec.standard(N))
    assert abs(np.prod(roots)) == pytest.approx(1 / (8 * N), rel=1e-12)
    # both roots inside the unit disc in depth coordinates
    assert np.all(np.abs(roots) < 1 - 1e-12)
    np.testing.assert_allclose(sorted(np.abs(roots)), sorted([0.5, 1 / (4 * N)]), rtol=1e-12)


def test_radial_reduce_matches_dense_truncation():
    """The symmetric radial operator equals the tree operator restricted to radial functions."""
    from esagraph.operators import gauge_transform

    N, h = 2, 5
    tree = TreeSpec.standard(N, max_depth=h)
    g = build_truncation(tree, h)
    op = gauge_transform(g)
    end = radial_reduce(tree)
    a, W = end.gauge_coefficients()
    v = np.array([1.0, -0.5, 2.0, 0.3, 1.1, 0.7])
    u = v / N ** (np.arange(h + 1) / 2)
    Hu = op.apply(u[g.depth])
    for n in range(h):      # frontier sphere lacks children
        sel = np.flatnonzero(g.depth == n)
        lhs = Hu[sel][0] * N ** (n / 2)
        rhs = W(float(n)) * v[n] + (a(float(n)) * (v[n] - v[n - 1]) if n else 0.0) + a(float(n + 1)) * (v[n] - v[n + 1])
        assert lhs == pytest.approx(rhs, rel=1e-10)


def test_radial_reduce_from_graph_checks_homogeneity():
    g = build_truncation(TreeSpec.standard(2), 3)
    end = radial_reduce(g)
    assert end.sphere_growth == 2
    omega = np.array(g.omega)
    omega[3] *= 1.5
    bad = WeightedGraph(g.n_vertices, g.edges, omega, g.conductance, depth=g.depth)
    with pytest.raises(NotSphericallyHomogeneous):
        radial_reduce(bad)


def test_gauged_example2_coefficients():
    a, W = catalog.example2(0.0).gauge_coefficients()
    for n in (1, 5, 20):
        assert a(float(n + 1)) == pytest.approx(2.0 ** (2 * n + 0.5), rel=1e-12)
        assert W(float(n)) == pytest.approx(4.0**n * (1.5 - 5 * math.sqrt(2) / 4), rel=1e-12)
