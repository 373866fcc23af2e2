import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from esagraph import catalog
from esagraph import sequences as sq
from esagraph.errors import BorderlineEnd, DecayNotCertified, DegenerateWronskian, IndexOutOfRange
from esagraph.graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph
from esagraph.weyl import (
    BORDERLINE,
    LIMIT_CIRCLE,
    LIMIT_POINT,
    characteristic_roots,
    classify_end,
    deficiency_indices,
    hyperbolic_classify,
    limit_matrix,
    lyapunov_estimate,
    radial_characteristic_roots,
    solve_recurrence,
    transfer_matrix,
    wronskian,
    wronskian_residual,
)

A0 = catalog.A0


@pytest.mark.parametrize("A", [-1.0, 0.0, 0.5, 1.0])
def test_example2_transfer_matrix_at_zero(A):
    end = catalog.example2(A)
    expected = np.array([[(5 + 2 * math.sqrt(2) * (A - A0)) / 4, -0.25], [1.0, 0.0]])
    for n in (1, 3, 10, 40):
        np.testing.assert_allclose(transfer_matrix(end, 0.0, n).matrix, expected, rtol=1e-13, atol=1e-15)


def test_free_laplacian_transfer_matrix():
    end = EndFamily.gauged(sq.ONE)
    np.testing.assert_array_equal(transfer_matrix(end, 0.0, 5).matrix, [[2.0, -1.0], [1.0, 0.0]])
    assert transfer_matrix(end, 0.0, 5).determinant == pytest.approx(1.0)
    with pytest.raises(IndexOutOfRange):
        transfer_matrix(end, 0.0, 0)


def test_spectral_term_decays_like_four_to_minus_n():
    end = catalog.example2(0.0)
    R = [abs(transfer_matrix(end, 1j, n).matrix[0, 0] - transfer_matrix(end, 0.0, n).matrix[0, 0]) for n in range(2, 12)]
    np.testing.assert_allclose(np.array(R[1:]) / np.array(R[:-1]), 0.25, rtol=1e-12)


def test_roots_at_A0_and_zero():
    res = hyperbolic_classify(transfer_matrix(catalog.example2(A0), 0.0, 5).matrix)
    assert res.kind == "NonHyperbolic"
    np.testing.assert_allclose(sorted(res.moduli), [0.25, 1.0], atol=1e-12)
    res0 = hyperbolic_classify(limit_matrix(catalog.example2(0.0)).matrix)
    assert res0.kind == "AllDecay" and max(res0.moduli) < 1


def test_tree_n1_radial_roots():
    roots = radial_characteristic_roots(TreeSpec.standard(1))
    np.testing.assert_allclose(np.abs(roots), [0.5, 0.25], rtol=1e-12)
    A = np.array([[0.75, -0.125], [1.0, 0.0]])
    assert hyperbolic_classify(A).kind == "AllDecay"


def test_hyperbolic_needs_certificate():
    with pytest.raises(DecayNotCertified):
        hyperbolic_classify(np.eye(2), certified=False)


@settings(max_examples=50, deadline=None)
@given(tr=st.floats(-5, 5), det=st.floats(-5, 5))
def test_characteristic_roots_vieta(tr, det):
    A = np.array([[tr, -det], [1.0, 0.0]])
    r = characteristic_roots(A)
    assert abs(r[0] + r[1] - tr) <= 1e-9 * (1 + abs(tr) + abs(r[0]))
    assert abs(r[0] * r[1] - det) <= 1e-9 * (1 + abs(det) + abs(r[0]) ** 2)
    assert np.abs(r[0]) >= np.abs(r[1]) * (1 - 1e-14)


def test_limit_matrix_certified_for_example2():
    cert = limit_matrix(catalog.example2(0.2))
    assert cert.certified
    assert cert.differences[-1] < 1e-8


@pytest.mark.parametrize("a", [sq.power(1.0, 1.0), sq.ONE])
def test_series_route_limit_point(a):
    for W in (None, sq.power(-5.0, 3.0), sq.geometric(2.0, 3.0)):
        c = classify_end(EndFamily.gauged(a, W))
        assert c.status == LIMIT_POINT and c.dimE == 1 and c.route == "series"


@pytest.mark.parametrize(
    "A, status",
    [(-4.0, LIMIT_POINT), (-1.0, LIMIT_CIRCLE), (0.0, LIMIT_CIRCLE), (0.2, LIMIT_CIRCLE),
     (0.5, LIMIT_POINT), (1.0, LIMIT_POINT)],
)
def test_example2_end_classes(A, status):
    c = classify_end(catalog.example2(A), audit=True)
    assert c.status == status
    assert c.dimE == (2 if status == LIMIT_CIRCLE else 1)
    assert not c.conflict


@pytest.mark.parametrize("A", [A0, catalog.A0_MIRROR])
def test_example2_borderline(A):
    c = classify_end(catalog.example2(A))
    assert c.status == BORDERLINE and c.dimE is None


def test_example1_limit_circle_by_power_exponents():
    c = classify_end(catalog.example1().to_gauged(), audit=True)
    assert c.status == LIMIT_CIRCLE
    assert c.route == "lyapunov-power"


def test_lyapunov_estimate_on_geometric_end():
    est = lyapunov_estimate(catalog.example2(0.0), steps=2000)
    # both solutions decay like the characteristic roots
    np.testing.assert_allclose(sorted(est.exponents), sorted([math.log(1 / math.sqrt(2)), math.log(1 / (2 * math.sqrt(2)))]), atol=1e-6)


def test_wronskian_degenerate():
    u = np.array([1.0, 2.0, 3.0])
    with pytest.raises(DegenerateWronskian):
        wronskian_residual(EndFamily.gauged(sq.ONE), u, u)


def test_wronskian_free_laplacian_exact():
    end = EndFamily.gauged(sq.ONE)
    u = solve_recurrence(end, 0.0, 1.0, 0.0, 50)
    v = solve_recurrence(end, 0.0, 0.0, 1.0, 50)
    W = wronskian(u, v)
    assert np.all(W == W[0])
    assert wronskian_residual(end, u, v) == 0.0


def test_wronskian_example2_closed_form():
    end = catalog.example2(0.0)
    n = np.arange(51.0)
    al = characteristic_roots(transfer_matrix(end, 0.0, 5).matrix)
    u, v = al[0] ** n, al[1] ** n
    # powers of the roots solve the recurrence for n >= 1, where the coefficients are exact geometric
    assert wronskian_residual(end, u, v, horizon=50) <= 1e-10


def test_deficiency_indices():
    assert deficiency_indices(catalog.example2(0.0)).n_plus == 1
    assert deficiency_indices(EndFamily.gauged(sq.power(1.0, 1.0))).n_plus == 0
    core = WeightedGraph(1, np.zeros((0, 2), dtype=np.int64), np.ones(1), np.zeros(0))
    star = StarLikeSpec(core, (catalog.example2(0.0),) * 3, (0, 0, 0))
    rep = deficiency_indices(star)
    assert rep.n_plus == rep.n_minus == 3
    with pytest.raises(BorderlineEnd) as exc:
        deficiency_indices(catalog.example2(A0))
    assert exc.value.ends == [0]
