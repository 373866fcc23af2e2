import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from esagraph import sequences as sq
from esagraph.errors import TableExhausted


def test_power_and_geometric_values():
    n = np.arange(1, 6, dtype=float)
    np.testing.assert_allclose(sq.power(2.0, 3.0)(n), 2 * n**3)
    np.testing.assert_allclose(sq.geometric(0.5, 2.0)(n), 0.5 * 2.0**n)
    np.testing.assert_allclose(sq.power(1.0, -1.0, 1.0)(n), 1 / (n + 1))


def test_algebra_is_exact_on_monomials():
    s = sq.geometric(1.0, 2.0) * sq.geometric(1.0, 0.5)
    assert s.is_closed_form
    np.testing.assert_allclose(s(np.arange(50.0)), 1.0)
    assert (sq.power(1, 2) - sq.power(1, 2)).is_zero


def test_ratio_survives_overflow():
    a = sq.geometric(1.0, 4.0)
    n = np.array([1000.0])
    # 4**1000 overflows but the ratio does not
    assert a.ratio(a, n, n + 1)[0] == pytest.approx(0.25, rel=1e-12)


def test_shift_and_with_initial():
    s = sq.power(1.0, 1.0).shift(2)
    assert s(3.0) == pytest.approx(5.0)
    p = sq.power(1.0, 1.0).with_initial([7.0])
    assert p(0.0) == 7.0 and p(4.0) == 4.0
    assert p.tail()(0.0) == 0.0


def test_table_exhaustion():
    t = sq.Table([1.0, 2.0, 3.0])
    assert t(2.0) == 3.0
    with pytest.raises(TableExhausted):
        t(3.0)


@pytest.mark.parametrize(
    "seq, converges",
    [
        (sq.power(1.0, -2.0), True),
        (sq.power(1.0, -1.0), False),
        (sq.power(1.0, -1.5), True),
        (sq.geometric(1.0, 0.5), True),
        (sq.geometric(1.0, 1.0), False),
    ],
)
def test_series_test_analytic(seq, converges):
    res = sq.series_test(seq, start=1)
    assert res.converges is converges
    assert res.method == "analytic"


def test_series_test_numeric_fallback():
    f = sq.Func(lambda n: 1.0 / (np.asarray(n, float) + 1.0) ** 2)
    res = sq.series_test(f)
    assert res.converges is True


def test_tail_sums_geometric_and_zeta():
    np.testing.assert_allclose(sq.tail_sums(sq.geometric(1.0, 0.5), [0, 3]), [2.0, 0.25], rtol=1e-14)
    assert sq.tail_sums(sq.power(1.0, -2.0), [1])[0] == pytest.approx(math.pi**2 / 6, rel=1e-13)


@settings(max_examples=50, deadline=None)
@given(k=st.floats(0.1, 10), s=st.floats(-3, 3), n=st.integers(1, 200))
def test_logabs_matches_values(k, s, n):
    seq = sq.power(k, s)
    la, sign = seq.logabs(float(n))
    assert float(sign * np.exp(la)) == pytest.approx(seq(float(n)), rel=1e-12)
