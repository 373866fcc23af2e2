import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from esagraph import catalog
from esagraph import sequences as sq
from esagraph.classify import (
    ESA,
    INCONCLUSIVE,
    NOT_ESA,
    RULE_AGMON,
    RULE_NONCOMPLETE,
    RULE_NONE,
    RULE_SERIES,
    RULE_WEYL,
    CutoffParams,
    Verdict,
    agmon_cutoff,
    agmon_inequality_check,
    agmon_rho_sweep,
    classify,
    cutoff_profile,
    growth_condition_margin,
    root_moduli,
)
from esagraph.errors import BadParams, EndIsComplete
from esagraph.graph_core import EndFamily, StarLikeSpec, WeightedGraph

P = CutoffParams(0.25, 0.1, 10.0)


def test_cutoff_params_validation():
    for bad in [(0.1, 0.2, 10.0), (0.6, 0.1, 10.0), (0.25, 0.1, 0.5), (0.25, 0.0, 10.0)]:
        with pytest.raises(BadParams):
            CutoffParams(*bad)


def test_cutoff_pieces():
    D = np.array([0.05, 0.1, 0.25, 0.5, 1.0, 5.0, 10.0, 10.5, 12.0])
    f, L = agmon_cutoff(P, D)
    np.testing.assert_allclose(f, [0, 0, 0.25, 0.5, 1, 1, 1, 0.5, 0])
    assert L == pytest.approx(0.25 / 0.15)
    assert (cutoff_profile(P, P.rho) - cutoff_profile(P, P.eps)) / (P.rho - P.eps) == pytest.approx(L)
    with pytest.raises(BadParams):
        agmon_cutoff(P, [0.0, 1.0])


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-6, 20.0), y=st.floats(1e-6, 20.0),
       rho=st.floats(0.01, 0.49), frac=st.floats(0.01, 0.99), R=st.floats(1.01, 15.0))
def test_cutoff_is_lipschitz(x, y, rho, frac, R):
    p = CutoffParams(rho, frac * rho, R)
    fx, fy = cutoff_profile(p, [x, y])
    assert abs(fx - fy) <= p.lipschitz * abs(x - y) * (1 + 1e-12) + 1e-15


def test_growth_curve_example2_exact():
    end = catalog.example2(0.0, "raw")
    from esagraph.classify import growth_curve
    n = np.arange(21)
    np.testing.assert_allclose(growth_curve(end, n=n), 4.0**n / 2, rtol=1e-12)


@pytest.mark.parametrize("A, ok", [(0.4, False), (0.5, True), (0.6, True), (2.0, True)])
def test_growth_condition_example2(A, ok):
    m = growth_condition_margin(catalog.example2(A, "raw"))
    assert m.satisfied is ok
    assert math.isfinite(m.M_star) is ok


def test_growth_condition_zero_potential():
    m = growth_condition_margin(catalog.example1())
    assert m.satisfied is False and m.M_star == math.inf


def test_growth_condition_complete_end():
    with pytest.raises(EndIsComplete):
        growth_condition_margin(EndFamily.raw(sq.ONE, sq.ONE))


@settings(max_examples=25, deadline=None)
@given(A=st.floats(0.5, 3.0), extra=st.floats(0.0, 5.0), s=st.sampled_from([0.0, 1.0, 2.0]))
def test_growth_condition_monotone(A, extra, s):
    """Raising the potential keeps the condition and never raises the margin."""
    end = catalog.example2(A, "raw")
    base = growth_condition_margin(end)
    bigger = growth_condition_margin(end, W=end.W + sq.power(extra, s, 1.0))
    assert base.satisfied and bigger.satisfied
    assert bigger.M_star <= base.M_star + 1e-9 * (1 + abs(base.M_star))


def test_agmon_trivial_v():
    rep = agmon_inequality_check(catalog.example2(1.0, "raw"), params=P, horizon=100, v=np.zeros(101))
    assert rep.lhs == 0.0 and rep.rhs == 0.0 and rep.holds


def test_agmon_example2_holds():
    rep = agmon_inequality_check(catalog.example2(1.0, "raw"), params=P, horizon=100)
    assert rep.assumption_holds and rep.support_in_interior
    assert rep.c == pytest.approx(1.0)
    assert rep.holds and rep.lhs <= rep.rhs


def test_agmon_rho_sweep_margin_shrinks():
    reps = agmon_rho_sweep(catalog.example2(1.0, "raw"), rhos=(0.2, 0.1, 0.05))
    assert all(r.holds for r in reps)
    margins = [r.margin for r in reps]
    assert all(b <= a for a, b in zip(margins, margins[1:]))
    masses = [r.annulus_mass for r in reps]
    assert all(b >= a for a, b in zip(masses, masses[1:]))


def test_classify_examples():
    v1 = classify(catalog.example1())
    assert (v1.status, v1.rule) == (NOT_ESA, RULE_NONCOMPLETE)
    v2 = classify(catalog.example2(0.0))
    assert (v2.status, v2.rule) == (NOT_ESA, RULE_WEYL)
    assert max(root_moduli(v2)) < 1
    v4 = classify(catalog.example4(2))
    assert (v4.status, v4.rule) == (NOT_ESA, RULE_NONCOMPLETE)
    assert v4.caveat is None
    for v in (v1, v2, v4):
        assert not v.conflict


@pytest.mark.parametrize("family", [catalog.example1(), catalog.example3(3.0, 1.0)], ids=["ex1", "ex3"])
def test_rule1_and_weyl_agree(family):
    v = classify(family, disabled_rules=[RULE_NONCOMPLETE])
    assert (v.status, v.rule) == (NOT_ESA, RULE_WEYL)
    assert v.trail[0].status == "Disabled"


def test_series_rule_fires_for_any_potential():
    for W in (None, sq.power(-3.0, 4.0)):
        v = classify(EndFamily.gauged(sq.power(1.0, 1.0), W))
        assert (v.status, v.rule) == (ESA, RULE_SERIES)


def test_agmon_rule_fires_on_raw_example2():
    v = classify(catalog.example2(1.0, "raw"))
    assert (v.status, v.rule) == (ESA, RULE_AGMON)


def test_borderline_is_inconclusive():
    v = classify(catalog.example2(catalog.A0))
    assert v.status == INCONCLUSIVE and v.rule == RULE_NONE


def test_tree_radial_caveat():
    v = classify(catalog.example4(6))
    assert v.status == INCONCLUSIVE
    assert v.caveat == "radial sector only"


def test_starlike():
    core = WeightedGraph(2, np.array([[0, 1]]), np.ones(2), np.ones(1))
    spec = StarLikeSpec(core, (catalog.example2(0.0), EndFamily.gauged(sq.power(1.0, 1.0))), (0, 1))
    v = classify(spec)
    assert v.status == NOT_ESA and v.rule == RULE_WEYL
    assert v.details["n_plus"] == 1


def test_verdict_requires_rule():
    with pytest.raises(ValueError):
        Verdict(ESA, RULE_NONE, {})
    with pytest.raises(ValueError):
        classify(catalog.example1(), disabled_rules=["NoSuchRule"])
