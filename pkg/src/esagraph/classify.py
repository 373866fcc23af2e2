"""Layered decision engine for essential self-adjointness.

Rules, in order:

``ThmNonComplete``
    Laplacian (no potential) whose ``c**-1/2`` metric is non-complete and
    which has an end of finite volume: not ESA.
``ThmSeries``
    star-like graph whose ends all have ``sum 1/a = inf``: ESA for any potential.
``ThmAgmonGrowth``
    bounded degree ``N`` and ``W >= N / (2 D**2) - M``: ESA.
``WeylNumeric``
    limit-point / limit-circle analysis of every end; deficiency indices add up.

Every applicable rule is evaluated so that disagreements are visible; the
verdict comes from the first decisive one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import sequences as sq
from .errors import BadParams, EndIsComplete, NoKernelCandidate, SolveFailure
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, build_truncation, degree_bound, radial_reduce
from .metric import (
    Completeness,
    MetricScheme,
    boundary_distance,
    boundary_distance_seq,
    end_completeness,
    length_sequence,
    starlike_boundary_distance,
)
from .operators import kernel_element, norm_omega
from .weyl import BORDERLINE, LIMIT_CIRCLE, LIMIT_POINT, classify_end

ESA = "ESA"
NOT_ESA = "NotESA"
INCONCLUSIVE = "Inconclusive"

RULE_NONCOMPLETE = "ThmNonComplete"
RULE_AGMON = "ThmAgmonGrowth"
RULE_SERIES = "ThmSeries"
RULE_WEYL = "WeylNumeric"
RULE_NONE = "None"
RULE_ORDER = (RULE_NONCOMPLETE, RULE_SERIES, RULE_AGMON, RULE_WEYL)

NOT_APPLICABLE = "NotApplicable"
DISABLED = "Disabled"


# -- Agmon cutoff -----------------------------------------------------------

@dataclass(frozen=True)
class CutoffParams:
    rho: float
    eps: float
    R: float

    def __post_init__(self):
        if not (0.0 < self.eps < self.rho < 0.5 and self.R > 1.0):
            raise BadParams(f"need 0 < eps < rho < 1/2 and R > 1, got rho={self.rho}, eps={self.eps}, R={self.R}")

    @property
    def lipschitz(self) -> float:
        return self.rho / (self.rho - self.eps)


def cutoff_profile(params: CutoffParams, u) -> np.ndarray:
    """Piecewise affine profile: 0, ramp to rho, identity, 1, ramp down, 0."""
    u = np.asarray(u, dtype=float)
    p = params
    return np.piecewise(
        u,
        [u <= p.eps,
         (u > p.eps) & (u <= p.rho),
         (u > p.rho) & (u <= 1.0),
         (u > 1.0) & (u <= p.R),
         (u > p.R) & (u <= p.R + 1.0),
         u > p.R + 1.0],
        [0.0,
         lambda x: p.rho * (x - p.eps) / (p.rho - p.eps),
         lambda x: x,
         1.0,
         lambda x: p.R + 1.0 - x,
         0.0],
    )


def agmon_cutoff(params: CutoffParams, D_values) -> tuple[np.ndarray, float]:
    """``f = F(D)`` at every vertex, and the Lipschitz constant of ``F``."""
    D = np.asarray(D_values, dtype=float)
    if np.any(~np.isfinite(D)) or np.any(D <= 0):
        raise BadParams("distances to the boundary must be positive and finite")
    return cutoff_profile(params, D), params.lipschitz


# -- growth condition -------------------------------------------------------

@dataclass(frozen=True)
class GrowthMargin:
    M_star: float
    satisfied: bool | None
    method: str
    degree: int

    def as_dict(self) -> dict:
        return {"M_star": self.M_star, "satisfied": self.satisfied, "method": self.method,
                "degree": self.degree}


def growth_curve(end, scheme=MetricScheme.MIN_OMEGA, degree: int = 2, n=None):
    """``N / (2 D(n)**2)`` along an end (or the rays of a tree)."""
    D = boundary_distance(end, scheme, n)
    return degree / (2.0 * np.asarray(D) ** 2)


def _is_growing(m: sq.Monomial) -> bool:
    return m.log_rho > 1e-12 or (abs(m.log_rho) <= 1e-12 and m.power > 1e-12)


def _margin_sequences(end, W: sq.Seq, scheme, degree: int, horizon: int) -> GrowthMargin:
    verdict = end_completeness(end, scheme)
    if verdict.status is Completeness.COMPLETE:
        raise EndIsComplete(f"end is complete under {MetricScheme.parse(scheme).value}")
    if verdict.status is Completeness.INCONCLUSIVE:
        return GrowthMargin(math.nan, None, "inconclusive-completeness", degree)
    ns = np.arange(horizon + 1)
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        gap = degree / (2.0 * boundary_distance(end, scheme, ns) ** 2) - W(ns.astype(float))
    # far out both terms may overflow; the tail is settled symbolically below
    sampled = float(np.max(gap[np.isfinite(gap)])) if np.any(np.isfinite(gap)) else math.nan
    D_seq = boundary_distance_seq(end, scheme)
    Wt = W.tail()
    if D_seq is not None and Wt.is_closed_form:
        diff = D_seq ** -2.0 * (degree / 2.0) - Wt
        # evaluate the combined expression, not the difference of two huge numbers
        with np.errstate(over="ignore", invalid="ignore"):
            exact = diff(ns.astype(float)) + (Wt(ns.astype(float)) - W(ns.astype(float)))
        if np.any(np.isfinite(exact)):
            sampled = float(np.max(exact[np.isfinite(exact)]))
        if diff.is_zero:
            return GrowthMargin(sampled, True, "analytic", degree)
        lead = diff.monomials[0]
        if _is_growing(lead) and lead.k > 0:
            return GrowthMargin(math.inf, False, "analytic", degree)
        return GrowthMargin(sampled, True, "analytic", degree)
    # numeric: compare W with the curve far out
    far = np.array([horizon, 2 * horizon, 4 * horizon])
    try:
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            c_far = degree / (2.0 * boundary_distance(end, scheme, far) ** 2)
            ratio = W(far.astype(float)) / c_far
    except IndexError:  # tabulated data ran out
        return GrowthMargin(sampled, None, "numeric", degree)
    if not (np.all(np.isfinite(ratio)) and np.all(np.isfinite(c_far))):
        return GrowthMargin(sampled, None, "numeric", degree)
    if np.all(np.diff(c_far) > 0):
        if np.all(ratio >= 1.1):
            return GrowthMargin(sampled, True, "numeric", degree)
        if np.all(ratio <= 0.9):
            return GrowthMargin(math.inf, False, "numeric", degree)
    return GrowthMargin(sampled, None, "numeric", degree)


def growth_condition_margin(spec, W=None, scheme=MetricScheme.MIN_OMEGA, *, degree: int | None = None,
                            horizon: int = 400) -> GrowthMargin:
    """``M* = sup (N / (2 D**2) - W)``; satisfied when finite.

    ``N`` defaults to 2 on an end, ``branching + 1`` on a tree and the
    maximal degree of a star-like graph. Closed-form distances and
    potentials are compared symbolically; otherwise the ratio ``W / curve``
    is sampled far out and anything within 10% of 1 is left undecided.
    """
    scheme = MetricScheme.parse(scheme)
    if isinstance(spec, EndFamily):
        N = 2 if degree is None else degree
        return _margin_sequences(spec, spec.W if W is None else sq.as_seq(W), scheme, N, horizon)
    if isinstance(spec, TreeSpec):
        N = spec.branching + 1 if degree is None else degree
        return _margin_sequences(spec, spec.W if W is None else sq.as_seq(W), scheme, N, horizon)
    if isinstance(spec, StarLikeSpec):
        return _starlike_margin(spec, scheme, degree, horizon)
    raise TypeError(f"unsupported family {type(spec).__name__}")


def _bounded_below(W: sq.Seq) -> bool | None:
    Wt = W.tail()
    if Wt.is_zero:
        return True
    if Wt.is_closed_form:
        lead = Wt.monomials[0]
        return lead.k > 0 or not _is_growing(lead)
    return None


def _starlike_margin(spec: StarLikeSpec, scheme, degree, horizon) -> GrowthMargin:
    h = min(horizon, 64)
    g = build_truncation(spec, h)
    N = degree_bound(g) if degree is None else degree
    D = starlike_boundary_distance(spec, scheme, h)   # raises EndIsComplete
    pot = g.potential_or_zero()
    M = float(np.max(N / (2.0 * D**2) - pot))
    ok: bool | None = True
    for end in spec.ends:
        if end_completeness(end, scheme).status is Completeness.NON_COMPLETE:
            part = _margin_sequences(end, end.W, scheme, N, horizon)
            M = max(M, part.M_star)
            if part.satisfied is not True:
                ok = part.satisfied if ok is True else ok
                if part.satisfied is False:
                    ok = False
        else:
            b = _bounded_below(end.W)
            if b is not True:
                ok = False if b is False else (ok and None)
    if ok is False:
        M = math.inf
    return GrowthMargin(M, ok, "per-end", N)


# -- Agmon inequality ----------------------------------------------------------

@dataclass(frozen=True)
class AgmonReport:
    lhs: float
    rhs: float
    holds: bool
    annulus_mass: float
    lam: float
    c: float
    M: float
    assumption_holds: bool
    support_in_interior: bool
    params: CutoffParams

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    def as_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("lhs", "rhs", "holds", "annulus_mass", "lam", "c", "M",
                                           "assumption_holds", "support_in_interior")}
        d.update(rho=self.params.rho, eps=self.params.eps, R=self.params.R, margin=self.margin)
        return d


def agmon_inequality_check(end: EndFamily, W=None, lam: float | None = None,
                           params: CutoffParams = CutoffParams(0.25, 0.1, 10.0),
                           horizon: int = 100, v=None,
                           scheme=MetricScheme.MIN_OMEGA) -> AgmonReport:
    """Evaluate both sides of the weighted energy estimate behind the growth criterion.

    ``v`` solves ``(H - lambda) v = 0`` on the interior of the truncation
    (computed with ``v = 1`` on the frontier unless supplied). By default
    ``lambda = -M - 1 - N/2`` so that the lower bound holds with ``c = 1``.
    """
    N = 2
    pot_seq = end.W if W is None else sq.as_seq(W)
    margin = growth_condition_margin(end, pot_seq, scheme, degree=N)
    M = margin.M_star if math.isfinite(margin.M_star) else 0.0
    if lam is None:
        lam = -M - 1.0 - N / 2.0
    c = -(M + lam) - N / 2.0
    g = build_truncation(end, horizon)
    ns = np.arange(horizon + 1, dtype=float)
    pot = pot_seq(ns)
    if v is None:
        try:
            v = kernel_element(g, pot - lam, list(g.frontier), [1.0])
        except SolveFailure as exc:
            raise NoKernelCandidate(str(exc)) from exc
    v = np.asarray(v, dtype=float)
    D = boundary_distance(end, scheme, np.arange(horizon + 1))
    f, _ = agmon_cutoff(params, D)
    annulus = (D >= params.rho) & (D <= params.R)
    annulus_mass = float(np.sum(g.omega[annulus] ** 2 * v[annulus] ** 2))
    lhs = N / 2.0 * annulus_mass + c * norm_omega(g, f * v) ** 2
    rhs = N * params.rho**2 / (2.0 * (params.rho - params.eps) ** 2) * norm_omega(g, v) ** 2
    tol = 1e-10 * max(1.0, abs(rhs))
    support_ok = bool(np.all(f[list(g.frontier)] == 0.0))
    return AgmonReport(lhs, rhs, bool(lhs <= rhs + tol), annulus_mass, float(lam), float(c), float(M),
                       bool(margin.satisfied), support_ok, params)


def agmon_rho_sweep(end: EndFamily, rhos=(0.2, 0.1, 0.05), eps_ratio: float = 0.25, R: float = 10.0,
                    horizon: int = 100, **kw) -> list[AgmonReport]:
    """Re-evaluate the estimate as ``rho`` shrinks (``eps = eps_ratio * rho``)."""
    return [agmon_inequality_check(end, params=CutoffParams(r, eps_ratio * r, R), horizon=horizon, **kw)
            for r in rhos]


# -- rules -------------------------------------------------------------

@dataclass(frozen=True)
class RuleOutcome:
    rule: str
    status: str          # ESA | NotESA | Inconclusive | NotApplicable | Disabled
    detail: dict = field(default_factory=dict)

    @property
    def decisive(self) -> bool:
        return self.status in (ESA, NOT_ESA)

    def as_dict(self) -> dict:
        return {"rule": self.rule, "status": self.status, "detail": self.detail}


@dataclass(frozen=True)
class Verdict:
    status: str
    rule: str
    details: dict
    trail: tuple[RuleOutcome, ...] = ()
    conflict: bool = False
    caveat: str | None = None

    def __post_init__(self):
        if self.status != INCONCLUSIVE and self.rule == RULE_NONE:
            raise ValueError("a decisive verdict needs a rule")

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "rule": self.rule,
            "details": self.details,
            "trail": [t.as_dict() for t in self.trail],
            "conflict": self.conflict,
            "caveat": self.caveat,
        }


def _potential_vanishes(W: sq.Seq, n_check: int = 64) -> bool:
    if W.is_zero:
        return True
    if not W.tail().is_zero:
        return False
    return bool(np.all(W(np.arange(n_check, dtype=float)) == 0.0))


def _ends_of(spec) -> tuple[EndFamily, ...]:
    return (spec,) if isinstance(spec, EndFamily) else tuple(spec.ends)


def rule_noncomplete(spec) -> RuleOutcome:
    scheme = MetricScheme.INV_SQRT_C
    if isinstance(spec, TreeSpec):
        if not _potential_vanishes(spec.W):
            return RuleOutcome(RULE_NONCOMPLETE, NOT_APPLICABLE, {"reason": "potential present"})
        comp = end_completeness(spec, scheme)
        vol = sq.series_test(spec.omega ** 2 * sq.geometric(1.0, float(spec.branching)))
        detail = {"completeness": comp.status.value, "volume_converges": vol.converges}
        if comp.status is Completeness.NON_COMPLETE and vol.converges is True:
            return RuleOutcome(RULE_NONCOMPLETE, NOT_ESA, detail)
        return RuleOutcome(RULE_NONCOMPLETE, NOT_APPLICABLE, detail)
    if isinstance(spec, StarLikeSpec):
        core_pot = spec.core.potential
        if core_pot is not None and np.any(core_pot != 0):
            return RuleOutcome(RULE_NONCOMPLETE, NOT_APPLICABLE, {"reason": "potential present"})
    ends = _ends_of(spec)
    if any(not _potential_vanishes(e.W) for e in ends):
        return RuleOutcome(RULE_NONCOMPLETE, NOT_APPLICABLE, {"reason": "potential present"})
    per_end = []
    fires = False
    for e in ends:
        comp = end_completeness(e, scheme)
        vol = sq.series_test(e.weight ** 2)
        per_end.append({"completeness": comp.status.value, "volume_converges": vol.converges,
                        "length": comp.tail_sum})
        fires |= comp.status is Completeness.NON_COMPLETE and vol.converges is True
    return RuleOutcome(RULE_NONCOMPLETE, NOT_ESA if fires else NOT_APPLICABLE, {"ends": per_end})


def rule_series(spec) -> RuleOutcome:
    if isinstance(spec, TreeSpec):
        return RuleOutcome(RULE_SERIES, NOT_APPLICABLE, {"reason": "not star-like"})
    results = []
    for e in _ends_of(spec):
        a, _ = e.gauge_coefficients()
        r = sq.series_test(a ** -1.0, start=1)
        results.append({"diverges": None if r.converges is None else not r.converges, "method": r.method})
    fires = all(r["diverges"] is True for r in results)
    return RuleOutcome(RULE_SERIES, ESA if fires else NOT_APPLICABLE, {"ends": results})


def rule_agmon(spec, scheme=MetricScheme.MIN_OMEGA) -> RuleOutcome:
    try:
        m = growth_condition_margin(spec, scheme=scheme)
    except EndIsComplete as exc:
        return RuleOutcome(RULE_AGMON, NOT_APPLICABLE, {"reason": str(exc)})
    return RuleOutcome(RULE_AGMON, ESA if m.satisfied is True else NOT_APPLICABLE, m.as_dict())


def rule_weyl(spec, lam: complex = 1j) -> tuple[RuleOutcome, str | None]:
    if isinstance(spec, TreeSpec):
        radial = radial_reduce(spec)
        c = classify_end(radial, lam, audit=True)
        detail = {"radial": c.as_dict(), "sphere_growth": radial.sphere_growth}
        caveat = "radial sector only"
        if c.status == LIMIT_CIRCLE:
            return RuleOutcome(RULE_WEYL, NOT_ESA, detail), caveat
        detail["reason"] = ("radial sector is limit point; other sectors undecided"
                            if c.status == LIMIT_POINT else "radial sector borderline")
        return RuleOutcome(RULE_WEYL, INCONCLUSIVE, detail), caveat
    per_end = [classify_end(e, lam, audit=True) for e in _ends_of(spec)]
    detail = {"ends": [c.as_dict() for c in per_end]}
    if any(c.status == BORDERLINE for c in per_end):
        detail["borderline_ends"] = [i for i, c in enumerate(per_end) if c.status == BORDERLINE]
        return RuleOutcome(RULE_WEYL, INCONCLUSIVE, detail), None
    n = sum(c.deficiency for c in per_end)
    detail["n_plus"] = detail["n_minus"] = n
    return RuleOutcome(RULE_WEYL, NOT_ESA if n > 0 else ESA, detail), None


def classify(spec, lam: complex = 1j, *, disabled_rules=()) -> Verdict:
    """Verdict with the full rule trail.

    ``disabled_rules`` removes rules from consideration (they still appear
    in the trail as ``Disabled``), which is how independent routes are
    cross-validated.
    """
    disabled = set(disabled_rules)
    unknown = disabled - set(RULE_ORDER)
    if unknown:
        raise ValueError(f"unknown rules: {sorted(unknown)}")
    trail: list[RuleOutcome] = []
    caveat = None
    for rule in RULE_ORDER:
        if rule in disabled:
            trail.append(RuleOutcome(rule, DISABLED))
            continue
        if rule == RULE_NONCOMPLETE:
            trail.append(rule_noncomplete(spec))
        elif rule == RULE_SERIES:
            trail.append(rule_series(spec))
        elif rule == RULE_AGMON:
            trail.append(rule_agmon(spec))
        else:
            out, cav = rule_weyl(spec, lam)
            trail.append(out)
            caveat = cav
    decisive = [t for t in trail if t.decisive]
    conflict = len({t.status for t in decisive}) > 1
    if not decisive:
        return Verdict(INCONCLUSIVE, RULE_NONE, {}, tuple(trail), False, caveat)
    first = decisive[0]
    return Verdict(first.status, first.rule, first.detail, tuple(trail), conflict,
                   caveat if first.rule == RULE_WEYL else None)


def root_moduli(verdict: Verdict) -> list[float] | None:
    """Characteristic root moduli from the Weyl entry of the trail, when available."""
    for t in verdict.trail:
        if t.rule != RULE_WEYL:
            continue
        ends = t.detail.get("ends") or ([t.detail["radial"]] if "radial" in t.detail else [])
        for e in ends:
            mods = e.get("evidence", {}).get("moduli") or e.get("routes", {}).get("hyperbolic", {}).get("moduli")
            if mods:
                return list(mods)
    return None
