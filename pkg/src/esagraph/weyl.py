"""Limit-point / limit-circle classification of N-ends.

Everything here works with the gauged form ``Delta_{1,a} + W`` on plain
l2(N). Solutions of ``(H - lambda) u = 0`` obey

    u_{n+1} = t11(n) u_n + t12(n) u_{n-1},
    t11 = (a_n + a_{n+1} + W_n - lambda) / a_{n+1},   t12 = -a_n / a_{n+1},

with ``a_n`` the coefficient of the edge ``(n-1, n)``. Three routes decide
whether every solution is square summable (limit circle, ``dim E = 2``)
or only a line of them is (limit point, ``dim E = 1``):

1. divergence of ``sum 1/a_n`` forces limit point;
2. convergence of the transfer matrices to a hyperbolic limit, whose root
   moduli give exponential decay or growth;
3. QR-stabilized Lyapunov exponents, refined to power exponents for
   polynomially growing coefficients.

Anything the routes cannot separate from the critical case is reported as
``Borderline``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _accel
from . import sequences as sq
from .errors import (
    BorderlineEnd,
    DecayNotCertified,
    DegenerateWronskian,
    IndexOutOfRange,
    TableExhausted,
)
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, radial_u_coefficients

LIMIT_POINT = "LimitPoint"
LIMIT_CIRCLE = "LimitCircle"
BORDERLINE = "Borderline"

HYPERBOLIC_TOL = 1e-9
DECAY_TOL = 1e-8
LYAPUNOV_STEPS = 10_000
SEPARATION = 10.0
# exponents smaller than this are treated as zero whatever the window
# agreement says (the windows agree trivially when both are rounding noise)
LYAPUNOV_FLOOR = 1e-6


def _gauged(end: EndFamily) -> tuple[sq.Seq, sq.Seq]:
    if not isinstance(end, EndFamily):
        raise TypeError(f"expected an EndFamily, got {type(end).__name__}")
    return end.gauge_coefficients()


def _usable_limit(end: EndFamily) -> int | None:
    a, W = _gauged(end)
    lims = [x for x in (a.domain_limit(), W.domain_limit()) if x is not None]
    return min(lims) if lims else None


# -- transfer matrices --------------------------------------------------

@dataclass(frozen=True)
class TransferStep:
    n: int
    matrix: np.ndarray

    @property
    def determinant(self) -> complex:
        return complex(np.linalg.det(self.matrix))


def transfer_coefficients(end: EndFamily, lam: complex, ns) -> tuple[np.ndarray, np.ndarray]:
    """Top-row entries ``(t11, t12)`` at each ``n`` (log-space ratios, no overflow)."""
    a, W = _gauged(end)
    ns = np.atleast_1d(np.asarray(ns, dtype=float))
    if np.any(ns < 1):
        raise IndexOutOfRange("transfer matrices start at n = 1")
    try:
        r = a.ratio(a, ns, ns + 1)
        w = W.ratio(a, ns, ns + 1)
        la, _ = a.logabs(ns + 1)
    except TableExhausted as exc:
        raise IndexOutOfRange(str(exc)) from exc
    w = np.where(np.isfinite(w), w, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        inv = np.exp(-la)
        t11 = (1.0 + r + w) - complex(lam) * inv
    return t11.astype(np.complex128), (-r).astype(np.complex128)


def transfer_matrix(end: EndFamily, lam: complex, n: int) -> TransferStep:
    """Matrix mapping ``(u_n, u_{n-1})`` to ``(u_{n+1}, u_n)``."""
    if int(n) < 1:
        raise IndexOutOfRange(f"n must be >= 1, got {n}")
    t11, t12 = transfer_coefficients(end, lam, [n])
    m = np.array([[t11[0], t12[0]], [1.0, 0.0]], dtype=np.complex128)
    if not np.any(np.iscomplex(m)):
        m = m.real
    return TransferStep(int(n), m)


def characteristic_roots(A) -> np.ndarray:
    """Eigenvalues of a 2x2 companion matrix, sorted by decreasing modulus."""
    A = np.asarray(A)
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = np.sqrt(complex(tr * tr - 4 * det))
    r1 = (tr + disc) / 2 if abs(tr + disc) >= abs(tr - disc) else (tr - disc) / 2
    # the small root from Vieta avoids cancellation
    r2 = det / r1 if r1 != 0 else (tr - disc) / 2
    roots = np.array([r1, r2], dtype=np.complex128)
    return roots[np.argsort(-np.abs(roots), kind="stable")]


@dataclass(frozen=True)
class LimitCertificate:
    matrix: np.ndarray
    certified: bool
    samples: tuple[int, ...]
    differences: tuple[float, ...]


def _certify(samples, mats) -> LimitCertificate:
    """Certified once differences decrease into tolerance and stay there.

    The earliest such sample is returned: geometric coefficients lose
    relative precision at very large ``n`` (their logarithms grow linearly).
    """
    with np.errstate(invalid="ignore"):
        diffs = [float(np.max(np.abs(mats[i + 1] - mats[i]))) for i in range(len(mats) - 1)]
    d = np.asarray(diffs)
    for i in range(2, len(d)):
        if not (d[i - 2] >= d[i - 1] >= d[i]):
            continue
        if np.all(np.isfinite(d[i:])) and np.all(d[i:] <= DECAY_TOL):
            return LimitCertificate(mats[i + 1], True, tuple(int(s) for s in samples), tuple(diffs))
    last = mats[-1] if mats else np.full((2, 2), np.nan)
    return LimitCertificate(last, False, tuple(int(s) for s in samples), tuple(diffs))


def _dyadic_samples(limit: int | None, kmax: int = 20) -> list[int]:
    ks = [2**k for k in range(2, kmax + 1)]
    if limit is not None:
        ks = [k for k in ks if k + 1 <= limit]
    return ks


def limit_matrix(end: EndFamily, lam: complex = 1j, kmax: int = 20) -> LimitCertificate:
    """Sample ``T_n`` at ``n = 4, 8, ..., 2**kmax`` and certify convergence."""
    samples = _dyadic_samples(_usable_limit(end), kmax)
    if len(samples) < 4:
        return LimitCertificate(np.full((2, 2), np.nan), False, tuple(samples), ())
    t11, t12 = transfer_coefficients(end, lam, samples)
    mats = [np.array([[x, y], [1.0, 0.0]]) for x, y in zip(t11, t12)]
    return _certify(samples, mats)


@dataclass(frozen=True)
class HyperbolicResult:
    kind: str                 # AllDecay | GrowthSubspace | NonHyperbolic
    growth_dim: int
    roots: tuple[complex, ...]

    @property
    def moduli(self) -> tuple[float, ...]:
        return tuple(abs(r) for r in self.roots)


def hyperbolic_classify(A, certified: bool = True, tol: float = HYPERBOLIC_TOL) -> HyperbolicResult:
    """Exponential dichotomy from the root moduli of the limit matrix."""
    if not certified:
        raise DecayNotCertified("transfer matrices are not certified to converge")
    roots = characteristic_roots(A)
    mods = np.abs(roots)
    if np.any(np.abs(mods - 1.0) <= tol):
        return HyperbolicResult("NonHyperbolic", 0, tuple(complex(r) for r in roots))
    m = int(np.sum(mods > 1.0 + tol))
    kind = "AllDecay" if m == 0 else "GrowthSubspace"
    return HyperbolicResult(kind, m, tuple(complex(r) for r in roots))


# -- Lyapunov / power exponents ------------------------------------------

@dataclass(frozen=True)
class LyapunovEstimate:
    exponents: tuple[float, float]
    widths: tuple[float, float]
    power_exponents: tuple[float, float] | None = None
    power_widths: tuple[float, float] | None = None
    steps: int = 0


def lyapunov_estimate(end: EndFamily, lam: complex = 1j, steps: int = LYAPUNOV_STEPS,
                      start: int = 1) -> LyapunovEstimate:
    """Growth rates of the two independent solutions.

    Exponents per step come from two disjoint windows ``[N/2, 3N/4]`` and
    ``[3N/4, N]``; power exponents ``log|u| / log n`` from ``[N/16, N/4]``
    and ``[N/4, N]``. The reported value uses the later window, the width is
    the disagreement between the two.
    """
    lim = _usable_limit(end)
    if lim is not None:
        steps = min(steps, lim - 1 - start)
    if steps < 64:
        raise IndexOutOfRange("not enough coefficients for a Lyapunov estimate")
    ns = np.arange(start, start + steps, dtype=float)
    t11, t12 = transfer_coefficients(end, lam, ns)
    bad = ~(np.isfinite(t11) & np.isfinite(t12) & (t12 != 0))
    if bad.any():
        # coefficients left the floating point range; keep the usable prefix
        steps = int(np.argmax(bad))
        if steps < 64:
            raise IndexOutOfRange("transfer coefficients overflow before a Lyapunov estimate is possible")
        t11, t12 = t11[:steps], t12[:steps]
    s1, s2 = _accel.qr_log_growth(t11, t12)
    S = (np.concatenate([[0.0], s1]), np.concatenate([[0.0], s2]))

    def rate(j, i0, i1):
        return (S[j][i1] - S[j][i0]) / (i1 - i0)

    N = steps
    h, q3 = N // 2, (3 * N) // 4
    ex = tuple(rate(j, q3, N) for j in (0, 1))
    wd = tuple(abs(rate(j, h, q3) - rate(j, q3, N)) for j in (0, 1))
    # S[j][i] accumulates steps n = start .. start + i - 1, i.e. the size of u at n = start + i
    def power(j, i0, i1):
        return (S[j][i1] - S[j][i0]) / math.log((start + i1) / (start + i0))

    i16, i4 = N // 16, N // 4
    pw = tuple(power(j, i4, N) for j in (0, 1))
    pwd = tuple(abs(power(j, i16, i4) - power(j, i4, N)) for j in (0, 1))
    return LyapunovEstimate(ex, wd, pw, pwd, N)


def _separated(value: float, center: float, width: float, floor: float = 0.0) -> bool:
    return abs(value - center) > max(SEPARATION * width, floor)


# -- classification -----------------------------------------------------

@dataclass(frozen=True)
class EndClassification:
    status: str
    dimE: int | None
    evidence: dict
    route: str
    conflict: bool = False
    routes: dict = field(default_factory=dict)

    def __post_init__(self):
        expected = {LIMIT_CIRCLE: 2, LIMIT_POINT: 1, BORDERLINE: None}[self.status]
        if self.dimE != expected:
            raise ValueError(f"{self.status} requires dimE = {expected}")

    @property
    def deficiency(self) -> int | None:
        return None if self.dimE is None else self.dimE - 1

    def as_dict(self) -> dict:
        return {"status": self.status, "dimE": self.dimE, "route": self.route,
                "evidence": self.evidence, "conflict": self.conflict, "routes": self.routes}


def _lp(route, evidence):
    return EndClassification(LIMIT_POINT, 1, evidence, route)


def _lc(route, evidence):
    return EndClassification(LIMIT_CIRCLE, 2, evidence, route)


def _series_route(end: EndFamily) -> EndClassification | None:
    a, _ = _gauged(end)
    res = sq.series_test(a ** -1.0, start=1)
    evidence = {"kind": "SeriesTest", "converges": res.converges, "method": res.method,
                "order": list(res.order) if res.order else None}
    if res.converges is False:
        return _lp("series", evidence)
    return None


def _hyperbolic_route(end: EndFamily, lam: complex) -> tuple[EndClassification | None, dict]:
    cert = limit_matrix(end, lam)
    info = {"kind": "HyperbolicRoots", "certified": cert.certified,
            "last_difference": cert.differences[-1] if cert.differences else None}
    if not cert.certified:
        return None, info
    res = hyperbolic_classify(cert.matrix, True)
    info.update(result=res.kind, growth_dim=res.growth_dim,
                roots=[[r.real, r.imag] for r in res.roots], moduli=list(res.moduli))
    if res.kind == "AllDecay":
        return _lc("hyperbolic", info), info
    if res.kind == "GrowthSubspace" and res.growth_dim == 1:
        return _lp("hyperbolic", info), info
    return None, info


def _lyapunov_route(end: EndFamily, lam: complex, steps: int) -> tuple[EndClassification | None, dict]:
    try:
        est = lyapunov_estimate(end, lam, steps)
    except IndexOutOfRange as exc:
        return None, {"kind": "LyapunovEstimate", "error": str(exc)}
    info = {"kind": "LyapunovEstimate", "exponents": list(est.exponents), "widths": list(est.widths),
            "steps": est.steps}
    g1, g2 = est.exponents
    w1, w2 = est.widths
    sep1 = _separated(g1, 0.0, w1, LYAPUNOV_FLOOR)
    sep2 = _separated(g2, 0.0, w2, LYAPUNOV_FLOOR)
    if sep1 and sep2:
        decaying = int(g1 < 0) + int(g2 < 0)
        if decaying == 2:
            return _lc("lyapunov", info), info
        if decaying == 1:
            return _lp("lyapunov", info), info
        return None, info
    if sep2 and g2 < 0 and sep1 and g1 > 0:
        return _lp("lyapunov", info), info
    # zero exponents: polynomial behaviour, decided by power exponents when
    # the coefficients themselves grow polynomially
    a, _ = _gauged(end)
    order = a.tail().order()
    if order is None or abs(order[0] - 1.0) > 1e-12:
        return None, info
    q1, q2 = est.power_exponents
    v1, v2 = est.power_widths
    info.update(kind="PowerExponents", power_exponents=[q1, q2], power_widths=[v1, v2])
    s1 = _separated(q1, -0.5, v1)
    s2 = _separated(q2, -0.5, v2)
    if s1 and q1 < -0.5:
        return _lc("lyapunov-power", info), info
    if s1 and s2 and q1 > -0.5 and q2 < -0.5:
        return _lp("lyapunov-power", info), info
    return None, info


def classify_end(end: EndFamily, lam: complex = 1j, *, audit: bool = False,
                 steps: int = LYAPUNOV_STEPS) -> EndClassification:
    """Limit point / limit circle / borderline for one end (default ``lambda = i``).

    With ``audit=True`` every route is run and ``conflict`` is set when two
    decisive routes disagree.
    """
    lam = complex(lam)
    routes: dict = {}
    decided: list[EndClassification] = []

    res = _series_route(end)
    routes["series"] = res.evidence if res else {"kind": "SeriesTest", "decisive": False}
    if res:
        decided.append(res)
    if audit or not decided:
        res2, info = _hyperbolic_route(end, lam)
        routes["hyperbolic"] = info
        if res2:
            decided.append(res2)
    if audit or not decided:
        res3, info = _lyapunov_route(end, lam, steps)
        routes["lyapunov"] = info
        if res3:
            decided.append(res3)
    conflict = len({d.status for d in decided}) > 1
    if not decided:
        last = routes.get("lyapunov") or routes.get("hyperbolic") or {}
        return EndClassification(BORDERLINE, None, last, "none", conflict, routes)
    first = decided[0]
    return EndClassification(first.status, first.dimE, first.evidence, first.route, conflict, routes)


# -- Wronskian ----------------------------------------------------------

def solve_recurrence(end: EndFamily, lam: complex, u0: complex, u1: complex, horizon: int) -> np.ndarray:
    """``u_0 .. u_horizon`` of ``(H - lambda) u = 0`` away from the root."""
    if horizon < 2:
        raise IndexOutOfRange("horizon must be >= 2")
    t11, t12 = transfer_coefficients(end, lam, np.arange(1, horizon))
    return _accel.propagate(t11, t12, u0, u1)


def wronskian(u, v) -> np.ndarray:
    """``W_n = u_n v_{n-1} - u_{n-1} v_n`` for ``n = 1 ..``."""
    u = np.asarray(u)
    v = np.asarray(v)
    return u[1:] * v[:-1] - u[:-1] * v[1:]


def wronskian_residual(end: EndFamily, u, v, horizon: int | None = None) -> float:
    """Largest relative deviation of ``a_n W_n`` from ``a_1 W_1``."""
    u = np.asarray(u)
    v = np.asarray(v)
    H = len(u) - 1 if horizon is None else int(horizon)
    if len(u) < H + 1 or len(v) < H + 1:
        raise IndexOutOfRange("u and v must cover 0 .. horizon")
    Wn = wronskian(u[: H + 1], v[: H + 1])
    a, _ = _gauged(end)
    ns = np.arange(1, H + 1, dtype=float)
    # a_n / a_1 in log space: a_n itself may overflow
    ratio = a.ratio(a, ns, np.ones_like(ns))
    scale = abs(u[1] * v[0]) + abs(u[0] * v[1])
    if Wn[0] == 0 or abs(Wn[0]) <= 1e-14 * scale:
        raise DegenerateWronskian("u and v are proportional")
    conserved = Wn * ratio
    return float(np.max(np.abs(conserved - Wn[0])) / abs(Wn[0]))


# -- deficiency indices --------------------------------------------------

@dataclass(frozen=True)
class DeficiencyReport:
    n_plus: int
    n_minus: int
    per_end: tuple[EndClassification, ...]

    def as_dict(self) -> dict:
        return {"n_plus": self.n_plus, "n_minus": self.n_minus,
                "per_end": [e.as_dict() for e in self.per_end]}


def deficiency_indices(spec, lam: complex = 1j) -> DeficiencyReport:
    """Sum of ``dim E - 1`` over the ends (the core does not contribute)."""
    ends = (spec,) if isinstance(spec, EndFamily) else tuple(spec.ends)
    per_end = tuple(classify_end(e, lam) for e in ends)
    bad = [i for i, c in enumerate(per_end) if c.status == BORDERLINE]
    if bad:
        raise BorderlineEnd(bad)
    n = sum(c.deficiency for c in per_end)
    return DeficiencyReport(n, n, per_end)


# -- radial recurrence on trees -----------------------------------------

def radial_limit(tree: TreeSpec, lam: complex = 0.0, kmax: int = 20) -> LimitCertificate:
    """Limit of the depth-coordinate transfer matrices of a tree's radial sector."""
    co = radial_u_coefficients(tree)
    f, d, b = co["forward"], co["diag"], co["backward"]
    samples = _dyadic_samples(None, kmax)
    ns = np.asarray(samples, dtype=float)
    with np.errstate(over="ignore"):
        inv = np.exp(-f.logabs(ns)[0])
    t11 = -d.ratio(f, ns) + complex(lam) * inv * np.sign(f(1.0))
    t12 = -b.ratio(f, ns)
    mats = [np.array([[x, y], [1.0, 0.0]]) for x, y in zip(t11, t12)]
    return _certify(samples, mats)


def radial_characteristic_roots(tree: TreeSpec) -> np.ndarray:
    """Roots of the limiting characteristic polynomial in depth coordinates."""
    cert = radial_limit(tree)
    if not cert.certified:
        raise DecayNotCertified("radial transfer matrices do not converge")
    return characteristic_roots(cert.matrix)
