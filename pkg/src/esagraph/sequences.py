"""Coefficient sequences indexed by a vertex/edge counter ``n``.

A sequence is an expression tree. Closed-form leaves are sums of
monomials ``k * rho**n * prod_i (n + h_i)**s_i``; tabulated and opaque
callables are also allowed. Every node can report ``log|x_n|`` and the
sign of ``x_n`` so that ratios of very large coefficients (``4**n`` at
``n = 10**4``) can be formed without overflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence as TypingSequence

import numpy as np
from scipy import special

from .errors import TableExhausted

# Like-term keys are rounded so that float noise in rho/shift does not
# prevent symbolic cancellation.
_KEY_DIGITS = 12
_ZERO_REL = 1e-13

ArrayLike = "np.ndarray | int | float"


def _as_index(n) -> np.ndarray:
    return np.asarray(n, dtype=float)


def _merge_factors(factors: Iterable[tuple[float, float]]) -> tuple[tuple[float, float], ...]:
    acc: dict[float, list[float]] = {}
    for h, p in factors:
        key = round(float(h), _KEY_DIGITS)
        if key in acc:
            acc[key][1] += float(p)
        else:
            acc[key] = [float(h), float(p)]
    out = [(h, p) for h, p in acc.values() if abs(p) > 1e-15]
    return tuple(sorted(out))


@dataclass(frozen=True)
class Monomial:
    """``k * exp(n * log_rho) * prod (n + shift)**power``."""

    k: float
    log_rho: float = 0.0
    factors: tuple[tuple[float, float], ...] = ()

    @property
    def rho(self) -> float:
        return math.exp(self.log_rho)

    @property
    def power(self) -> float:
        return sum(p for _, p in self.factors)

    def key(self):
        return (
            round(self.log_rho, _KEY_DIGITS),
            tuple((round(h, _KEY_DIGITS), round(p, _KEY_DIGITS)) for h, p in self.factors),
        )

    def logabs(self, n: np.ndarray) -> np.ndarray:
        out = np.full(n.shape, math.log(abs(self.k))) + n * self.log_rho
        for h, p in self.factors:
            with np.errstate(divide="ignore", invalid="ignore"):
                out = out + p * np.log(n + h)
        return out

    def value(self, n: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = self.k * np.exp(n * self.log_rho) if self.log_rho else np.full(n.shape, self.k)
            for h, p in self.factors:
                out = out * np.power(n + h, p)
        return out

    def __mul__(self, other: "Monomial") -> "Monomial":
        return Monomial(
            self.k * other.k,
            self.log_rho + other.log_rho,
            _merge_factors(self.factors + other.factors),
        )

    def __pow__(self, q: float) -> "Monomial":
        if self.k < 0 and not float(q).is_integer():
            raise ValueError("fractional power of a negative monomial")
        return Monomial(
            math.copysign(abs(self.k) ** q, self.k if float(q) % 2 else 1.0),
            self.log_rho * q,
            tuple((h, p * q) for h, p in self.factors),
        )

    def shifted(self, d: float) -> "Monomial":
        return Monomial(
            self.k * math.exp(self.log_rho * d),
            self.log_rho,
            tuple((h + d, p) for h, p in self.factors),
        )

    def is_monotone_nonincreasing(self) -> bool:
        return self.k > 0 and self.log_rho <= 0 and all(p <= 0 for _, p in self.factors)

    def is_monotone_nondecreasing(self) -> bool:
        return self.k > 0 and self.log_rho >= 0 and all(p >= 0 for _, p in self.factors)


def _combine(monos: Iterable[Monomial]) -> tuple[Monomial, ...]:
    groups: dict = {}
    scale: dict = {}
    for m in monos:
        key = m.key()
        if key in groups:
            prev = groups[key]
            groups[key] = Monomial(prev.k + m.k, prev.log_rho, prev.factors)
            scale[key] = max(scale[key], abs(m.k))
        else:
            groups[key] = m
            scale[key] = abs(m.k)
    out = [m for key, m in groups.items() if abs(m.k) > _ZERO_REL * scale[key] and m.k != 0.0]
    return tuple(sorted(out, key=lambda m: (m.log_rho, m.power), reverse=True))


def _logsumexp_signed(parts: list[tuple[np.ndarray, np.ndarray]]) -> tuple[np.ndarray, np.ndarray]:
    logs = np.stack([lg for lg, _ in parts])
    signs = np.stack([sg for _, sg in parts])
    top = np.max(np.where(np.isfinite(logs), logs, -np.inf), axis=0)
    safe_top = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(over="ignore", invalid="ignore"):
        total = np.sum(signs * np.exp(logs - safe_top), axis=0)
    with np.errstate(divide="ignore"):
        return safe_top + np.log(np.abs(total)), np.sign(total)


class Seq:
    """Base class of the sequence expression tree."""

    #: symbolic monomial form, or None when the node is not closed-form
    monomials: tuple[Monomial, ...] | None = None

    # -- evaluation --------------------------------------------------
    def logabs(self, n) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def values(self, n: np.ndarray) -> np.ndarray:
        """Direct evaluation (may overflow to inf; see :meth:`logabs`)."""
        lg, sg = self.logabs(n)
        with np.errstate(over="ignore"):
            return sg * np.exp(lg)

    def __call__(self, n):
        n_arr = _as_index(n)
        out = self.values(np.atleast_1d(n_arr))
        return out if n_arr.ndim else float(out[0])

    def ratio(self, other: "Seq", n, other_n=None) -> np.ndarray:
        """``self(n) / other(other_n)``.

        Evaluated directly where both values are finite normal numbers and in
        log space elsewhere, so that ``4**n / 4**(n+1)`` is exact-ish at
        ``n = 10**4``.
        """
        n_arr = np.atleast_1d(_as_index(n))
        m_arr = n_arr if other_n is None else np.atleast_1d(_as_index(other_n))
        x = self.values(n_arr)
        y = other.values(m_arr)
        tiny = np.finfo(float).tiny
        good = np.isfinite(x) & np.isfinite(y) & (np.abs(y) > tiny) & ((np.abs(x) > tiny) | (x == 0))
        out = np.empty(n_arr.shape)
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out[good] = x[good] / y[good]
            if not np.all(good):
                bad = ~good
                l1, s1 = self.logabs(n_arr[bad])
                l2, s2 = other.logabs(m_arr[bad])
                out[bad] = s1 * s2 * np.exp(l1 - l2)
        return out

    # -- structure ----------------------------------------------------
    def order(self) -> tuple[float, float] | None:
        """Asymptotic order ``(rho, s)`` with ``|x_n| ~ rho**n n**s``."""
        return None

    @property
    def is_zero(self) -> bool:
        return self.monomials is not None and len(self.monomials) == 0

    @property
    def is_closed_form(self) -> bool:
        return self.monomials is not None

    def domain_limit(self) -> int | None:
        """Largest index at which the sequence is defined (None = unbounded)."""
        return None

    def tail(self) -> "Seq":
        """Sequence agreeing with this one for all large ``n`` (drops patched heads)."""
        return self

    # -- algebra ------------------------------------------------------
    def __add__(self, other) -> "Seq":
        other = as_seq(other)
        if self.monomials is not None and other.monomials is not None:
            return Poly(self.monomials + other.monomials)
        return SumSeq((self, other))

    __radd__ = __add__

    def __neg__(self) -> "Seq":
        return self * -1.0

    def __sub__(self, other) -> "Seq":
        return self + (-as_seq(other))

    def __rsub__(self, other) -> "Seq":
        return as_seq(other) - self

    def __mul__(self, other) -> "Seq":
        other = as_seq(other)
        if self.monomials is not None and other.monomials is not None:
            return Poly(a * b for a in self.monomials for b in other.monomials)
        return ProdSeq((self, other))

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Seq":
        return self * (as_seq(other) ** -1.0)

    def __rtruediv__(self, other) -> "Seq":
        return as_seq(other) * (self ** -1.0)

    def __pow__(self, q: float) -> "Seq":
        if self.monomials is not None and len(self.monomials) == 1:
            return Poly((self.monomials[0] ** q,))
        if self.monomials is not None and float(q).is_integer() and q >= 0:
            out: Seq = Poly((Monomial(1.0),))
            for _ in range(int(q)):
                out = out * self
            return out
        return PowSeq(self, float(q))

    def shift(self, d: int) -> "Seq":
        """The sequence ``n -> x_{n+d}``."""
        if d == 0:
            return self
        if self.monomials is not None:
            return Poly(m.shifted(d) for m in self.monomials)
        return ShiftSeq(self, d)

    def with_initial(self, values: TypingSequence[float]) -> "Seq":
        """Override the first ``len(values)`` entries."""
        return Patched(self, tuple(float(v) for v in values))


def as_seq(x) -> Seq:
    if isinstance(x, Seq):
        return x
    x = float(x)
    return Poly(()) if x == 0.0 else Poly((Monomial(x),))


class Poly(Seq):
    """Finite sum of monomials with like terms merged."""

    def __init__(self, monos: Iterable[Monomial]):
        self.monomials = _combine(monos)

    def __repr__(self) -> str:
        return f"Poly({list(self.monomials)!r})"

    def logabs(self, n):
        n = np.asarray(n, dtype=float)
        if not self.monomials:
            return np.full(n.shape, -np.inf), np.zeros(n.shape)
        if len(self.monomials) == 1:
            m = self.monomials[0]
            return m.logabs(n), np.full(n.shape, math.copysign(1.0, m.k))
        return _logsumexp_signed(
            [(m.logabs(n), np.full(n.shape, math.copysign(1.0, m.k))) for m in self.monomials]
        )

    def values(self, n):
        n = np.asarray(n, dtype=float)
        if not self.monomials:
            return np.zeros(n.shape)
        with np.errstate(over="ignore", invalid="ignore"):
            vals = [m.value(n) for m in self.monomials]
            out = np.sum(vals, axis=0)
        if len(vals) > 1:
            # fall back to log-space where terms overflow
            bad = ~np.isfinite(out)
            if np.any(bad):
                out[bad] = Seq.values(self, n[bad])
        return out

    def order(self):
        if not self.monomials:
            return None
        top = self.monomials[0]
        lead = [m for m in self.monomials if m.key()[0] == top.key()[0] and abs(m.power - top.power) < 1e-12]
        if len(lead) == 1:
            return (top.rho, top.power)
        return _numeric_order(self, top.log_rho)


def _numeric_order(seq: Seq, log_rho: float) -> tuple[float, float] | None:
    # leading terms of equal order may cancel (differences of shifted
    # powers); recover the surviving power from the log-slope
    n1, n2 = 2.0e4, 2.0e5
    lg, _ = seq.logabs(np.array([n1, n2]))
    if not np.all(np.isfinite(lg)):
        return None
    s = (lg[1] - lg[0] - (n2 - n1) * log_rho) / math.log(n2 / n1)
    return (math.exp(log_rho), float(s))


def _patch_overflow(seq: "Seq", n: np.ndarray, out: np.ndarray) -> np.ndarray:
    bad = ~np.isfinite(out)
    if np.any(bad):
        out = np.array(out, dtype=float)
        out[bad] = Seq.values(seq, n[bad])
    return out


class Table(Seq):
    """Explicit values for ``n = start, start+1, ...``."""

    def __init__(self, values: TypingSequence[float], start: int = 0):
        self.table = np.asarray(values, dtype=float)
        self.start = int(start)

    def __repr__(self) -> str:
        return f"Table(len={len(self.table)}, start={self.start})"

    def domain_limit(self):
        return self.start + len(self.table) - 1

    def values(self, n):
        self.logabs(n)  # range check
        return self.table[np.rint(np.asarray(n, dtype=float)).astype(np.int64) - self.start].copy()

    def logabs(self, n):
        n = np.asarray(n, dtype=float)
        idx = np.rint(n).astype(np.int64) - self.start
        if np.any(idx < 0) or np.any(idx >= len(self.table)):
            raise TableExhausted(
                f"table covers n in [{self.start}, {self.domain_limit()}], "
                f"requested [{int(n.min())}, {int(n.max())}]"
            )
        v = self.table[idx]
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)


class Func(Seq):
    """Opaque vectorized callable with an optional declared order."""

    def __init__(self, fn: Callable[[np.ndarray], np.ndarray], order: tuple[float, float] | None = None):
        self.fn = fn
        self._order = order

    def values(self, n):
        v = np.asarray(self.fn(np.asarray(n, dtype=float)), dtype=float)
        return np.array(np.broadcast_to(v, np.shape(n)), dtype=float)

    def logabs(self, n):
        v = np.asarray(self.fn(np.asarray(n, dtype=float)), dtype=float)
        v = np.broadcast_to(v, np.shape(n))
        with np.errstate(divide="ignore"):
            return np.log(np.abs(v)), np.sign(v)

    def order(self):
        return self._order


class SumSeq(Seq):
    def __init__(self, parts: tuple[Seq, ...]):
        flat: list[Seq] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, SumSeq) else (p,))
        self.parts = tuple(q for q in flat if not q.is_zero)

    def values(self, n):
        n = np.asarray(n, dtype=float)
        if not self.parts:
            return np.zeros(n.shape)
        with np.errstate(invalid="ignore"):
            out = np.sum([p.values(n) for p in self.parts], axis=0)
        return _patch_overflow(self, n, out)

    def logabs(self, n):
        n = np.asarray(n, dtype=float)
        if not self.parts:
            return np.full(n.shape, -np.inf), np.zeros(n.shape)
        return _logsumexp_signed([p.logabs(n) for p in self.parts])

    def domain_limit(self):
        lims = [p.domain_limit() for p in self.parts if p.domain_limit() is not None]
        return min(lims) if lims else None

    def order(self):
        orders = [p.order() for p in self.parts]
        if any(o is None for o in orders):
            return None
        log_rho = max(math.log(o[0]) for o in orders)
        return _numeric_order(self, log_rho)


class ProdSeq(Seq):
    def __init__(self, parts: tuple[Seq, ...]):
        flat: list[Seq] = []
        for p in parts:
            flat.extend(p.parts if isinstance(p, ProdSeq) else (p,))
        self.parts = tuple(flat)

    def values(self, n):
        n = np.asarray(n, dtype=float)
        out = np.ones(n.shape)
        with np.errstate(over="ignore", invalid="ignore"):
            for p in self.parts:
                out = out * p.values(n)
        return _patch_overflow(self, n, out)

    def logabs(self, n):
        n = np.asarray(n, dtype=float)
        total = np.zeros(n.shape)
        sign = np.ones(n.shape)
        for p in self.parts:
            lg, sg = p.logabs(n)
            total = total + lg
            sign = sign * sg
        return total, sign

    def domain_limit(self):
        lims = [p.domain_limit() for p in self.parts if p.domain_limit() is not None]
        return min(lims) if lims else None

    def order(self):
        rho, s = 1.0, 0.0
        for p in self.parts:
            o = p.order()
            if o is None:
                return None
            rho *= o[0]
            s += o[1]
        return (rho, s)


class PowSeq(Seq):
    def __init__(self, base: Seq, q: float):
        self.base = base
        self.q = q

    def values(self, n):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            out = np.power(self.base.values(n), self.q)
        return _patch_overflow(self, np.asarray(n, dtype=float), out)

    def logabs(self, n):
        lg, sg = self.base.logabs(n)
        if not float(self.q).is_integer() and np.any(sg < 0):
            raise ValueError("fractional power of a sequence with negative entries")
        sign = sg ** int(self.q) if float(self.q).is_integer() else np.ones_like(sg)
        return self.q * lg, sign

    def domain_limit(self):
        return self.base.domain_limit()

    def order(self):
        o = self.base.order()
        return None if o is None else (o[0] ** self.q, o[1] * self.q)


class ShiftSeq(Seq):
    def __init__(self, base: Seq, d: int):
        self.base = base
        self.d = int(d)

    def values(self, n):
        return self.base.values(np.asarray(n, dtype=float) + self.d)

    def logabs(self, n):
        return self.base.logabs(np.asarray(n, dtype=float) + self.d)

    def domain_limit(self):
        lim = self.base.domain_limit()
        return None if lim is None else lim - self.d

    def order(self):
        return self.base.order()


class MinSeq(Seq):
    """Pointwise minimum of two positive sequences."""

    def __init__(self, a: Seq, b: Seq):
        self.a, self.b = a, b

    def values(self, n):
        return np.minimum(self.a.values(n), self.b.values(n))

    def logabs(self, n):
        la, sa = self.a.logabs(n)
        lb, sb = self.b.logabs(n)
        return np.minimum(la, lb), np.ones_like(sa)

    def domain_limit(self):
        lims = [x for x in (self.a.domain_limit(), self.b.domain_limit()) if x is not None]
        return min(lims) if lims else None

    def order(self):
        oa, ob = self.a.order(), self.b.order()
        if oa is None or ob is None:
            return None
        return min(oa, ob, key=lambda o: (o[0], o[1]))


class Patched(Seq):
    def __init__(self, base: Seq, head: tuple[float, ...]):
        self.base = base
        self.head = np.asarray(head, dtype=float)

    def values(self, n):
        n = np.asarray(n, dtype=float)
        idx = np.rint(n).astype(np.int64)
        in_head = (idx >= 0) & (idx < len(self.head))
        out = np.empty(n.shape)
        if np.any(~in_head):
            out[~in_head] = self.base.values(n[~in_head])
        out[in_head] = self.head[idx[in_head]]
        return out

    def logabs(self, n):
        n = np.asarray(n, dtype=float)
        idx = np.rint(n).astype(np.int64)
        in_head = (idx >= 0) & (idx < len(self.head))
        lg = np.empty(n.shape)
        sg = np.empty(n.shape)
        if np.any(~in_head):
            lb, sb = self.base.logabs(n[~in_head])
            lg[~in_head], sg[~in_head] = lb, sb
        hv = self.head[idx[in_head]]
        with np.errstate(divide="ignore"):
            lg[in_head] = np.log(np.abs(hv))
        sg[in_head] = np.sign(hv)
        return lg, sg

    def domain_limit(self):
        return self.base.domain_limit()

    def order(self):
        return self.base.order()

    def tail(self):
        return self.base.tail()


def minimum(a: Seq, b: Seq) -> Seq:
    """Pointwise minimum, kept closed-form when one side dominates everywhere."""
    if a.monomials is not None and b.monomials is not None and len(a.monomials) == len(b.monomials) == 1:
        ma, mb = a.monomials[0], b.monomials[0]
        # b is a shift of a: decide by monotonicity of a
        for d in (1, -1):
            if ma.shifted(d).key() == mb.key() and math.isclose(ma.shifted(d).k, mb.k, rel_tol=1e-12):
                later, earlier = (b, a) if d == 1 else (a, b)
                src = ma if d == 1 else mb
                if src.is_monotone_nonincreasing():
                    return later
                if src.is_monotone_nondecreasing():
                    return earlier
    return MinSeq(a, b)


# -- constructors used by the family schema ---------------------------

def power(k: float = 1.0, s: float = 0.0, shift: float = 0.0) -> Seq:
    """``k * (n + shift)**s``."""
    return Poly((Monomial(float(k), 0.0, _merge_factors([(shift, s)])),))


def geometric(k: float = 1.0, rho: float = 1.0, shift: float = 0.0) -> Seq:
    """``k * rho**(n + shift)``."""
    if rho <= 0:
        raise ValueError("geometric ratio must be positive")
    return Poly((Monomial(float(k) * rho ** shift, math.log(rho)),))


def monomial(k: float = 1.0, rho: float = 1.0, factors: TypingSequence[TypingSequence[float]] = ()) -> Seq:
    return Poly((Monomial(float(k), math.log(rho), _merge_factors(tuple(map(tuple, factors)))),))


ZERO = Poly(())
ONE = Poly((Monomial(1.0),))


# -- series -----------------------------------------------------------

@dataclass(frozen=True)
class SeriesResult:
    converges: bool | None
    method: str  # "analytic" | "numeric"
    order: tuple[float, float] | None = None


_RHO_TOL = 1e-12
_S_TOL = 1e-6


def order_converges(order: tuple[float, float]) -> bool:
    rho, s = order
    if rho < 1 - _RHO_TOL:
        return True
    if rho > 1 + _RHO_TOL:
        return False
    return s < -1 - _S_TOL


def series_test(seq: Seq, start: int = 0, sample: int = 1000, margin: float = 0.1) -> SeriesResult:
    """Decide whether ``sum_{n >= start} |x_n|`` is finite.

    Closed-form or declared orders are decided exactly by the p-series /
    geometric rules. Otherwise the terms at ``h`` and ``2h`` are compared
    and the result is ``None`` whenever the fitted power sits within
    ``margin`` of -1.
    """
    o = seq.order()
    if o is not None:
        return SeriesResult(order_converges(o), "analytic", o)
    lim = seq.domain_limit()
    h = sample
    if lim is not None:
        h = min(h, (lim - start) // 4)
    if h < 4:
        return SeriesResult(None, "numeric")
    lg, _ = seq.logabs(np.array([h, 2 * h, 4 * h], dtype=float) + start)
    if not np.all(np.isfinite(lg)):
        return SeriesResult(None, "numeric")
    d1, d2 = lg[1] - lg[0], lg[2] - lg[1]
    # a power law repeats its increment over each doubling, a geometric
    # sequence doubles it
    if abs(d2 - 2 * d1) < abs(d2 - d1):
        rate = (d2 - d1) / h
        if abs(rate) < 1e-9:
            return SeriesResult(None, "numeric")
        return SeriesResult(rate < 0, "numeric", (math.exp(rate), 0.0))
    log_ratio = d2
    s = log_ratio / math.log(2.0)
    if s >= -1 + margin:
        return SeriesResult(False, "numeric", (1.0, s))
    if s <= -1 - margin:
        return SeriesResult(True, "numeric", (1.0, s))
    return SeriesResult(None, "numeric", (1.0, s))


def tail_sums(seq: Seq, n, *, horizon: int = 10**6) -> np.ndarray:
    """``sum_{m >= n} x_m`` for each entry of ``n`` (terms assumed positive, summable)."""
    n_arr = np.atleast_1d(np.asarray(n, dtype=np.int64))
    mono = seq.monomials
    if mono is not None and len(mono) == 1:
        m = mono[0]
        if not m.factors and m.log_rho < 0:
            return m.k * np.exp(n_arr * m.log_rho) / (1.0 - m.rho)
        if m.log_rho == 0.0 and len(m.factors) == 1 and m.factors[0][1] < -1:
            h, p = m.factors[0]
            return m.k * special.zeta(-p, n_arr + h)
    return _numeric_tail(seq, n_arr, horizon)


def _numeric_tail(seq: Seq, n_arr: np.ndarray, horizon: int) -> np.ndarray:
    lo = int(n_arr.min())
    lim = seq.domain_limit()
    o = seq.order()
    geometric_like = o is not None and o[0] < 1 - _RHO_TOL
    if geometric_like:
        span = int(min(horizon, 60.0 / max(-math.log(o[0]), 1e-3) + 64))
    else:
        span = horizon
    hi = int(n_arr.max()) + span
    if lim is not None:
        hi = min(hi, lim)
    ms = np.arange(lo, hi + 1, dtype=float)
    terms = seq(ms)
    # suffix sums over [m, hi]
    suffix = np.cumsum(terms[::-1])[::-1]
    rem = _remainder(seq, hi, terms)
    return suffix[n_arr - lo] + rem


def _remainder(seq: Seq, hi: int, terms: np.ndarray) -> float:
    """Estimate ``sum_{m > hi} x_m`` from the local behaviour at ``hi``."""
    if len(terms) < 3:
        return 0.0
    last = terms[-1]
    if last == 0:
        return 0.0
    j = max(len(terms) // 2, 1)
    mid = terms[-1 - j]
    if mid <= 0 or last <= 0:
        return 0.0
    o = seq.order()
    if o is not None and o[0] < 1 - _RHO_TOL:
        r = o[0]
        return last * r / (1 - r)
    rate = math.log(last / mid) / j
    if rate < -1e-3:
        r = math.exp(rate)
        return last * r / (1 - r)
    m_hi = float(hi)
    m_mid = float(hi - j)
    s = math.log(last / mid) / math.log(m_hi / m_mid) if m_mid > 0 else -2.0
    if o is not None and abs(o[0] - 1.0) <= _RHO_TOL:
        s = o[1]
    if s >= -1:
        return math.inf
    # Euler-Maclaurin: int_{hi}^inf x + x_hi/2, minus the included x_hi
    return last * m_hi / (-s - 1) - last / 2
