"""Path metrics built from edge lengths, completeness of ends, distance to the boundary."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from . import sequences as sq
from .errors import EndIsComplete, UnknownVertex, ZeroForm
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph, build_truncation
from .operators import quadratic_form
from .sequences import Seq


class MetricScheme(str, enum.Enum):
    """Edge-length rule: ``c**-1/2`` or ``min(omega_x, omega_y) / sqrt(c)``."""

    INV_SQRT_C = "inv-sqrt-c"
    MIN_OMEGA = "min-omega"

    @classmethod
    def parse(cls, value) -> "MetricScheme":
        if isinstance(value, cls):
            return value
        aliases = {"invsqrtc": cls.INV_SQRT_C, "minomegaoversqrtc": cls.MIN_OMEGA}
        key = str(value).strip().lower()
        try:
            return cls(key)
        except ValueError:
            compact = key.replace("-", "").replace("_", "")
            if compact in aliases:
                return aliases[compact]
            raise ValueError(f"unknown metric scheme {value!r}") from None


def edge_lengths(g: WeightedGraph, scheme) -> np.ndarray:
    scheme = MetricScheme.parse(scheme)
    p = 1.0 / np.sqrt(g.conductance)
    if scheme is MetricScheme.MIN_OMEGA:
        p = p * np.minimum(g.omega[g.edges[:, 0]], g.omega[g.edges[:, 1]])
    return p


def _length_graph(g: WeightedGraph, scheme) -> sparse.csr_matrix:
    p = edge_lengths(g, scheme)
    x, y = g.edges[:, 0], g.edges[:, 1]
    return sparse.csr_matrix((p, (x, y)), shape=(g.n_vertices, g.n_vertices))


def distances_from(g: WeightedGraph, scheme, sources) -> np.ndarray:
    """Shortest-path distances from each source (rows) to every vertex."""
    src = np.atleast_1d(np.asarray(sources, dtype=np.int64))
    if np.any(src < 0) or np.any(src >= g.n_vertices):
        raise UnknownVertex(f"vertex out of range: {src.tolist()}")
    return csgraph.dijkstra(_length_graph(g, scheme), directed=False, indices=src)


def path_distance(g: WeightedGraph, scheme, x: int, y: int) -> float:
    """``d_p(x, y)``; ``inf`` across components."""
    for v in (x, y):
        if not (0 <= int(v) < g.n_vertices):
            raise UnknownVertex(v)
    return float(distances_from(g, scheme, [x])[0, int(y)])


def all_pairs_distances(g: WeightedGraph, scheme) -> np.ndarray:
    return csgraph.dijkstra(_length_graph(g, scheme), directed=False)


# -- ends ---------------------------------------------------------------

def length_sequence(family, scheme) -> Seq:
    """Edge lengths along an end (or a ray of a tree), indexed by the far vertex ``n >= 1``."""
    scheme = MetricScheme.parse(scheme)
    if isinstance(family, EndFamily):
        c, om = family.conductance, family.weight
    elif isinstance(family, TreeSpec):
        c, om = family.c.shift(-1), family.omega
    else:
        raise TypeError(f"no length sequence for {type(family).__name__}")
    p = c ** -0.5
    if scheme is MetricScheme.MIN_OMEGA:
        p = sq.minimum(om.shift(-1), om) * p
    return p


class Completeness(str, enum.Enum):
    COMPLETE = "Complete"
    NON_COMPLETE = "NonComplete"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class CompletenessVerdict:
    status: Completeness
    tail_sum: float          # total length of the end; inf when complete
    method: str              # "Analytic" | "NumericSampling"

    @property
    def complete(self) -> bool | None:
        if self.status is Completeness.INCONCLUSIVE:
            return None
        return self.status is Completeness.COMPLETE


def end_completeness(end, scheme, *, sample: int = 1000) -> CompletenessVerdict:
    """Is the end complete for ``d_p``? Equivalent to divergence of the length series."""
    p = length_sequence(end, scheme)
    res = sq.series_test(p, start=1, sample=sample)
    method = "Analytic" if res.method == "analytic" else "NumericSampling"
    if res.converges is None:
        return CompletenessVerdict(Completeness.INCONCLUSIVE, math.nan, method)
    if not res.converges:
        return CompletenessVerdict(Completeness.COMPLETE, math.inf, method)
    total = float(sq.tail_sums(p, 1)[0])
    return CompletenessVerdict(Completeness.NON_COMPLETE, total, method)


def boundary_distance(end, scheme, n):
    """``D(n) = sum_{m >= n} p_{m, m+1}``, the distance from vertex ``n`` to infinity."""
    verdict = end_completeness(end, scheme)
    if verdict.status is not Completeness.NON_COMPLETE:
        raise EndIsComplete(f"end is {verdict.status.value} under {MetricScheme.parse(scheme).value}")
    n_arr = np.asarray(n, dtype=np.int64)
    out = sq.tail_sums(length_sequence(end, scheme), np.atleast_1d(n_arr) + 1)
    return out if n_arr.ndim else float(out[0])


def boundary_distance_seq(end, scheme) -> Seq | None:
    """``D`` as a closed-form sequence when the lengths are a single geometric monomial."""
    p = length_sequence(end, scheme)
    mono = p.tail().monomials
    if mono is None or len(mono) != 1:
        return None
    m = mono[0]
    if m.factors or m.log_rho >= 0:
        return None
    # sum_{k >= n+1} k0 rho^k = k0 rho^(n+1) / (1 - rho)
    return sq.Poly((sq.Monomial(m.k * m.rho / (1.0 - m.rho), m.log_rho),))


def starlike_boundary_distance(spec: StarLikeSpec, scheme, horizon: int | None = None) -> np.ndarray:
    """``D`` at every vertex of a star-like truncation.

    Each non-complete end contributes its tail beyond the truncation
    frontier; ``D`` is the shortest distance to any of these tails.
    Complete ends lead nowhere (their frontier is not a boundary point).
    """
    g = build_truncation(spec, horizon)
    h = int(g.depth[list(g.frontier)][0])
    tails = []
    for i, end in enumerate(spec.ends):
        v = end_completeness(end, scheme)
        if v.status is Completeness.NON_COMPLETE:
            tails.append((g.frontier[i], boundary_distance(end, scheme, h)))
    if not tails:
        raise EndIsComplete("no end of the graph is non-complete")
    dist = distances_from(g, scheme, [t[0] for t in tails])
    return np.min(dist + np.array([t[1] for t in tails])[:, None], axis=0)


# -- Lipschitz bound ------------------------------------------------------

def lipschitz_check(g: WeightedGraph, f) -> float:
    """Worst ratio ``|f(a) - f(b)| / (sqrt(Q(f)) d_p(a, b))`` under ``c**-1/2`` lengths.

    The form bound says this never exceeds 1.
    """
    f = np.asarray(f, dtype=float)
    Q = quadratic_form(g, f)
    spread = float(np.ptp(f)) if f.size else 0.0
    if spread == 0.0:
        return 0.0
    if Q <= 0.0:
        raise ZeroForm("Q(f) = 0 for a non-constant f")
    d = all_pairs_distances(g, MetricScheme.INV_SQRT_C)
    diff = np.abs(f[:, None] - f[None, :])
    mask = np.isfinite(d) & (d > 0)
    if not np.any(mask):
        return 0.0
    return float(np.max(diff[mask] / d[mask]) / math.sqrt(Q))
