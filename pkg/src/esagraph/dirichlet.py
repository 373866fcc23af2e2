"""Dirichlet problem at infinity on finite truncations.

The solution of ``(Delta + 1) F = 0`` in the interior with prescribed
frontier values is the minimizer of ``Q`` in that affine space. As the
horizon grows these minimizers converge to the l2_omega solution with
the prescribed value at infinity; a stable nonzero limit is a numerical
deficiency element of the Laplacian.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as spla

from . import sequences as sq
from .errors import PreconditionsNotMet, SolveFailure
from .graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph, build_truncation
from .metric import Completeness, MetricScheme, end_completeness
from .operators import apply_laplacian, combinatorial_laplacian, norm_omega, quadratic_form

DIRECT_LIMIT = 2000
CG_RTOL = 1e-10


@dataclass(frozen=True, eq=False)
class DirichletProblem:
    graph: WeightedGraph
    frontier: tuple[int, ...]
    boundary_values: tuple[float, ...]

    def __post_init__(self):
        fr = tuple(int(v) for v in self.frontier)
        vals = tuple(float(v) for v in np.broadcast_to(self.boundary_values, (len(fr),)))
        if not fr:
            raise ValueError("frontier must be nonempty")
        if len(set(fr)) != len(fr) or min(fr) < 0 or max(fr) >= self.graph.n_vertices:
            raise ValueError("frontier must be distinct vertices of the graph")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError("boundary values must be finite")
        object.__setattr__(self, "frontier", fr)
        object.__setattr__(self, "boundary_values", vals)

    @classmethod
    def on_frontier(cls, g: WeightedGraph, value=1.0) -> "DirichletProblem":
        """Use the truncation frontier recorded on ``g``."""
        return cls(g, g.frontier, np.broadcast_to(value, (len(g.frontier),)))

    def interior(self) -> np.ndarray:
        mask = np.ones(self.graph.n_vertices, dtype=bool)
        mask[list(self.frontier)] = False
        return np.flatnonzero(mask)


@dataclass(frozen=True, eq=False)
class DirichletSolution:
    F: np.ndarray
    interior_residual: float     # max |(Delta + 1) F| over the interior
    relative_residual: float     # same, divided by the row scale of the system
    energy: float                # Q(F)
    l2_omega_norm: float
    method: str


def system_matrix(g: WeightedGraph) -> sparse.csr_matrix:
    """``omega^2 (Delta + 1)``: symmetric, and positive definite on any proper interior."""
    return (combinatorial_laplacian(g) + sparse.diags(g.omega**2)).tocsr()


def solve_dirichlet(p: DirichletProblem, *, method: str = "auto") -> DirichletSolution:
    g = p.graph
    K = system_matrix(g)
    inner = p.interior()
    fr = np.asarray(p.frontier)
    F = np.zeros(g.n_vertices)
    F[fr] = p.boundary_values
    if inner.size:
        A = K[inner][:, inner].tocsr()
        b = -(K[inner][:, fr] @ F[fr])
        use_direct = method == "direct" or (method == "auto" and inner.size < DIRECT_LIMIT)
        if use_direct:
            x = spla.spsolve(A.tocsc(), b)
            used = "direct"
        else:
            x = _jacobi_cg(A, b)
            used = "cg"
        if not np.all(np.isfinite(x)):
            raise SolveFailure("linear solve produced non-finite values")
        F[inner] = x
    else:
        used = "none"
    lhs = apply_laplacian(g, F) + F
    row = np.abs(K) @ np.abs(F)   # scale of the omega^2-weighted row sums
    if inner.size:
        abs_res = float(np.max(np.abs(lhs[inner])))
        scaled = np.abs(lhs[inner]) * g.omega[inner] ** 2
        rel_res = float(np.max(scaled / np.maximum(row[inner], np.finfo(float).tiny)))
    else:
        abs_res = rel_res = 0.0
    return DirichletSolution(F, abs_res, rel_res, quadratic_form(g, F), norm_omega(g, F), used)


def _jacobi_cg(A: sparse.csr_matrix, b: np.ndarray) -> np.ndarray:
    d = A.diagonal()
    M = sparse.diags(1.0 / d)
    x, info = spla.cg(A, b, rtol=CG_RTOL, atol=0.0, M=M, maxiter=20 * A.shape[0])
    if info != 0:
        raise SolveFailure(f"conjugate gradients did not converge (info={info})")
    return x


def maximum_principle_check(p: DirichletProblem, sol: DirichletSolution) -> bool:
    """Interior values lie between the extreme boundary values.

    The zeroth-order term of ``Delta + 1`` pulls solutions toward 0, so the
    admissible range always contains 0 as well.
    """
    lo = min(0.0, min(p.boundary_values))
    hi = max(0.0, max(p.boundary_values))
    tol = 1e-10 * max(1.0, abs(lo), abs(hi))
    F = sol.F[p.interior()]
    return bool(np.all(F >= lo - tol) and np.all(F <= hi + tol))


# -- witnesses ------------------------------------------------------------

@dataclass(frozen=True)
class WitnessRow:
    horizon: int
    F0: float
    Q: float
    norm: float
    residual: float
    relative_residual: float
    max_principle: bool


@dataclass(frozen=True)
class WitnessReport:
    rows: tuple[WitnessRow, ...]
    stable: bool
    relative_changes: dict = field(default_factory=dict)
    regime: str = "unique"
    boundary_value: float = 1.0

    @property
    def nonzero(self) -> bool:
        return bool(self.rows) and self.rows[-1].norm > 0.0

    def as_dict(self) -> dict:
        return {
            "rows": [r.__dict__ for r in self.rows],
            "stable": self.stable,
            "relative_changes": self.relative_changes,
            "regime": self.regime,
            "boundary_value": self.boundary_value,
        }


STABILITY_RTOL = 1e-4


def witness_preconditions(family) -> list[int]:
    """Check the hypotheses of the non-ESA criterion; return the qualifying end indices.

    Needs a non-complete end (``c**-1/2`` lengths) of finite volume
    (``sum omega^2 < inf``) and no potential.
    """
    scheme = MetricScheme.INV_SQRT_C
    if isinstance(family, EndFamily):
        ends = [family]
        if family.kind != "raw":
            raise PreconditionsNotMet("raw weights", "the witness acts on a weighted Laplacian; got gauged coefficients")
    elif isinstance(family, StarLikeSpec):
        ends = list(family.ends)
        if family.core.potential is not None and np.any(family.core.potential != 0):
            raise PreconditionsNotMet("zero potential", "core carries a potential")
    elif isinstance(family, TreeSpec):
        if family.has_potential:
            raise PreconditionsNotMet("zero potential", "tree carries a potential")
        if end_completeness(family, scheme).status is not Completeness.NON_COMPLETE:
            raise PreconditionsNotMet("non-complete", "rays have infinite c^-1/2 length")
        vol = sq.series_test((family.omega ** 2) * sq.geometric(1.0, float(family.branching)))
        if vol.converges is not True:
            raise PreconditionsNotMet("finite volume", "sum of omega^2 over spheres does not converge")
        return [0]
    else:
        raise TypeError(f"unsupported family {type(family).__name__}")
    good = []
    failure = None
    for i, end in enumerate(ends):
        if end.has_potential:
            failure = failure or ("zero potential", f"end {i} carries a potential")
            continue
        if end_completeness(end, scheme).status is not Completeness.NON_COMPLETE:
            failure = failure or ("non-complete", f"end {i} has infinite c^-1/2 length")
            continue
        if sq.series_test(end.weight ** 2).converges is not True:
            failure = failure or ("finite volume", f"sum of omega^2 along end {i} does not converge")
            continue
        good.append(i)
    if not good:
        raise PreconditionsNotMet(*failure)
    return good


def non_esa_witness(family, horizons, boundary_value: float = 1.0) -> WitnessReport:
    """Solve the Dirichlet problem with frontier value 1 at each horizon and track the limit."""
    good = witness_preconditions(family)
    horizons = sorted(int(h) for h in horizons)
    rows = []
    for h in horizons:
        g = build_truncation(family, h)
        vals = np.zeros(len(g.frontier))
        if isinstance(family, StarLikeSpec):
            vals[good] = boundary_value
        else:
            vals[:] = boundary_value
        prob = DirichletProblem(g, g.frontier, vals)
        sol = solve_dirichlet(prob)
        rows.append(WitnessRow(h, float(sol.F[0]), sol.energy, sol.l2_omega_norm,
                               sol.interior_residual, sol.relative_residual,
                               maximum_principle_check(prob, sol)))
    changes = {}
    stable = False
    if len(rows) >= 2:
        a, b = rows[-2], rows[-1]
        for key in ("F0", "Q", "norm"):
            x, y = getattr(a, key), getattr(b, key)
            changes[key] = abs(y - x) / max(abs(y), np.finfo(float).tiny)
        stable = changes["F0"] <= STABILITY_RTOL and b.norm > 0
    regime = "unique"
    if isinstance(family, StarLikeSpec) and len(good) > 1:
        regime = "non-unique"
    return WitnessReport(tuple(rows), stable, changes, regime, float(boundary_value))


def nested_energy_gap(family, h_small: int, h_large: int, boundary_value: float = 1.0) -> float:
    """``Q(F_large) - Q(extension of F_small)``; never positive.

    The small-horizon solution extended by its frontier value to the larger
    truncation is admissible for the larger problem, so the minimizer
    there cannot have more energy.
    """
    g_s = build_truncation(family, h_small)
    g_l = build_truncation(family, h_large)
    small = solve_dirichlet(DirichletProblem.on_frontier(g_s, boundary_value))
    large = solve_dirichlet(DirichletProblem.on_frontier(g_l, boundary_value))
    ext = np.full(g_l.n_vertices, float(boundary_value))
    ext[: g_s.n_vertices] = small.F
    return large.energy - quadratic_form(g_l, ext)
