"""Weighted Laplacians, Schrödinger operators, quadratic forms and the gauge transform.

Vertex functions are plain 1-D numpy arrays indexed by vertex id.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import DomainMismatch, NotAKernelElement, SolveFailure
from .graph_core import WeightedGraph


def _as_function(g: WeightedGraph, f, name: str = "f") -> np.ndarray:
    arr = np.asarray(f, dtype=float)
    if arr.shape != (g.n_vertices,):
        raise DomainMismatch(f"{name} has shape {arr.shape}, expected ({g.n_vertices},)")
    return arr


def edge_differences(g: WeightedGraph, f: np.ndarray) -> np.ndarray:
    return f[g.edges[:, 0]] - f[g.edges[:, 1]]


def combinatorial_laplacian(g: WeightedGraph, weights: np.ndarray | None = None) -> sparse.csr_matrix:
    """``sum_y w_xy (f(x) - f(y))`` as a sparse matrix (no vertex weights)."""
    C = g.conductance_matrix() if weights is None else _edge_matrix(g, weights)
    deg = np.asarray(C.sum(axis=1)).ravel()
    return (sparse.diags(deg) - C).tocsr()


def _edge_matrix(g: WeightedGraph, weights: np.ndarray) -> sparse.csr_matrix:
    x, y = g.edges[:, 0], g.edges[:, 1]
    w = np.asarray(weights, dtype=float)
    return sparse.csr_matrix(
        (np.concatenate([w, w]), (np.concatenate([x, y]), np.concatenate([y, x]))),
        shape=(g.n_vertices, g.n_vertices),
    )


def laplacian_matrix(g: WeightedGraph) -> sparse.csr_matrix:
    """Matrix of the weighted Laplacian: ``(1/omega_x^2) sum_y c_xy (f(x) - f(y))``.

    Sums run over the edges present in the truncation only.
    """
    return (sparse.diags(1.0 / g.omega**2) @ combinatorial_laplacian(g)).tocsr()


def schrodinger_matrix(g: WeightedGraph, W=None) -> sparse.csr_matrix:
    pot = g.potential_or_zero() if W is None else _as_function(g, W, "W")
    return (laplacian_matrix(g) + sparse.diags(pot)).tocsr()


def apply_laplacian(g: WeightedGraph, f) -> np.ndarray:
    f = _as_function(g, f)
    d = edge_differences(g, f) * g.conductance
    out = np.zeros(g.n_vertices)
    np.add.at(out, g.edges[:, 0], d)
    np.add.at(out, g.edges[:, 1], -d)
    return out / g.omega**2


def apply_schrodinger(g: WeightedGraph, f, W=None) -> np.ndarray:
    f = _as_function(g, f)
    pot = g.potential_or_zero() if W is None else _as_function(g, W, "W")
    return apply_laplacian(g, f) + pot * f


def quadratic_form(g: WeightedGraph, f) -> float:
    """Edge energy plus mass term: the form of ``Laplacian + Id`` on l2_omega."""
    f = _as_function(g, f)
    return float(np.sum(g.conductance * edge_differences(g, f) ** 2) + np.sum(g.omega**2 * f**2))


def inner_product_omega(g: WeightedGraph, f, h) -> float:
    f = _as_function(g, f)
    h = _as_function(g, h, "h")
    return float(np.sum(g.omega**2 * f * h))


def norm_omega(g: WeightedGraph, f) -> float:
    return float(np.sqrt(inner_product_omega(g, f, f)))


@dataclass(frozen=True, eq=False)
class GaugedOperator:
    """``Delta_{1,a} + W`` on plain l2 of the same vertex set."""

    graph: WeightedGraph
    a: np.ndarray
    W: np.ndarray

    def matrix(self) -> sparse.csr_matrix:
        return (combinatorial_laplacian(self.graph, self.a) + sparse.diags(self.W)).tocsr()

    def apply(self, f) -> np.ndarray:
        f = _as_function(self.graph, f)
        d = edge_differences(self.graph, f) * self.a
        out = np.zeros(self.graph.n_vertices)
        np.add.at(out, self.graph.edges[:, 0], d)
        np.add.at(out, self.graph.edges[:, 1], -d)
        return out + self.W * f


def gauge_transform(g: WeightedGraph) -> GaugedOperator:
    """Unitarily equivalent operator on plain l2 via ``f -> omega f``.

    ``a_xy = c_xy / (omega_x omega_y)`` and the potential is
    ``-(1/omega) Delta_{1,a} omega`` plus the graph's own potential.
    """
    x, y = g.edges[:, 0], g.edges[:, 1]
    a = g.conductance / (g.omega[x] * g.omega[y])
    shell = GaugedOperator(g, a, np.zeros(g.n_vertices))
    W = -shell.apply(g.omega) / g.omega + g.potential_or_zero()
    return GaugedOperator(g, a, W)


def conjugation_error(g: WeightedGraph, f) -> float:
    """Max entrywise gap between ``omega * H(f / omega)`` and the gauged operator."""
    f = _as_function(g, f)
    lhs = g.omega * apply_schrodinger(g, f / g.omega)
    rhs = gauge_transform(g).apply(f)
    return float(np.max(np.abs(lhs - rhs))) if g.n_vertices else 0.0


# -- ground state transform -------------------------------------------

def kernel_element(g: WeightedGraph, W, boundary, values) -> np.ndarray:
    """Solve ``(Delta + W) v = 0`` off ``boundary`` with ``v = values`` on it."""
    pot = _as_function(g, W, "W")
    boundary = np.asarray(boundary, dtype=np.int64)
    mask = np.ones(g.n_vertices, dtype=bool)
    mask[boundary] = False
    inner = np.flatnonzero(mask)
    # multiply rows by omega^2 to get a symmetric system
    K = (combinatorial_laplacian(g) + sparse.diags(g.omega**2 * pot)).tocsr()
    v = np.zeros(g.n_vertices)
    v[boundary] = values
    rhs = -K[inner][:, boundary] @ v[boundary]
    A = K[inner][:, inner].toarray()
    try:
        sol = np.linalg.solve(A, rhs)
    except np.linalg.LinAlgError as exc:
        raise SolveFailure("interior system is singular") from exc
    if not np.all(np.isfinite(sol)):
        raise SolveFailure("interior system is singular")
    v[inner] = sol
    return v


def ground_state_identity_residual(g: WeightedGraph, W, v, f, *, kernel_tol: float = 1e-9) -> float:
    """``|<fv, H(fv)>_omega - sum_edges c v(x) v(y) (f(x)-f(y))^2|``.

    ``H = Delta + W`` must annihilate ``v`` on the support of ``f``
    (relative to the size of the terms making up ``Hv``).
    """
    pot = _as_function(g, W, "W")
    v = _as_function(g, v, "v")
    f = _as_function(g, f)
    supp = np.flatnonzero(f != 0)
    Hv = apply_schrodinger(g, v, pot)
    scale = (np.abs(combinatorial_laplacian(g)) @ np.abs(v)) / g.omega**2 + np.abs(pot * v)
    if supp.size and np.any(np.abs(Hv[supp]) > kernel_tol * np.maximum(scale[supp], 1e-300)):
        raise NotAKernelElement("H v does not vanish on the support of f")
    lhs, rhs = ground_state_sides(g, pot, v, f)
    return abs(lhs - rhs)


def ground_state_sides(g: WeightedGraph, W, v, f) -> tuple[float, float]:
    """Both sides of the ground state identity, without the kernel check."""
    pot = _as_function(g, W, "W")
    v = _as_function(g, v, "v")
    f = _as_function(g, f)
    fv = f * v
    lhs = inner_product_omega(g, fv, apply_schrodinger(g, fv, pot))
    x, y = g.edges[:, 0], g.edges[:, 1]
    return lhs, float(np.sum(g.conductance * v[x] * v[y] * (f[x] - f[y]) ** 2))


def dense_matrix(g: WeightedGraph, which: str = "laplacian") -> np.ndarray:
    """Dense operator matrix, for debugging exports."""
    if which == "laplacian":
        return laplacian_matrix(g).toarray()
    if which == "schrodinger":
        return schrodinger_matrix(g).toarray()
    if which == "gauged":
        return gauge_transform(g).matrix().toarray()
    raise ValueError(f"unknown matrix kind {which!r}")

