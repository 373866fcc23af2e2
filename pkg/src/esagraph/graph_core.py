"""Weighted graphs, N-ends, star-like graphs and spherically homogeneous trees."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence as TypingSequence

import numpy as np
from scipy import sparse

from . import sequences as sq
from .errors import (
    HorizonTooSmall,
    NonPositiveWeight,
    NotSphericallyHomogeneous,
    TableExhausted,
)
from .sequences import Seq


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Finite graph with vertex weights ``omega`` and edge conductances.

    Vertices are the integers ``0 .. n_vertices-1``; ``edges[i] = (x, y)``
    with ``x < y`` carries ``conductance[i]``. ``frontier`` lists the
    vertices where a truncation was cut off, ``depth`` the distance of each
    vertex from the root/attachment point when the graph came from a family.
    """

    n_vertices: int
    edges: np.ndarray
    omega: np.ndarray
    conductance: np.ndarray
    potential: np.ndarray | None = None
    frontier: tuple[int, ...] = ()
    depth: np.ndarray | None = None

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if len(edges):
            if np.any(edges[:, 0] == edges[:, 1]):
                raise ValueError("self-loops are not allowed")
            if edges.min() < 0 or edges.max() >= self.n_vertices:
                raise ValueError("edge endpoint out of range")
        lo = np.minimum(edges[:, 0], edges[:, 1])
        hi = np.maximum(edges[:, 0], edges[:, 1])
        edges = np.stack([lo, hi], axis=1)
        if len({(int(x), int(y)) for x, y in edges}) != len(edges):
            raise ValueError("duplicate edges")
        omega = np.asarray(self.omega, dtype=float)
        cond = np.asarray(self.conductance, dtype=float)
        if omega.shape != (self.n_vertices,) or cond.shape != (len(edges),):
            raise ValueError("weight arrays do not match the vertex/edge counts")
        if not np.all(np.isfinite(omega)) or np.any(omega <= 0):
            raise NonPositiveWeight("vertex weights must be finite and > 0")
        if not np.all(np.isfinite(cond)) or np.any(cond <= 0):
            raise NonPositiveWeight("conductances must be finite and > 0")
        object.__setattr__(self, "edges", _frozen(edges, np.int64))
        object.__setattr__(self, "omega", _frozen(omega))
        object.__setattr__(self, "conductance", _frozen(cond))
        if self.potential is not None:
            pot = np.asarray(self.potential, dtype=float)
            if pot.shape != (self.n_vertices,) or not np.all(np.isfinite(pot)):
                raise ValueError("potential must be a finite array over the vertices")
            object.__setattr__(self, "potential", _frozen(pot))
        if self.depth is not None:
            object.__setattr__(self, "depth", _frozen(self.depth, np.int64))
        object.__setattr__(self, "frontier", tuple(int(v) for v in self.frontier))

    # -- structure -----------------------------------------------------
    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.n_vertices)

    def conductance_matrix(self) -> sparse.csr_matrix:
        """Symmetric sparse matrix with ``C[x, y] = c_{x,y}``."""
        x, y = self.edges[:, 0], self.edges[:, 1]
        data = np.concatenate([self.conductance, self.conductance])
        return sparse.csr_matrix(
            (data, (np.concatenate([x, y]), np.concatenate([y, x]))),
            shape=(self.n_vertices, self.n_vertices),
        )

    def neighbors(self, v: int) -> np.ndarray:
        row = self.conductance_matrix().getrow(v)
        return row.indices

    def interior(self) -> np.ndarray:
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[list(self.frontier)] = False
        return np.flatnonzero(mask)

    def potential_or_zero(self) -> np.ndarray:
        return np.zeros(self.n_vertices) if self.potential is None else np.asarray(self.potential)


def degree_bound(g: WeightedGraph) -> int:
    """Maximal vertex degree."""
    return int(g.degrees().max()) if g.n_vertices else 0


# -- families ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class EndFamily:
    """A copy of the graph N given by coefficient sequences.

    ``kind == "raw"``: ``c(n)`` is the conductance of the edge ``(n-1, n)``
    for ``n >= 1``, ``omega(n)`` the vertex weight and ``W(n)`` the
    potential. ``kind == "gauged"``: ``a(n)`` replaces ``c`` and the vertex
    weights are identically 1.

    ``sphere_growth`` is only set on radial reductions of trees: the
    number of vertices on consecutive spheres grows by that factor.
    """

    kind: str
    c: Seq | None = None
    omega: Seq | None = None
    a: Seq | None = None
    W: Seq = sq.ZERO
    horizon: int = 400
    sphere_growth: float = 1.0
    name: str = ""

    def __post_init__(self):
        if self.kind not in ("raw", "gauged"):
            raise ValueError(f"unknown end kind {self.kind!r}")
        if self.kind == "raw" and (self.c is None or self.omega is None):
            raise ValueError("raw ends need c and omega")
        if self.kind == "gauged" and self.a is None:
            raise ValueError("gauged ends need a")
        object.__setattr__(self, "W", sq.as_seq(self.W))

    @classmethod
    def raw(cls, c, omega, W=None, horizon: int = 400, name: str = "") -> "EndFamily":
        return cls("raw", c=sq.as_seq(c), omega=sq.as_seq(omega), W=sq.as_seq(0.0 if W is None else W),
                   horizon=horizon, name=name)

    @classmethod
    def gauged(cls, a, W=None, horizon: int = 400, name: str = "", sphere_growth: float = 1.0) -> "EndFamily":
        return cls("gauged", a=sq.as_seq(a), W=sq.as_seq(0.0 if W is None else W),
                   horizon=horizon, name=name, sphere_growth=sphere_growth)

    # -- views ---------------------------------------------------------
    @property
    def conductance(self) -> Seq:
        return self.c if self.kind == "raw" else self.a

    @property
    def weight(self) -> Seq:
        return self.omega if self.kind == "raw" else sq.ONE

    @property
    def has_potential(self) -> bool:
        return not self.W.is_zero

    def gauge_coefficients(self) -> tuple[Seq, Seq]:
        """``(a, W_hat)`` of the unitarily equivalent operator on plain l2.

        ``a_n = c_n / (omega_{n-1} omega_n)`` and the potential is
        ``W - (1/omega) Delta_{1,a} omega`` (valid for ``n >= 1``; the
        value at ``n = 0`` is patched in with only the forward edge).
        """
        if self.kind == "gauged":
            return self.a, self.W
        om = self.omega
        a = self.c / (om.shift(-1) * om)
        a_next = a.shift(1)
        # -(1/om_n) [a_n (om_n - om_{n-1}) + a_{n+1} (om_n - om_{n+1})]
        gauge = (a * om.shift(-1) + a_next * om.shift(1)) / om - a - a_next
        w0 = -float(self.c(1)) / float(om(1) * om(0)) * (1.0 - float(om(1) / om(0)))
        return a, (gauge + self.W).with_initial([w0 + float(self.W(0))])

    def to_gauged(self) -> "EndFamily":
        if self.kind == "gauged":
            return self
        a, w = self.gauge_coefficients()
        return EndFamily.gauged(a, w, horizon=self.horizon, name=self.name)

    def validate(self, horizon: int | None = None) -> None:
        h = self.horizon if horizon is None else horizon
        n = np.arange(h + 1, dtype=float)
        try:
            cvals = self.conductance(n[1:])
            wvals = self.weight(n)
            pot = self.W(n)
        except TableExhausted as exc:
            raise HorizonTooSmall(str(exc)) from exc
        if not np.all(np.isfinite(cvals)) or np.any(cvals <= 0):
            raise NonPositiveWeight(f"{self.kind} conductance not positive on [1, {h}]")
        if not np.all(np.isfinite(wvals)) or np.any(wvals <= 0):
            raise NonPositiveWeight(f"vertex weight not positive on [0, {h}]")
        if not np.all(np.isfinite(pot)):
            raise NonPositiveWeight(f"potential not finite on [0, {h}]")


@dataclass(frozen=True, eq=False)
class TreeSpec:
    """Spherically homogeneous rooted tree.

    Every vertex has ``branching`` children. ``omega(n)`` is the weight of
    a vertex at depth ``n`` and ``c(n)`` the conductance of an edge from
    depth ``n`` to depth ``n + 1``.
    """

    branching: int
    omega: Seq
    c: Seq
    W: Seq = sq.ZERO
    max_depth: int = 8

    def __post_init__(self):
        if int(self.branching) < 1:
            raise ValueError("branching must be >= 1")
        object.__setattr__(self, "W", sq.as_seq(self.W))

    @classmethod
    def standard(cls, branching: int, max_depth: int = 8, W=None) -> "TreeSpec":
        """Weights ``omega = 2**-depth`` and ``c = 2**depth``."""
        return cls(branching, sq.geometric(1.0, 0.5), sq.geometric(1.0, 2.0),
                   sq.as_seq(0.0 if W is None else W), max_depth)

    @property
    def has_potential(self) -> bool:
        return not self.W.is_zero


@dataclass(frozen=True, eq=False)
class StarLikeSpec:
    """Finite core graph with N-ends attached to core vertices.

    End ``i`` starts with a new vertex joined to core vertex
    ``attach[i]`` by an edge of conductance ``attach_conductance[i]``.
    """

    core: WeightedGraph
    ends: tuple[EndFamily, ...]
    attach: tuple[int, ...]
    attach_conductance: tuple[float, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "ends", tuple(self.ends))
        object.__setattr__(self, "attach", tuple(int(v) for v in self.attach))
        if len(self.attach) != len(self.ends):
            raise ValueError("one attachment vertex per end is required")
        if any(v < 0 or v >= self.core.n_vertices for v in self.attach):
            raise ValueError("attachment vertex outside the core")
        cond = tuple(self.attach_conductance) or (1.0,) * len(self.ends)
        if len(cond) != len(self.ends) or any(c <= 0 for c in cond):
            raise NonPositiveWeight("attachment conductances must be positive, one per end")
        object.__setattr__(self, "attach_conductance", tuple(float(c) for c in cond))

    def end_vertex(self, end: int, n: int, horizon: int) -> int:
        """Vertex id of index ``n`` on end ``end`` in a truncation."""
        return self.core.n_vertices + n * len(self.ends) + end


# -- truncations -----------------------------------------------------------

def build_truncation(family, horizon: int | None = None) -> WeightedGraph:
    """Instantiate a finite truncation of ``family``.

    Ends give the path ``0 .. horizon``, trees all vertices of depth at most
    ``horizon`` (breadth-first numbering) and star-like graphs the core
    followed by the end vertices interleaved by distance from the core.
    """
    if isinstance(family, EndFamily):
        h = family.horizon if horizon is None else horizon
        _check_horizon(h)
        return _end_truncation(family, h)
    if isinstance(family, TreeSpec):
        h = family.max_depth if horizon is None else horizon
        _check_horizon(h)
        return _tree_truncation(family, h)
    if isinstance(family, StarLikeSpec):
        h = max(e.horizon for e in family.ends) if horizon is None else horizon
        _check_horizon(h)
        return _starlike_truncation(family, h)
    raise TypeError(f"cannot truncate {type(family).__name__}")


def _check_horizon(h: int) -> None:
    if h < 2:
        raise HorizonTooSmall(f"horizon must be >= 2, got {h}")


def _end_arrays(end: EndFamily, h: int):
    end.validate(h)
    n = np.arange(h + 1, dtype=float)
    return (np.asarray(end.weight(n), dtype=float),
            np.asarray(end.conductance(n[1:]), dtype=float),
            np.asarray(end.W(n), dtype=float))


def _end_truncation(end: EndFamily, h: int) -> WeightedGraph:
    omega, cond, pot = _end_arrays(end, h)
    edges = np.stack([np.arange(h), np.arange(1, h + 1)], axis=1)
    return WeightedGraph(h + 1, edges, omega, cond,
                         potential=pot if end.has_potential else None,
                         frontier=(h,), depth=np.arange(h + 1))


def tree_level_sizes(branching: int, depth: int) -> list[int]:
    return [branching ** k for k in range(depth + 1)]


def _tree_truncation(tree: TreeSpec, h: int) -> WeightedGraph:
    sizes = tree_level_sizes(tree.branching, h)
    total = sum(sizes)
    depth = np.repeat(np.arange(h + 1), sizes)
    # breadth-first: child j of vertex v is N*v + 1 + j
    parents = np.arange(1, total)
    parents = (parents - 1) // tree.branching
    edges = np.stack([parents, np.arange(1, total)], axis=1)
    lv = np.arange(h + 1, dtype=float)
    try:
        om_lv = np.asarray(tree.omega(lv), dtype=float)
        c_lv = np.asarray(tree.c(lv[:-1]), dtype=float)
        w_lv = np.asarray(tree.W(lv), dtype=float)
    except TableExhausted as exc:
        raise HorizonTooSmall(str(exc)) from exc
    if np.any(om_lv <= 0) or np.any(c_lv <= 0) or not np.all(np.isfinite(om_lv)) or not np.all(np.isfinite(c_lv)):
        raise NonPositiveWeight("tree depth rules must be positive")
    frontier = tuple(range(total - sizes[-1], total))
    return WeightedGraph(total, edges, om_lv[depth], c_lv[depth[parents]],
                         potential=w_lv[depth] if tree.has_potential else None,
                         frontier=frontier, depth=depth)


def _starlike_truncation(spec: StarLikeSpec, h: int) -> WeightedGraph:
    core = spec.core
    k = len(spec.ends)
    n0 = core.n_vertices
    total = n0 + k * (h + 1)
    omega = np.empty(total)
    omega[:n0] = core.omega
    pot = np.zeros(total)
    pot[:n0] = core.potential_or_zero()
    depth = np.zeros(total, dtype=np.int64)
    edges = [core.edges]
    cond = [core.conductance]
    for i, end in enumerate(spec.ends):
        om, cc, w = _end_arrays(end, h)
        ids = n0 + np.arange(h + 1) * k + i
        omega[ids] = om
        pot[ids] = w
        depth[ids] = np.arange(h + 1)
        edges.append(np.array([[spec.attach[i], ids[0]]]))
        cond.append(np.array([spec.attach_conductance[i]]))
        edges.append(np.stack([ids[:-1], ids[1:]], axis=1))
        cond.append(cc)
    has_pot = core.potential is not None or any(e.has_potential for e in spec.ends)
    frontier = tuple(int(n0 + h * k + i) for i in range(k))
    return WeightedGraph(total, np.concatenate(edges), omega, np.concatenate(cond),
                         potential=pot if has_pot else None, frontier=frontier, depth=depth)


# -- radial reduction ----------------------------------------------------------

def radial_reduce(tree) -> EndFamily:
    """Reduce the radial sector of a tree Laplacian to a gauged N-end.

    Radial functions ``u(x) = u_n`` (``n`` the depth) of the gauge-transformed
    operator obey

        -N A_n u_{n+1} + (A_{n-1} + N A_n + V_n) u_n - A_{n-1} u_{n-1} = lambda u_n

    with ``A_n = c_n / (omega_n omega_{n+1})`` and ``V`` the gauge potential.
    Spheres carry ``N**n`` vertices, so ``v_n = N**(n/2) u_n`` is the
    isometric coordinate on l2(N); the returned family is the symmetric
    Jacobi operator in ``v`` (``a_n = sqrt(N) A_{n-1}``), with
    ``sphere_growth = N`` recording the change of coordinates.

    ``tree`` is a :class:`TreeSpec` or a :class:`WeightedGraph` with depth
    labels, in which case homogeneity on spheres is checked.
    """
    if isinstance(tree, WeightedGraph):
        tree = _tree_from_graph(tree)
    N = float(tree.branching)
    rt = math.sqrt(N)
    u = radial_u_coefficients(tree)
    a_sym = u["backward"] * (-rt)
    w_sym = u["diag"] + u["backward"] * rt + u["forward"] / rt
    # the root has no parent edge
    om = tree.omega
    A0 = float(tree.c(0)) / float(om(0) * om(1))
    root_gauge = -N * A0 * (1.0 - float(om(1) / om(0)))
    root_diag = N * A0 + root_gauge + float(tree.W(0))
    w_sym = w_sym.with_initial([root_diag - rt * A0])
    return EndFamily.gauged(a_sym, w_sym, horizon=tree.max_depth,
                            name=f"radial(N={tree.branching})", sphere_growth=N)


def _tree_from_graph(g: WeightedGraph) -> TreeSpec:
    if g.depth is None:
        raise NotSphericallyHomogeneous("graph carries no depth labels")
    depth = np.asarray(g.depth)
    h = int(depth.max())
    x, y = g.edges[:, 0], g.edges[:, 1]
    if np.any(np.abs(depth[x] - depth[y]) != 1):
        raise NotSphericallyHomogeneous("edges must join consecutive depths")
    child = np.where(depth[x] > depth[y], x, y)
    parent = np.where(depth[x] > depth[y], y, x)
    counts = np.bincount(parent, minlength=g.n_vertices)
    inner = depth < h
    branching = set(counts[inner].tolist())
    if len(branching) != 1 or np.bincount(child, minlength=g.n_vertices)[depth > 0].max() != 1:
        raise NotSphericallyHomogeneous("branching is not uniform")
    omega = np.empty(h + 1)
    pot = np.empty(h + 1)
    cond = np.empty(h)
    w_all = g.potential_or_zero()
    for n in range(h + 1):
        sel = depth == n
        if np.ptp(g.omega[sel]) > 1e-12 * g.omega[sel].max() or np.ptp(w_all[sel]) > 1e-12 * max(1.0, np.abs(w_all[sel]).max()):
            raise NotSphericallyHomogeneous(f"weights vary on the sphere of radius {n}")
        omega[n] = g.omega[sel][0]
        pot[n] = w_all[sel][0]
    for n in range(h):
        sel = depth[parent] == n
        vals = g.conductance[sel]
        if np.ptp(vals) > 1e-12 * vals.max():
            raise NotSphericallyHomogeneous(f"conductances vary between depths {n} and {n + 1}")
        cond[n] = vals[0]
    return TreeSpec(branching.pop(), sq.Table(omega), sq.Table(cond),
                    sq.Table(pot) if np.any(pot != 0) else sq.ZERO, h)


def radial_u_coefficients(tree: TreeSpec) -> dict[str, Seq]:
    """Coefficients of the radial recurrence in depth coordinates ``u_n``.

    ``forward[n] u_{n+1} + diag[n] u_n + backward[n] u_{n-1} = lambda u_n``
    with ``forward = -N A_n``, ``backward = -A_{n-1}`` and
    ``diag = A_{n-1} + N A_n + V_n`` (``V`` the gauge potential plus ``W``).
    Not symmetric: spheres carry ``N**n`` vertices.
    """
    if isinstance(tree, WeightedGraph):
        tree = _tree_from_graph(tree)
    N = float(tree.branching)
    om, c = tree.omega, tree.c
    A = c / (om * om.shift(1))
    A_prev = A.shift(-1)
    gauge = (A_prev * om.shift(-1) + A * om.shift(1) * N) / om - A_prev - A * N
    return {
        "forward": A * (-N),
        "diag": A_prev + A * N + gauge + tree.W,
        "backward": -A_prev,
    }
