"""Seeded generator of random families for audits."""
from __future__ import annotations

import numpy as np

from esagraph import sequences as sq
from esagraph.graph_core import EndFamily, StarLikeSpec, TreeSpec, WeightedGraph


def _coef(rng, positive=True):
    if rng.random() < 0.5:
        k = float(rng.uniform(0.5, 2.0))
        s = float(rng.choice([-2.0, -1.0, -0.5, 0.0, 1.0, 2.0, 3.0]))
        return sq.power(k, s, 1.0)
    k = float(rng.uniform(0.5, 2.0))
    rho = float(rng.choice([0.5, 0.8, 1.0, 1.5, 2.0, 3.0]))
    return sq.geometric(k, rho)


def _potential(rng):
    u = rng.random()
    if u < 0.4:
        return None
    if u < 0.7:
        return sq.geometric(float(rng.uniform(-3, 3)), float(rng.choice([1.0, 2.0, 4.0])))
    return sq.power(float(rng.uniform(-3, 3)), float(rng.choice([0.0, 1.0, 2.0, 3.0])), 1.0)


def random_end(rng) -> EndFamily:
    if rng.random() < 0.7:
        return EndFamily.raw(_coef(rng), _coef(rng), _potential(rng))
    return EndFamily.gauged(_coef(rng), _potential(rng))


def random_tree(rng) -> TreeSpec:
    N = int(rng.integers(1, 7))
    omega = sq.geometric(1.0, float(rng.choice([0.3, 0.5, 0.7, 1.0])))
    c = sq.geometric(1.0, float(rng.choice([1.0, 2.0, 3.0])))
    W = _potential(rng)
    return TreeSpec(N, omega, c, sq.ZERO if W is None else W, max_depth=6)


def random_starlike(rng) -> StarLikeSpec:
    k = int(rng.integers(1, 5))
    edges = [(i, i + 1) for i in range(k - 1)]
    core = WeightedGraph(k, np.array(edges, dtype=np.int64).reshape(-1, 2), rng.uniform(0.5, 2.0, k),
                         rng.uniform(0.5, 2.0, len(edges)))
    m = int(rng.integers(1, 4))
    ends = tuple(EndFamily.raw(_coef(rng), _coef(rng), _potential(rng)) for _ in range(m))
    attach = tuple(int(v) for v in rng.integers(0, k, m))
    return StarLikeSpec(core, ends, attach)


def random_family(seed: int):
    rng = np.random.default_rng(seed)
    u = rng.random()
    if u < 0.6:
        return random_end(rng)
    if u < 0.8:
        return random_tree(rng)
    return random_starlike(rng)
