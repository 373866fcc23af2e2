"""The four worked families used throughout the tests and the CLI."""
from __future__ import annotations

import math

from . import sequences as sq
from .errors import BadParams
from .graph_core import EndFamily, TreeSpec

#: critical potential strength for the doubling end
A0 = 5.0 * math.sqrt(2.0) / 4.0 - 1.5
#: its mirror image on the negative side
A0_MIRROR = -5.0 * math.sqrt(2.0) / 4.0 - 1.5


def example1(horizon: int = 400) -> EndFamily:
    """``c_{n-1,n} = n**3`` and ``omega_n = 1/(n+1)``."""
    return EndFamily.raw(sq.power(1.0, 3.0), sq.power(1.0, -1.0, 1.0), horizon=horizon, name="example1")


def example2(A: float = 0.0, form: str = "gauged", horizon: int = 400) -> EndFamily:
    """Doubling conductances with potential ``A 4**n``.

    Raw weights are ``c_{n-1,n} = 2**(n-1)``, ``omega_n = 2**(-n/2)``.
    ``form="gauged"`` returns the unitarily equivalent Jacobi form on plain
    l2, where the gauge potential is absorbed into ``W``.
    """
    raw = EndFamily.raw(sq.geometric(0.5, 2.0), sq.geometric(1.0, 2.0**-0.5), sq.geometric(float(A), 4.0),
                        horizon=horizon, name=f"example2(A={A!r})")
    if form == "raw":
        return raw
    if form != "gauged":
        raise BadParams(f"form must be 'raw' or 'gauged', got {form!r}")
    return raw.to_gauged()


def example3(gamma: float = 3.0, beta: float = 1.0, horizon: int = 400) -> EndFamily:
    """``c_{n-1,n} = n**gamma`` and ``omega_n = (n+1)**-beta`` (gamma > 2, beta > 1/2)."""
    if not (gamma > 2.0 and beta > 0.5):
        raise BadParams(f"need gamma > 2 and beta > 1/2, got gamma={gamma}, beta={beta}")
    return EndFamily.raw(sq.power(1.0, gamma), sq.power(1.0, -beta, 1.0), horizon=horizon,
                         name=f"example3(gamma={gamma!r}, beta={beta!r})")


def example4(N: int = 2, max_depth: int = 8) -> TreeSpec:
    """Rooted tree with branching ``N``, ``omega = 2**-depth``, conductance ``2**depth`` going down."""
    if int(N) != N or N < 1:
        raise BadParams(f"branching must be a positive integer, got {N!r}")
    return TreeSpec.standard(int(N), max_depth=max_depth)
