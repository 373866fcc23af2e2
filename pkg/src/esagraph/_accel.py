"""Hot loops over three-term recurrences.

Two implementations of every kernel are kept: a numba ``@njit`` version
and a plain numpy version. Set ``ESAGRAPH_DISABLE_NUMBA=1`` to force the
numpy path (also used automatically when numba is not importable).
"""
from __future__ import annotations

import math
import os

import numpy as np

try:  # pragma: no cover - import guard
    import numba
except ImportError:  # pragma: no cover
    numba = None

USE_NUMBA = numba is not None and os.environ.get("ESAGRAPH_DISABLE_NUMBA", "0") in ("", "0")


# -- numpy reference path ----------------------------------------------

def qr_log_growth_numpy(t11: np.ndarray, t12: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative ``log|R_jj|`` of the QR-stabilized product of companion matrices.

    Step ``j`` multiplies by ``[[t11[j], t12[j]], [1, 0]]``. Interpreted
    twin of the compiled kernel: the loop runs over Python complex scalars,
    which beats a 2x2 ``np.linalg.qr`` per step by more than an order of
    magnitude.
    """
    a_list = np.asarray(t11, dtype=np.complex128).tolist()
    b_list = np.asarray(t12, dtype=np.complex128).tolist()
    s1 = np.empty(len(a_list))
    s2 = np.empty(len(a_list))
    q11, q21 = 1.0 + 0j, 0j
    acc1 = acc2 = 0.0
    for j, (a, b) in enumerate(zip(a_list, b_list)):
        m11 = a * q11 + b * q21
        r11 = math.hypot(abs(m11), abs(q11))
        q11, q21 = m11 / r11, q11 / r11
        acc1 += math.log(r11)
        acc2 += math.log(abs(b)) - math.log(r11)
        s1[j] = acc1
        s2[j] = acc2
    return s1, s2


def propagate_numpy(t11: np.ndarray, t12: np.ndarray, u0: complex, u1: complex) -> np.ndarray:
    """Solution ``u_0, u_1, ..., u_{len+1}`` of ``u_{n+1} = t11 u_n + t12 u_{n-1}``."""
    u = np.empty(len(t11) + 2, dtype=np.complex128)
    u[0], u[1] = u0, u1
    for j in range(len(t11)):
        u[j + 2] = t11[j] * u[j + 1] + t12[j] * u[j]
    return u


# -- numba path ----------------------------------------------------------

def _qr_log_growth_scalar(t11, t12):
    steps = t11.shape[0]
    s1 = np.empty(steps)
    s2 = np.empty(steps)
    # only the first frame vector is tracked; in 2D the second is its
    # orthogonal complement and |R_22| = |det T| / |R_11|
    q11, q21 = 1.0 + 0j, 0j
    acc1 = 0.0
    acc2 = 0.0
    for j in range(steps):
        a = t11[j]
        b = t12[j]
        m11 = a * q11 + b * q21
        m21 = q11
        r11 = math.hypot(abs(m11), abs(m21))   # no overflow for huge coefficients
        q11 = m11 / r11
        q21 = m21 / r11
        acc1 += math.log(r11)
        acc2 += math.log(abs(b)) - math.log(r11)
        s1[j] = acc1
        s2[j] = acc2
    return s1, s2


def _propagate_scalar(t11, t12, u0, u1):
    n = t11.shape[0]
    u = np.empty(n + 2, dtype=np.complex128)
    u[0] = u0
    u[1] = u1
    for j in range(n):
        u[j + 2] = t11[j] * u[j + 1] + t12[j] * u[j]
    return u


if USE_NUMBA:
    _qr_log_growth_nb = numba.njit(cache=True)(_qr_log_growth_scalar)
    _propagate_nb = numba.njit(cache=True)(_propagate_scalar)
else:  # pragma: no cover - exercised with the env flag
    _qr_log_growth_nb = _qr_log_growth_scalar
    _propagate_nb = _propagate_scalar


def qr_log_growth(t11, t12):
    t11 = np.ascontiguousarray(t11, dtype=np.complex128)
    t12 = np.ascontiguousarray(t12, dtype=np.complex128)
    if USE_NUMBA:
        return _qr_log_growth_nb(t11, t12)
    return qr_log_growth_numpy(t11, t12)


def propagate(t11, t12, u0, u1):
    t11 = np.ascontiguousarray(t11, dtype=np.complex128)
    t12 = np.ascontiguousarray(t12, dtype=np.complex128)
    if USE_NUMBA:
        return _propagate_nb(t11, t12, complex(u0), complex(u1))
    return propagate_numpy(t11, t12, u0, u1)


def backend() -> str:
    return "numba" if USE_NUMBA else "numpy"
