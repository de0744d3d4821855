"""Adaptive Dormand-Prince 5(4) integration along polylines in the complex plane.

Each straight segment ``t0 -> t1`` is parametrised by a real ``s`` in
``[0, 1]`` so the usual real-time step-size machinery applies unchanged to
holomorphic right-hand sides.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
B4 = np.array(
    [5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
)
E = B5 - B4

# PI controller exponents (Gustafsson / Hairer-Wanner, beta = 0.04)
_BETA = 0.04
_ALPHA = 0.2 - 0.75 * _BETA
_SAFETY = 0.9
_FAC_MIN = 0.2
_FAC_MAX = 10.0


class StepSizeUnderflow(RuntimeError):
    """Raised when the controller cannot meet the tolerance with a usable step."""


@dataclass
class SegmentStats:
    accepted: int = 0
    rejected: int = 0


RHS = Callable[[complex, np.ndarray], np.ndarray]
Guard = Callable[[complex, np.ndarray], None]


def _initial_step(g, u0, f0, rtol, atol):
    scale = atol + rtol * np.abs(u0)
    d0 = np.sqrt(np.mean((np.abs(u0) / scale) ** 2))
    d1 = np.sqrt(np.mean((np.abs(f0) / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, 1.0)
    u1 = u0 + h0 * f0
    f1 = g(h0, u1)
    d2 = np.sqrt(np.mean((np.abs(f1 - f0) / scale) ** 2)) / h0
    if max(d1, d2) <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** 0.2
    return min(100 * h0, h1, 1.0)


def integrate_segment(
    f: RHS,
    t0: complex,
    t1: complex,
    u0: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    guard: Optional[Guard] = None,
    max_steps: int = 200_000,
    stats: Optional[SegmentStats] = None,
) -> np.ndarray:
    """Integrate ``du/dt = f(t, u)`` along the straight segment from t0 to t1."""
    u = np.array(u0, dtype=complex)
    delta = complex(t1) - complex(t0)
    if delta == 0:
        return u
    t0 = complex(t0)

    def g(s, v):
        return delta * f(t0 + s * delta, v)

    s = 0.0
    k1 = g(0.0, u)
    h = _initial_step(g, u, k1, rtol, atol)
    err_old = 1e-4
    reject = False
    steps = 0
    while s < 1.0:
        if steps >= max_steps:
            raise StepSizeUnderflow(f"step budget exhausted at t={t0 + s * delta}")
        steps += 1
        if s + h > 1.0:
            h = 1.0 - s
        ks = [k1]
        for i in range(1, 7):
            ui = u + h * sum(a * k for a, k in zip(A[i], ks) if a != 0.0)
            ks.append(g(s + C[i] * h, ui))
        u_new = u + h * sum(b * k for b, k in zip(B5, ks) if b != 0.0)
        err_vec = h * sum(e * k for e, k in zip(E, ks) if e != 0.0)
        scale = atol + rtol * np.maximum(np.abs(u), np.abs(u_new))
        err = float(np.sqrt(np.mean((np.abs(err_vec) / scale) ** 2)))
        if not np.isfinite(err):
            err = 1e10
        if err <= 1.0:
            s += h
            u = u_new
            k1 = ks[6]
            if stats is not None:
                stats.accepted += 1
            if guard is not None:
                guard(t0 + s * delta, u)
            err = max(err, 1e-10)
            fac = _SAFETY * err ** (-_ALPHA) * err_old ** _BETA
            fac = min(_FAC_MAX if not reject else 1.0, max(_FAC_MIN, fac))
            err_old = err
            h *= fac
            reject = False
        else:
            if stats is not None:
                stats.rejected += 1
            fac = max(_FAC_MIN, _SAFETY * err ** (-_ALPHA))
            h *= fac
            reject = True
        if h < 1e-14:
            raise StepSizeUnderflow(f"step size underflow at t={t0 + s * delta}")
    return u


def integrate_polyline(
    f: RHS,
    vertices: Sequence[complex],
    u0: np.ndarray,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    guard: Optional[Guard] = None,
) -> list[np.ndarray]:
    """Return the state at every vertex of the polyline, starting with ``u0``."""
    out = [np.array(u0, dtype=complex)]
    for ta, tb in zip(vertices[:-1], vertices[1:]):
        out.append(integrate_segment(f, ta, tb, out[-1], rtol, atol, guard))
    return out
