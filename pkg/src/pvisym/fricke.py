"""Trace coordinates of SL(2, C) monodromy and the Fricke cubic relations.

Two coordinate frames are used.  ``FrickePoint`` holds
``(p0, p1, pt, p_inf; p01, p1t, pt0)``; ``AltFrickePoint`` replaces the
pair traces by ``(p_inf1, p1t, pt_inf)``.  When the ordered product of the
four matrices is the identity, ``p0t == p_inf1``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, astuple

import numpy as np

from .errors import NotUnimodular
from .pvi_core import PviParams

SIGMA1_TRACE_BRANCHES = ("S2-1", "S2-2", "S2-3", "S2-4")
SIGMA2SIGMA1_TRACE_BRANCHES = ("S3-1", "S3-2", "S3-3")


@dataclass(frozen=True)
class FrickePoint:
    p0: complex
    p1: complex
    pt: complex
    p_inf: complex
    p01: complex
    p1t: complex
    pt0: complex

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=complex)


@dataclass(frozen=True)
class AltFrickePoint:
    p0: complex
    p1: complex
    pt: complex
    p_inf: complex
    p_inf1: complex
    p1t: complex
    pt_inf: complex

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=complex)


def fricke_residual(p: FrickePoint) -> complex:
    return (
        p.p01 * p.p1t * p.pt0
        + p.p01**2 + p.p1t**2 + p.pt0**2
        - (p.p0 * p.p1 + p.pt * p.p_inf) * p.p01
        - (p.p1 * p.pt + p.p0 * p.p_inf) * p.p1t
        - (p.pt * p.p0 + p.p1 * p.p_inf) * p.pt0
        + p.p0**2 + p.p1**2 + p.pt**2 + p.p_inf**2
        + p.p0 * p.pt * p.p1 * p.p_inf
        - 4
    )


def fricke_residual_alt(p: AltFrickePoint) -> complex:
    """Relation in the (p_inf1, p1t, pt_inf) frame; quartic term p0 p1 pt p_inf."""
    return (
        p.p_inf1 * p.p1t * p.pt_inf
        + p.p_inf1**2 + p.p1t**2 + p.pt_inf**2
        - (p.p_inf * p.p1 + p.pt * p.p0) * p.p_inf1
        - (p.p1 * p.pt + p.p_inf * p.p0) * p.p1t
        - (p.pt * p.p_inf + p.p1 * p.p0) * p.pt_inf
        + p.p_inf**2 + p.p1**2 + p.pt**2 + p.p0**2
        + p.p0 * p.p1 * p.pt * p.p_inf
        - 4
    )


def traces(rep, det_tol: float = 1e-9) -> tuple[FrickePoint, AltFrickePoint]:
    """Both trace frames of a representation with matrices keyed 0, t, 1, inf."""
    m = rep.matrices if hasattr(rep, "matrices") else rep
    for k in ("0", "t", "1", "inf"):
        d = np.linalg.det(m[k])
        if abs(d - 1) > det_tol:
            raise NotUnimodular(f"det M_{k} = {d}")
    tr = lambda a: complex(np.trace(a))  # noqa: E731
    fp = FrickePoint(
        tr(m["0"]), tr(m["1"]), tr(m["t"]), tr(m["inf"]),
        tr(m["0"] @ m["1"]), tr(m["1"] @ m["t"]), tr(m["t"] @ m["0"]),
    )
    alt = AltFrickePoint(
        fp.p0, fp.p1, fp.pt, fp.p_inf,
        tr(m["inf"] @ m["1"]), fp.p1t, tr(m["t"] @ m["inf"]),
    )
    return fp, alt


# ---------------------------------------------------------------------------
# closed-form trace points


def _cos(x):
    return cmath.cos(x)


PI = math.pi


def sigma1_pair_traces(a0, a1, a3, branch: str) -> tuple[complex, complex]:
    """(p1t = pt0, p01) of a sigma1 branch."""
    h = PI / 2
    if branch == "S2-1":
        x = 2 * (_cos(PI * (a3 + 1)) + _cos(h * (a0 - a1 - 1)) + _cos(h * (a0 + a1 - 1)))
        y = -2 * (1 + _cos(PI * (a0 + 1)) + _cos(PI * a1) + 4 * _cos(h * a1) * _cos(PI * a3) * _cos(h * (a0 + 1)))
    elif branch == "S2-2":
        x = 2 * (_cos(PI * (a3 + 1)) + _cos(h * (a0 - a1 + 1)) + _cos(h * (a0 + a1 + 1)))
        y = -2 * (1 + _cos(PI * (a0 - 1)) + _cos(PI * a1) + 4 * _cos(h * a1) * _cos(PI * a3) * _cos(h * (a0 - 1)))
    elif branch == "S2-3":
        x = 2 * (_cos(PI * a3) + _cos(h * (a0 - a1 - 1)) + _cos(h * (a0 + a1 + 1)))
        y = -2 * (1 + _cos(PI * a0) + _cos(PI * (a1 + 1)) + 4 * _cos(h * (a1 + 1)) * _cos(PI * a3) * _cos(h * a0))
    elif branch == "S2-4":
        x = 2 * (_cos(PI * a3) + _cos(h * (a0 - a1 + 1)) + _cos(h * (a0 + a1 - 1)))
        y = -2 * (1 + _cos(PI * a0) + _cos(PI * (a1 - 1)) + 4 * _cos(h * (a1 - 1)) * _cos(PI * a3) * _cos(h * a0))
    else:
        raise ValueError(f"unknown sigma1 branch {branch!r}")
    return x, y


def sigma1_abc(a0, a1, a3) -> tuple[complex, complex, complex]:
    return 2 * _cos(PI * a3), 2 * _cos(PI * (a0 + 1)), 2 * _cos(PI * a1)


def sigma1_trace_point(params: PviParams, branch: str = "S2-1") -> FrickePoint:
    a0, a1, _, a3, _ = params.as_tuple()
    A, B, C = sigma1_abc(a0, a1, a3)
    x, y = sigma1_pair_traces(a0, a1, a3, branch)
    return FrickePoint(A, A, B, C, y, x, x)


def sigma2sigma1_pair_trace(a0, a1, branch: str) -> complex:
    shift = {"S3-1": -2, "S3-2": 0, "S3-3": 2}
    if branch not in shift:
        raise ValueError(f"unknown sigma2sigma1 branch {branch!r}")
    s = a0 + shift[branch]
    return -1 - 2 * _cos(2 * PI / 3 * s) + 4 * _cos(PI / 3 * s) * _cos(PI * a1)


def sigma2sigma1_ab(a0, a1) -> tuple[complex, complex]:
    return 2 * _cos(PI * a1), 2 * _cos(PI * (a0 - 1))


def sigma2sigma1_trace_point(params: PviParams, branch: str = "S3-2") -> AltFrickePoint:
    a0, a1 = params.alpha0, params.alpha1
    A, B = sigma2sigma1_ab(a0, a1)
    x = sigma2sigma1_pair_trace(a0, a1, branch)
    return AltFrickePoint(A, A, B, A, x, x, x)


# ---------------------------------------------------------------------------
# double-root and factorisation checks


@dataclass(frozen=True)
class DiscriminantReport:
    roots: tuple[complex, ...]
    discriminant_at_roots: tuple[complex, ...]
    double_roots: tuple[complex, ...]
    p01_mismatch: float
    leading_factor: complex
    coefficient_mismatch: float

    @property
    def max_discriminant(self) -> float:
        return max(abs(v) for v in self.discriminant_at_roots)


def y_quadratic(X, A, B, C) -> tuple[complex, complex, complex]:
    """Coefficients (c2, c1, c0) of the relation as a quadratic in Y = p01."""
    c2 = 1
    c1 = X * X - (A * A + B * C)
    c0 = 2 * X * X - 2 * (A * B + A * C) * X + 2 * A * A + B * B + C * C + A * A * B * C - 4
    return c2, c1, c0


def discriminant_poly(A, B, C) -> np.ndarray:
    """Discriminant c1**2 - 4 c0 as a quartic in X (highest degree first)."""
    k = A * A + B * C
    # (X^2 - k)^2 - 4 (2X^2 - 2(AB + AC)X + 2A^2 + B^2 + C^2 + A^2BC - 4)
    return np.array([
        1,
        0,
        -2 * k - 8,
        8 * (A * B + A * C),
        k * k - 4 * (2 * A * A + B * B + C * C + A * A * B * C - 4),
    ], dtype=complex)


def _coef_mismatch(p: np.ndarray, q: np.ndarray) -> float:
    scale = max(1.0, float(np.max(np.abs(p))), float(np.max(np.abs(q))))
    return float(np.max(np.abs(p - q))) / scale


def discriminant_check(A: complex, B: complex, C: complex, params: tuple[complex, complex, complex] | None = None) -> DiscriminantReport:
    """Discriminant of the Y-quadratic against the four sigma1 pair traces.

    ``params`` = (alpha0, alpha1, alpha3) supplies the closed forms; when
    omitted they are recovered from (A, B, C) by inverse cosines.
    """
    if params is None:
        a3 = cmath.acos(A / 2) / PI
        a0 = cmath.acos(B / 2) / PI - 1
        a1 = cmath.acos(C / 2) / PI
    else:
        a0, a1, a3 = params
    disc = discriminant_poly(A, B, C)
    pairs = [sigma1_pair_traces(a0, a1, a3, b) for b in SIGMA1_TRACE_BRANCHES]
    roots = tuple(x for x, _ in pairs)
    values = tuple(complex(np.polyval(disc, x)) for x in roots)
    product = np.poly(np.array(roots))
    lead = disc[0] / product[0]
    mismatch = _coef_mismatch(disc, lead * product)
    dbl = []
    p01_err = 0.0
    for (x, y) in pairs:
        c2, c1, _ = y_quadratic(x, A, B, C)
        yy = -c1 / (2 * c2)
        dbl.append(yy)
        p01_err = max(p01_err, abs(yy - y))
    return DiscriminantReport(roots, values, tuple(dbl), p01_err, complex(lead), mismatch)


@dataclass(frozen=True)
class CubicReport:
    roots: tuple[complex, ...]
    cubic_at_roots: tuple[complex, ...]
    coefficient_mismatch: float
    root_sum: complex

    @property
    def max_residual(self) -> float:
        return max(abs(v) for v in self.cubic_at_roots)


def trace_cubic(A, B) -> np.ndarray:
    """X**3 + 3X**2 - 3(A**2 + AB)X + 3A**2 + B**2 + A**3 B - 4."""
    return np.array([1, 3, -3 * (A * A + A * B), 3 * A * A + B * B + A**3 * B - 4], dtype=complex)


def cubic_check(A: complex, B: complex, params: tuple[complex, complex] | None = None) -> CubicReport:
    if params is None:
        a1 = cmath.acos(A / 2) / PI
        a0 = cmath.acos(B / 2) / PI + 1
    else:
        a0, a1 = params
    cubic = trace_cubic(A, B)
    roots = tuple(sigma2sigma1_pair_trace(a0, a1, b) for b in SIGMA2SIGMA1_TRACE_BRANCHES)
    values = tuple(complex(np.polyval(cubic, x)) for x in roots)
    mismatch = _coef_mismatch(cubic, np.poly(np.array(roots)))
    return CubicReport(roots, values, mismatch, complex(sum(roots)))


# names used by the public interface contract
theorem9_check = discriminant_check
theorem10_check = cubic_check


def identity_point() -> FrickePoint:
    return FrickePoint(2, 2, 2, 2, 2, 2, 2)


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    m = rng.normal(size=(2, 2)) * scale + 1j * rng.normal(size=(2, 2)) * scale + np.eye(2)
    return m / np.sqrt(np.linalg.det(m))


def random_quadruple(rng: np.random.Generator, scale: float = 0.6) -> dict[str, np.ndarray]:
    """Random SL(2, C) matrices with M_inf M_1 M_t M_0 = I."""
    m0, mt, m1 = (random_sl2(rng, scale) for _ in range(3))
    minf = np.linalg.inv(m1 @ mt @ m0)
    return {"0": m0, "t": mt, "1": m1, "inf": minf}
