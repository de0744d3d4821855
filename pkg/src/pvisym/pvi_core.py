"""The Painleve VI Hamiltonian system in Okamoto's (y, z) coordinates.

Parameters are the five affine-Weyl coordinates ``alpha0..alpha4`` tied by
``alpha0 + alpha1 + 2*alpha2 + alpha3 + alpha4 = 1``.  The system is

    t(t-1) y' = 2y(y-1)(y-t)z - (a0-1)y(y-1) - a3 y(y-t) - a4 (y-1)(y-t)
    t(t-1) z' = -(y(y-1) + (y-1)(y-t) + y(y-t)) z**2
                + ((2y-1)(a0-1) + (2y-t)a3 + (2y-t-1)a4) z - (a1+a2)a2

and eliminating ``z`` gives PVI with ``alpha = a1**2/2``, ``beta = -a4**2/2``,
``gamma = a3**2/2``, ``delta = (1-a0**2)/2``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    PoleEncountered,
    SingularConfiguration,
    SingularTime,
    WrongParameterStratum,
)
from .integrator import integrate_segment
from .specfun import SERIES_TOL, ToleranceConfig, hyp2f1, hyp2f1_derivative

OMEGA = cmath.exp(2j * math.pi / 3)
AFFINE_TOL = 1e-12
STRATUM_TOL = 1e-12
BLOWUP = 1e8


@dataclass(frozen=True)
class PviParams:
    alpha0: complex
    alpha1: complex
    alpha2: complex
    alpha3: complex
    alpha4: complex

    def __post_init__(self):
        for name in ("alpha0", "alpha1", "alpha2", "alpha3", "alpha4"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        if abs(self.affine_defect()) > AFFINE_TOL:
            raise ValueError(
                f"alpha0 + alpha1 + 2 alpha2 + alpha3 + alpha4 = "
                f"{1 + self.affine_defect()} != 1"
            )

    def affine_defect(self) -> complex:
        a = self
        return a.alpha0 + a.alpha1 + 2 * a.alpha2 + a.alpha3 + a.alpha4 - 1

    @classmethod
    def solve_alpha2(cls, alpha0, alpha1, alpha3, alpha4) -> "PviParams":
        alpha2 = (1 - alpha0 - alpha1 - alpha3 - alpha4) / 2
        return cls(alpha0, alpha1, alpha2, alpha3, alpha4)

    @classmethod
    def sigma1(cls, alpha0, alpha1, alpha3) -> "PviParams":
        """Point of the alpha3 = alpha4 stratum."""
        return cls.solve_alpha2(alpha0, alpha1, alpha3, alpha3)

    @classmethod
    def sigma2sigma1(cls, alpha0, alpha1) -> "PviParams":
        """Point of the alpha1 = alpha3 = alpha4 stratum."""
        return cls.solve_alpha2(alpha0, alpha1, alpha1, alpha1)

    def as_tuple(self) -> tuple[complex, ...]:
        return (self.alpha0, self.alpha1, self.alpha2, self.alpha3, self.alpha4)

    def classical(self) -> tuple[complex, complex, complex, complex]:
        """(alpha, beta, gamma, delta) of the scalar PVI equation."""
        return (
            self.alpha1**2 / 2,
            -self.alpha4**2 / 2,
            self.alpha3**2 / 2,
            (1 - self.alpha0**2) / 2,
        )

    def is_sigma1(self, tol: float = STRATUM_TOL) -> bool:
        return abs(self.alpha3 - self.alpha4) <= tol

    def is_sigma2sigma1(self, tol: float = STRATUM_TOL) -> bool:
        return self.is_sigma1(tol) and abs(self.alpha1 - self.alpha3) <= tol


def require_sigma1(params: PviParams) -> None:
    if not params.is_sigma1():
        raise WrongParameterStratum(
            f"alpha3 = alpha4 required, got {params.alpha3} vs {params.alpha4}"
        )


def require_sigma2sigma1(params: PviParams) -> None:
    if not params.is_sigma2sigma1():
        raise WrongParameterStratum(
            "alpha1 = alpha3 = alpha4 required, got "
            f"({params.alpha1}, {params.alpha3}, {params.alpha4})"
        )


def params_from_classical(alpha, beta, gamma_, delta, branch_signs=(1, 1, 1, 1)) -> PviParams:
    """Invert the (alpha, beta, gamma, delta) formulas.

    ``branch_signs`` multiplies the principal square roots giving, in order,
    alpha1, alpha4, alpha3, alpha0; alpha2 then follows from the affine relation.
    """
    s1, s4, s3, s0 = branch_signs
    a1 = s1 * cmath.sqrt(2 * alpha)
    a4 = s4 * cmath.sqrt(-2 * beta)
    a3 = s3 * cmath.sqrt(2 * gamma_)
    a0 = s0 * cmath.sqrt(1 - 2 * delta)
    return PviParams.solve_alpha2(a0, a1, a3, a4)


@dataclass(frozen=True)
class PhaseState:
    y: complex
    z: complex
    t: complex

    def __post_init__(self):
        for name in ("y", "z", "t"):
            object.__setattr__(self, name, complex(getattr(self, name)))


def _check_time(t: complex) -> None:
    if t == 0 or t == 1:
        raise SingularTime(f"t = {t} is a fixed singular point")


def rhs_polynomials(params: PviParams, y, z, t):
    """Right sides of the system multiplied by t(t-1) (no division)."""
    a0, a1, a2, a3, a4 = params.as_tuple()
    p = 2 * y * (y - 1) * (y - t) * z - (a0 - 1) * y * (y - 1) - a3 * y * (y - t) - a4 * (y - 1) * (y - t)
    q = (
        -(y * (y - 1) + (y - 1) * (y - t) + y * (y - t)) * z * z
        + ((2 * y - 1) * (a0 - 1) + (2 * y - t) * a3 + (2 * y - t - 1) * a4) * z
        - (a1 + a2) * a2
    )
    return p, q


def vector_field(params: PviParams, s: PhaseState) -> tuple[complex, complex]:
    _check_time(s.t)
    p, q = rhs_polynomials(params, s.y, s.z, s.t)
    tt = s.t * (s.t - 1)
    return p / tt, q / tt


def hamiltonian(params: PviParams, s: PhaseState) -> complex:
    _check_time(s.t)
    a0, a1, a2, a3, a4 = params.as_tuple()
    y, z, t = s.y, s.z, s.t
    body = (
        y * (y - 1) * (y - t) * z**2
        - (a4 * (y - 1) * (y - t) + a3 * y * (y - t) + (a0 - 1) * y * (y - 1)) * z
        + a2 * (a1 + a2) * (y - t)
    )
    return body / (t * (t - 1))


def pvi_residual(params: PviParams, t, y, y_prime, y_double_prime) -> complex:
    """Left minus right side of the scalar PVI equation for a 2-jet."""
    _check_time(t)
    if y == 0 or y == 1 or y == t:
        raise SingularConfiguration(f"y = {y} lies on {{0, 1, t}}")
    al, be, ga, de = params.classical()
    rhs = (
        0.5 * (1 / y + 1 / (y - 1) + 1 / (y - t)) * y_prime**2
        - (1 / t + 1 / (t - 1) + 1 / (y - t)) * y_prime
        + y * (y - 1) * (y - t) / (t**2 * (t - 1) ** 2)
        * (al + be * t / y**2 + ga * (t - 1) / (y - 1) ** 2 + de * t * (t - 1) / (y - t) ** 2)
    )
    return y_double_prime - rhs


@dataclass(frozen=True)
class ComplexPath:
    """Polyline in the t-plane kept ``min_clearance`` away from ``excluded``."""

    vertices: tuple[complex, ...]
    min_clearance: float = 1e-3
    excluded: tuple[complex, ...] = field(default=(0j, 1 + 0j))

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(complex(v) for v in self.vertices))
        if not self.vertices:
            raise ValueError("path needs at least one vertex")
        for e in self.excluded:
            d = min(
                [abs(v - e) for v in self.vertices]
                + [_segment_distance(e, a, b) for a, b in zip(self.vertices, self.vertices[1:])]
            )
            if d < self.min_clearance:
                raise ValueError(f"path passes within {d:.3g} of excluded point {e}")

    def reversed(self) -> "ComplexPath":
        return ComplexPath(self.vertices[::-1], self.min_clearance, self.excluded)


def _segment_distance(p: complex, a: complex, b: complex) -> float:
    d = b - a
    if d == 0:
        return abs(p - a)
    u = ((p - a) * d.conjugate()).real / abs(d) ** 2
    u = min(1.0, max(0.0, u))
    return abs(p - (a + u * d))


DEFAULT_TOL = ToleranceConfig(rel_tol=1e-12, abs_tol=1e-14, max_terms=200_000)


def integrate(
    params: PviParams,
    s0: PhaseState,
    path: ComplexPath,
    tol: ToleranceConfig = DEFAULT_TOL,
    blowup: float = BLOWUP,
) -> list[PhaseState]:
    """Continue (y, z) along ``path``; returns the state at every vertex."""
    if s0.t != path.vertices[0]:
        raise ValueError("initial time must equal the first path vertex")
    for v in path.vertices:
        _check_time(v)

    def f(t, u):
        p, q = rhs_polynomials(params, u[0], u[1], t)
        tt = t * (t - 1)
        return np.array([p / tt, q / tt])

    def guard(t, u):
        if abs(u[0]) > blowup or abs(u[1]) > blowup:
            raise PoleEncountered(t)

    u = np.array([s0.y, s0.z])
    out = [s0]
    for ta, tb in zip(path.vertices[:-1], path.vertices[1:]):
        u = integrate_segment(
            f, ta, tb, u, tol.rel_tol, tol.abs_tol, guard=guard, max_steps=tol.max_terms
        )
        out.append(PhaseState(u[0], u[1], tb))
    return out


def trajectory_jet(
    params: PviParams, s: PhaseState, radius: float = 0.05, points: int = 32,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> tuple[complex, complex, complex]:
    """(y, y', y'') at ``s.t`` from an integrated trajectory.

    ``y'`` is read off the vector field; ``y''`` is the Cauchy-integral
    (trapezoidal, ``points`` nodes) derivative of ``y'`` sampled along the
    trajectory on a circle of ``radius`` about ``s.t``.
    """
    t0 = s.t
    ring = [t0 + radius * cmath.exp(2j * math.pi * k / points) for k in range(points + 1)]
    states = integrate(params, s, ComplexPath((t0,) + tuple(ring), min_clearance=1e-6), tol)[1:]
    dy = np.array([vector_field(params, st)[0] for st in states[:-1]])
    nodes = np.array(ring[:-1]) - t0
    ypp = np.mean(dy / nodes)
    return s.y, vector_field(params, s)[0], ypp


def riccati_vector_field(params: PviParams, z: complex, t: complex) -> complex:
    """dz/dt on the Riccati locus y = t (requires alpha0 = 0)."""
    if abs(params.alpha0) > STRATUM_TOL:
        raise WrongParameterStratum(f"alpha0 = 0 required, got {params.alpha0}")
    _check_time(t)
    a0, a1, a2, a3, a4 = params.as_tuple()
    tt = t * (t - 1)
    return (-tt * z * z + (1 - 2 * t + a3 * t + a4 * (t - 1)) * z - (a1 + a2) * a2) / tt


def _require_riccati(params: PviParams) -> None:
    if abs(params.alpha0) > STRATUM_TOL:
        raise WrongParameterStratum(f"alpha0 = 0 required, got {params.alpha0}")


def riccati_closed_form_sigma1(params: PviParams, t: complex, tol=SERIES_TOL) -> PhaseState:
    """y = t, z = d/dt log 2F1(a2/2, (a1+a2)/2; 1/2; 4(t - 1/2)**2)."""
    _require_riccati(params)
    require_sigma1(params)
    a, b = params.alpha2 / 2, (params.alpha1 + params.alpha2) / 2
    tau = t - 0.5
    w = 4 * tau * tau
    z = hyp2f1_derivative(a, b, 0.5, w, tol) * 8 * tau / hyp2f1(a, b, 0.5, w, tol)
    return PhaseState(t, z, t)


def _sigma2sigma1_tau(t):
    return (-OMEGA * t - 1) / (t + OMEGA)


def riccati_correction_sigma2sigma1(alpha1: complex, t: complex) -> complex:
    """Rational term added to the log-derivative in the alpha1=alpha3=alpha4 case."""
    num = t * (1 - t) * (t + OMEGA**2) + (t**3 + 3 * OMEGA * t**2 + 3 * (1 - OMEGA) * t - 2) * alpha1
    return num / (2 * t * (t - 1) * (t * t - t + 1))


def _riccati_s2s1_raw(params: PviParams, t: complex, tol) -> complex:
    a1 = params.alpha1
    a, b = (1 + a1) / 2, (1 + 3 * a1) / 6
    tau = _sigma2sigma1_tau(t)
    dtau = (1 - OMEGA**2) / (t + OMEGA) ** 2
    w = -(tau**3)
    dw = -3 * tau**2 * dtau
    log_der = hyp2f1_derivative(a, b, 2 / 3, w, tol) * dw / hyp2f1(a, b, 2 / 3, w, tol)
    return log_der + riccati_correction_sigma2sigma1(a1, t)


def riccati_closed_form_sigma2sigma1(params: PviParams, t: complex, tol=SERIES_TOL) -> PhaseState:
    """y = t with z the displayed 2F1 log-derivative plus rational correction.

    The correction is 0/0 at t = -omega**2; there the value is the mean over
    a small circle, which is exact for the (removable) singularity.
    """
    _require_riccati(params)
    require_sigma2sigma1(params)
    center = -(OMEGA**2)
    if abs(t - center) < 1e-4:
        r, n = 1e-3, 16
        z = sum(
            _riccati_s2s1_raw(params, t + r * cmath.exp(2j * math.pi * (k + 0.5) / n), tol)
            for k in range(n)
        ) / n
    else:
        z = _riccati_s2s1_raw(params, t, tol)
    return PhaseState(t, z, t)
