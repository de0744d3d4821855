"""Linear problem of Painleve VI, its hypergeometric reductions and monodromy.

The scalar equation is ``psi'' + p psi' + q psi = 0`` in ``x``.  Numerical
monodromy transports the companion system ``Phi' = [[0, 1], [-q, -p]] Phi``
from ``Phi = I`` around closed polylines; continuation along ``g`` then ``h``
gives ``M(gh) = M(h) M(g)`` (the representation is an anti-homomorphism).

Matrices are stored by role: ``"0"``, ``"t"``, ``"1"``, ``"inf"``, where
``"t"`` is the moving singular point (``1/2`` or ``-omega**2`` for the
symmetric equations).  Each rep also records the human label of the loop.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import (
    DegenerateParameters,
    GaugeMismatch,
    NonConvergence,
    PoleError,
    PoleTooClose,
    SingularPoint,
    SingularTime,
)
from .integrator import StepSizeUnderflow, integrate_segment
from .pvi_core import (
    OMEGA,
    STRATUM_TOL,
    PhaseState,
    PviParams,
    hamiltonian,
    require_sigma1,
    require_sigma2sigma1,
)
from .specfun import ToleranceConfig, gamma, rgamma

ROLES = ("0", "t", "1", "inf")
TRANSPORT_TOL = ToleranceConfig(rel_tol=1e-12, abs_tol=1e-14, max_terms=200_000)


# ---------------------------------------------------------------------------
# coefficients of the linear problem


def _check_x(x, points: Mapping[str, complex]):
    for name, s in points.items():
        if x == s:
            raise SingularPoint(f"x = {x} is the singular point {name}")


def coefficients(params: PviParams, state: PhaseState, x: complex) -> tuple[complex, complex]:
    """p(x, t) and q(x, t) of the isomonodromic linear equation.

    When ``y == t`` the apparent singularity merges with ``t`` and the
    merged (finite) form of p and q is returned.
    """
    a0, a1, a2, a3, a4 = params.as_tuple()
    y, z, t = state.y, state.z, state.t
    if t == 0 or t == 1:
        raise SingularTime(f"t = {t}")
    _check_x(x, {"0": 0, "1": 1, "t": t, "y": y})
    base_q = a2 * (a1 + a2) / (x * (x - 1))
    if y == t:
        p = (1 - a4) / x + (1 - a3) / (x - 1) - a0 / (x - t)
        return p, base_q + a0 * t * (t - 1) * z / (x * (x - 1) * (x - t))
    p = (1 - a4) / x + (1 - a3) / (x - 1) + (1 - a0) / (x - t) - 1 / (x - y)
    tt_h = t * (t - 1) * hamiltonian(params, state)
    q = base_q - tt_h / (x * (x - 1) * (x - t)) + y * (y - 1) * z / (x * (x - 1) * (x - y))
    return p, q


def deformation_coefficients(params: PviParams, state: PhaseState, x: complex) -> tuple[complex, complex]:
    """a(x, t), b(x, t) of the deformation equation d psi/dt = a psi_x + b psi."""
    a0, a1, a2, a3, a4 = params.as_tuple()
    y, z, t = state.y, state.z, state.t
    if t == 0 or t == 1:
        raise SingularTime(f"t = {t}")
    if x == y:
        raise SingularPoint(f"x = {x} is the apparent singularity y")
    tt = t * (t - 1)
    a = (y - t) / tt * x * (x - 1) / (x - y)
    b = (1 - a4 - a3 - a0) * (y - t) / (2 * tt) - y * (y - 1) * (y - t) * z / (tt * (x - y))
    return a, b


@dataclass(frozen=True)
class FuchsianOde:
    """Second-order Fuchsian operator with rational coefficients.

    ``points`` maps a role or name to each finite singular point; ``p`` and
    ``q`` are callables of ``x``.
    """

    p: Callable[[complex], complex]
    q: Callable[[complex], complex]
    points: Mapping[str, complex]
    params: PviParams | None = None
    state: PhaseState | None = None
    gauge: str = "raw"
    name: str = ""

    def coefficients(self, x: complex) -> tuple[complex, complex]:
        _check_x(x, self.points)
        return self.p(x), self.q(x)

    def residual(self, psi: complex, dpsi: complex, d2psi: complex, x: complex) -> complex:
        p, q = self.coefficients(x)
        return d2psi + p * dpsi + q * psi

    def companion(self, x: complex, u: np.ndarray) -> np.ndarray:
        p, q = self.p(x), self.q(x)
        # u holds Phi row-major: [psi1, psi2, psi1', psi2']
        return np.array([u[2], u[3], -q * u[0] - p * u[2], -q * u[1] - p * u[3]])


def linear_ode(params: PviParams, state: PhaseState) -> FuchsianOde:
    """The five-point equation at a point (y, z, t) of the phase space."""
    points = {"0": 0j, "1": 1 + 0j, "t": state.t}
    if state.y != state.t:
        points["y"] = state.y
    return FuchsianOde(
        p=lambda x: coefficients(params, state, x)[0],
        q=lambda x: coefficients(params, state, x)[1],
        points=points,
        params=params,
        state=state,
        name="linear",
    )


def hypergeometric_ode(a: complex, b: complex, c: complex) -> FuchsianOde:
    return FuchsianOde(
        p=lambda x: (c - (a + b + 1) * x) / (x * (1 - x)),
        q=lambda x: -a * b / (x * (1 - x)),
        points={"0": 0j, "1": 1 + 0j},
        name=f"2F1({a}, {b}; {c})",
    )


def heun_sigma1(params: PviParams) -> FuchsianOde:
    """The linear equation of the S2-1 solution at t = 1/2."""
    require_sigma1(params)
    a0, a1, a2, a3, _ = params.as_tuple()
    return FuchsianOde(
        p=lambda x: (1 - a3) / x + (1 - a3) / (x - 1) - a0 / (x - 0.5),
        q=lambda x: (a1 + a2) * a2 / (x * (x - 1)),
        points={"0": 0j, "t": 0.5 + 0j, "1": 1 + 0j},
        params=params,
        state=PhaseState(0.5, 0, 0.5),
        name="heun_sigma1",
    )


def heun_sigma2sigma1(params: PviParams) -> FuchsianOde:
    """The linear equation of the S3-2 solution at t = -omega**2."""
    require_sigma2sigma1(params)
    a0, a1, a2, _, _ = params.as_tuple()
    w2 = OMEGA**2
    k = (2 * OMEGA + 1) / 3
    return FuchsianOde(
        p=lambda x: (1 - a1) / x + (1 - a1) / (x - 1) - a0 / (x + w2),
        q=lambda x: a2 * (a1 + a2) / (x * (x - 1)) - k * a0 * a2 / (x * (x - 1) * (x + w2)),
        points={"0": 0j, "t": -w2, "1": 1 + 0j},
        params=params,
        state=PhaseState(-w2, k * a2, -w2),
        name="heun_sigma2sigma1",
    )


@dataclass(frozen=True)
class HypergeometricReduction:
    a: complex
    b: complex
    c: complex
    pullback: Callable[[complex], complex]
    pullback_derivative: Callable[[complex], complex]
    twist: complex = 0j

    def solutions(self, x: complex) -> tuple[complex, complex]:
        """The two fundamental solutions pulled back to ``x`` (principal branches)."""
        from .specfun import hyp2f1

        w = self.pullback(x)
        pref = self._prefactor(x)
        a, b, c = self.a, self.b, self.c
        f1 = hyp2f1(a, b, c, w)
        f2 = w ** (1 - c) * hyp2f1(a - c + 1, b - c + 1, 2 - c, w)
        return pref * f1, pref * f2

    def _prefactor(self, x):
        return 1 if self.twist == 0 else (x + OMEGA**2) ** self.twist


def hypergeometric_reduction_sigma1(params: PviParams) -> HypergeometricReduction:
    """(a, b, c) with pullback xi = 4x(1 - x)."""
    require_sigma1(params)
    a0, a1, a2, a3, _ = params.as_tuple()
    return HypergeometricReduction(
        a2 / 2, (a1 + a2) / 2, 1 - a3,
        pullback=lambda x: 4 * x * (1 - x),
        pullback_derivative=lambda x: 4 - 8 * x,
    )


def xi_sigma2sigma1(x: complex) -> complex:
    return OMEGA * (x + OMEGA) / (x + OMEGA**2)


def x_from_xi(xi: complex) -> complex:
    return OMEGA**2 * (1 - xi) / (xi - OMEGA)


def hypergeometric_reduction_sigma2sigma1(params: PviParams) -> HypergeometricReduction:
    """(a, b, c) with pullback eta = xi**3 and twist (x + omega**2)**(-alpha2)."""
    require_sigma2sigma1(params)
    a0, a1, a2, _, _ = params.as_tuple()

    def eta(x):
        return xi_sigma2sigma1(x) ** 3

    def deta(x):
        xi = xi_sigma2sigma1(x)
        return 3 * xi**2 * OMEGA * (OMEGA**2 - OMEGA) / (x + OMEGA**2) ** 2

    return HypergeometricReduction(
        a2 / 3, (1 + a0 + a2) / 3, 2 / 3 + 0j,
        pullback=eta, pullback_derivative=deta, twist=-a2,
    )


# ---------------------------------------------------------------------------
# loops


@dataclass(frozen=True)
class Loop:
    basepoint: complex
    polyline: tuple[complex, ...]
    label: str

    def __post_init__(self):
        pts = tuple(complex(v) for v in self.polyline)
        # snap floating round-off at the closing vertex
        if abs(pts[-1] - pts[0]) < 1e-12 * (1 + abs(pts[0])):
            pts = pts[:-1] + (pts[0],)
        object.__setattr__(self, "polyline", pts)
        object.__setattr__(self, "basepoint", complex(self.basepoint))
        if pts[0] != self.basepoint or pts[-1] != self.basepoint:
            raise ValueError(f"loop {self.label} must start and end at the basepoint")

    def clearance(self, points: Sequence[complex]) -> float:
        return min(_polyline_distance(p, self.polyline) for p in points)

    def winding(self, p: complex) -> int:
        total = 0.0
        for a, b in zip(self.polyline, self.polyline[1:]):
            total += cmath.phase((b - p) / (a - p))
        return round(total / (2 * math.pi))

    def mapped(self, f: Callable[[complex], complex], label: str | None = None) -> "Loop":
        poly = tuple(f(v) for v in self.polyline)
        return Loop(poly[0], poly, label or self.label)


def _segment_distance(p, a, b):
    d = b - a
    if d == 0:
        return abs(p - a)
    u = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(p - (a + u * d))


def _polyline_distance(p, poly):
    return min(_segment_distance(p, a, b) for a, b in zip(poly, poly[1:]))


def _arc(center, radius, theta0, theta1, per_turn=96):
    n = max(2, int(math.ceil(abs(theta1 - theta0) / (2 * math.pi) * per_turn)))
    return [center + radius * cmath.exp(1j * (theta0 + (theta1 - theta0) * k / n)) for k in range(n + 1)]


def lollipop(base, waypoints, center, radius, label, turns=1, per_turn=96) -> Loop:
    """Tail ``base -> waypoints -> circle``, ``turns`` circuits (negative: clockwise)."""
    tail = [complex(base)] + [complex(w) for w in waypoints]
    theta0 = cmath.phase(tail[-1] - center) if tail[-1] != center else 0.0
    circle = _arc(center, radius, theta0, theta0 + 2 * math.pi * turns, per_turn * abs(turns))
    return Loop(base, tuple(tail + circle + tail[::-1]), label)


def min_pairwise(points: Sequence[complex]) -> float:
    pts = list(points)
    return min(abs(a - b) for i, a in enumerate(pts) for b in pts[i + 1 :])


@dataclass(frozen=True)
class LoopSet:
    """Four loops keyed by role, the ring order whose product is trivial."""

    loops: Mapping[str, Loop]
    ring: tuple[str, ...]
    basepoint: complex


def standard_loops(
    points: Mapping[str, complex],
    base: complex | None = None,
    height: float = 0.3,
    radius_factor: float = 0.15,
    apparent: Sequence[complex] = (),
) -> LoopSet:
    """Lollipops from a basepoint left of the real points, tails through the upper half-plane.

    Each tail rises vertically from the basepoint, runs at constant height
    and descends onto its point; the point at infinity is encircled
    clockwise by a large circle reached along the real axis to the left.
    Apparent singularities only constrain clearance.
    """
    finite = list(points.values()) + list(apparent)
    r = radius_factor * min_pairwise(finite + ([base] if base is not None else []))
    if base is None:
        base = min(p.real for p in finite) - 0.25
    base = complex(base)
    top = max(p.imag for p in points.values()) + height
    loops = {}
    for role, c in points.items():
        entry = _entry_angle(c, r, top, finite)
        waypoints = [complex(base.real, top), complex(c.real, top), c + 2 * r * cmath.exp(1j * entry)]
        loops[role] = lollipop(base, waypoints, c, r, label=f"gamma_{role}")
    cen = sum(points.values()) / len(points)
    big = max(abs(p - cen) for p in finite) + max(1.0, abs(base - cen))
    start = complex(cen.real - big, base.imag)
    circle = _arc(cen, big, math.pi, -math.pi)
    # the tail runs left along the real line from the basepoint onto the circle
    poly = (base, start) + tuple(circle[1:]) + (base,)
    loops["inf"] = Loop(base, poly, "gamma_inf")
    order = sorted(points, key=lambda k: (points[k].real, points[k].imag))
    return LoopSet(loops, tuple(order) + ("inf",), base)


def _entry_angle(c, r, top, finite):
    """Descent direction onto ``c`` from above keeping clear of other points."""
    best, best_d = math.pi / 2, -1.0
    for deg in (90, 60, 120, 45, 135, 30, 150):
        th = math.radians(deg)
        seg = (complex(c.real, top), c + 2 * r * cmath.exp(1j * th), c + r * cmath.exp(1j * th))
        d = min((_polyline_distance(p, seg) for p in finite if p != c), default=1.0)
        if d > 1.5 * r:
            return th
        if d > best_d:
            best, best_d = th, d
    return best


def sigma1_loops(base: complex = -0.25, radius_factor: float = 0.15) -> LoopSet:
    """Loops for the t = 1/2 equation; the basepoint lies on the real axis left of 0."""
    ls = standard_loops({"0": 0j, "t": 0.5 + 0j, "1": 1 + 0j}, base=base, radius_factor=radius_factor)
    labels = {"0": "gamma_0", "t": "gamma_1/2", "1": "gamma_1", "inf": "gamma_inf"}
    loops = {k: replace(v, label=labels[k]) for k, v in ls.loops.items()}
    return LoopSet(loops, ls.ring, ls.basepoint)


def sigma2sigma1_xi_loops(base: float = 0.5, radius: float = 0.12, big: float = 4.0) -> dict[str, Loop]:
    """Loops in the xi-plane around 1, omega**2, omega and infinity.

    The loop around ``omega**k`` is the lift of ``L0^{-k} L1 L0^{k}``: an arc
    of ``|xi| = base`` to ``base * omega**k``, the rotated loop around 1, and
    the arc back.  The loop around infinity leaves the basepoint westwards
    through xi = 0 (a regular point) and runs a clockwise circle.
    """
    r1 = lollipop(base, [], 1, radius, "L1")
    inner = list(r1.polyline)

    def rotated(k, label):
        if k == 0:
            return Loop(base, tuple(inner), label)
        th = 2 * math.pi / 3 * k
        arc = _arc(0, base, 0.0, th)
        rot = [v * cmath.exp(1j * th) for v in inner]
        return Loop(base, tuple(arc + rot[1:-1] + arc[::-1]), label)

    out = {
        "0": rotated(0, "gamma_xi=1"),
        "1": rotated(-1, "gamma_xi=omega^2"),
        "inf": rotated(1, "gamma_xi=omega"),
    }
    circle = _arc(0, big, math.pi / 4, math.pi / 4 - 2 * math.pi)
    out["t"] = Loop(base, (complex(base),) + tuple(circle) + (complex(base),), "gamma_xi=inf")
    return out


def sigma2sigma1_loops(xi_base: float = 0.5, radius: float = 0.12, refine: int = 8) -> LoopSet:
    """xi-plane loops carried to the x-plane by the inverse Moebius map."""
    out = {}
    for role, lp in sigma2sigma1_xi_loops(xi_base, radius).items():
        fine = _refine(lp.polyline, refine)
        out[role] = Loop(x_from_xi(fine[0]), tuple(x_from_xi(v) for v in fine), lp.label)
    return LoopSet(out, ("inf", "1", "0", "t"), out["0"].basepoint)


def _refine(poly, k):
    out = [poly[0]]
    for a, b in zip(poly, poly[1:]):
        out.extend(a + (b - a) * j / k for j in range(1, k + 1))
    return out


# ---------------------------------------------------------------------------
# representations


@dataclass(frozen=True)
class MonodromyRep:
    basepoint: complex
    matrices: Mapping[str, np.ndarray]
    gauge: str = "raw"
    labels: Mapping[str, str] = field(default_factory=dict)
    ring: tuple[str, ...] = ("inf", "1", "t", "0")
    meta: Mapping[str, object] = field(default_factory=dict)

    def ring_product(self) -> np.ndarray:
        """Product of matrices in ``ring`` order (left to right)."""
        out = np.eye(2, dtype=complex)
        for k in self.ring:
            out = out @ self.matrices[k]
        return out

    def ring_defect(self) -> float:
        return float(np.max(np.abs(self.ring_product() - np.eye(2))))


def numerical_monodromy(
    ode: FuchsianOde,
    loops: LoopSet | Mapping[str, Loop],
    tol: ToleranceConfig = TRANSPORT_TOL,
    min_clearance: float = 1e-3,
) -> MonodromyRep:
    """Transport the fundamental matrix around each loop, starting from I."""
    if isinstance(loops, LoopSet):
        loopmap, ring = loops.loops, loops.ring
    else:
        loopmap, ring = loops, ()
    bases = {lp.basepoint for lp in loopmap.values()}
    if len(bases) != 1 and max(abs(a - b) for a in bases for b in bases) > 1e-12:
        raise ValueError("loops must share one basepoint")
    base = next(iter(loopmap.values())).basepoint
    sing = list(ode.points.values())
    mats = {}
    for role, lp in loopmap.items():
        d = lp.clearance(sing)
        if d < min_clearance:
            raise PoleTooClose(f"loop {lp.label} passes within {d:.3g} of a singular point")
        mats[role] = transport(ode, lp.polyline, tol)
    rep_ring = _anti_ring(ring) if ring else ()
    return MonodromyRep(
        base, mats, ode.gauge, {k: v.label for k, v in loopmap.items()}, rep_ring or ("inf", "1", "t", "0")
    )


def _anti_ring(path_ring: Sequence[str]) -> tuple[str, ...]:
    """Matrix order for a path product (continuation reverses the order)."""
    return tuple(reversed(tuple(path_ring)))


def transport(ode: FuchsianOde, polyline: Sequence[complex], tol: ToleranceConfig = TRANSPORT_TOL) -> np.ndarray:
    u = np.array([1, 0, 0, 1], dtype=complex)
    try:
        for a, b in zip(polyline, polyline[1:]):
            u = integrate_segment(ode.companion, a, b, u, tol.rel_tol, tol.abs_tol, max_steps=tol.max_terms)
    except StepSizeUnderflow as exc:
        raise NonConvergence(str(exc)) from exc
    return u.reshape(2, 2)


# ---------------------------------------------------------------------------
# exact monodromy tables
#
# Each connection-matrix entry is sign * exp(i pi phase) * prod Gamma(num) / prod Gamma(den),
# with the arguments given as functions of (a0, a1, a2, a3, a4).


@dataclass(frozen=True)
class GammaEntry:
    phase: Callable
    num: tuple[Callable, ...]
    den: tuple[Callable, ...]
    sign: int = 1
    text: str = ""

    def __call__(self, a) -> complex:
        val = self.sign * cmath.exp(1j * math.pi * self.phase(a))
        for f in self.num:
            try:
                val *= gamma(f(a))
            except PoleError as exc:
                raise DegenerateParameters(f"Gamma pole in entry {self.text}: {exc}") from exc
        for f in self.den:
            val *= rgamma(f(a))
        return val


def _E(phase, num, den, sign=1, text=""):
    return GammaEntry(phase, tuple(num), tuple(den), sign, text)


_zero = lambda a: 0  # noqa: E731

SIGMA1_G0 = {
    (0, 0): _E(lambda a: -a[2] / 2, [lambda a: 1 - a[3], lambda a: a[1] / 2],
               [lambda a: (a[1] + a[2]) / 2, lambda a: 1 - a[3] - a[2] / 2], text="G0[0,0]"),
    (0, 1): _E(lambda a: -(a[3] + a[2] / 2), [lambda a: 1 + a[3], lambda a: a[1] / 2],
               [lambda a: 1 - a[2] / 2, lambda a: (1 - a[0] - a[2]) / 2], text="G0[0,1]"),
    (1, 0): _E(lambda a: -(a[1] + a[2]) / 2, [lambda a: 1 - a[3], lambda a: -a[1] / 2],
               [lambda a: a[2] / 2, lambda a: (1 + a[0] + a[2]) / 2], text="G0[1,0]"),
    (1, 1): _E(lambda a: (a[0] + a[2] - 1) / 2, [lambda a: 1 + a[3], lambda a: -a[1] / 2],
               [lambda a: (1 - a[1] - a[2]) / 2, lambda a: a[3] + a[2] / 2], text="G0[1,1]"),
}

SIGMA1_GH = {
    (0, 0): _E(_zero, [lambda a: (3 + a[0]) / 2, lambda a: -a[1] / 2],
               [lambda a: (1 + a[0] + a[2]) / 2, lambda a: (2 - a[1] - a[2]) / 2], text="Gh[0,0]"),
    (0, 1): _E(_zero, [lambda a: (3 + a[0]) / 2, lambda a: a[1] / 2],
               [lambda a: 1 - a[3] - a[2] / 2, lambda a: 1 - a[2] / 2], sign=-1, text="Gh[0,1]"),
    (1, 0): _E(lambda a: (1 + a[0]) / 2, [lambda a: (1 - a[0]) / 2, lambda a: a[1] / 2],
               [lambda a: a[2] / 2, lambda a: a[3] + a[2] / 2], sign=-1, text="Gh[1,0]"),
    (1, 1): _E(lambda a: (1 + a[0]) / 2, [lambda a: (1 - a[0]) / 2, lambda a: a[1] / 2],
               [lambda a: (a[1] + a[2]) / 2, lambda a: (1 - a[0] - a[2]) / 2], text="Gh[1,1]"),
}

SIGMA2SIGMA1_G0 = {
    (0, 0): _E(lambda a: a[2] / 3, [lambda a: 2 / 3, lambda a: (1 + a[0]) / 3],
               [lambda a: (1 + a[0] + a[2]) / 3, lambda a: (2 - a[2]) / 3], text="G0[0,0]"),
    (0, 1): _E(lambda a: (1 + a[2]) / 3, [lambda a: 4 / 3, lambda a: (1 + a[0]) / 3],
               [lambda a: 1 - a[2] / 3, lambda a: (2 + a[0] + a[2]) / 3], text="G0[0,1]"),
    (1, 0): _E(lambda a: (1 + a[0] + a[2]) / 3, [lambda a: 2 / 3, lambda a: -(1 + a[0]) / 3],
               [lambda a: a[2] / 3, lambda a: (1 - a[0] - a[2]) / 3], text="G0[1,0]"),
    (1, 1): _E(lambda a: (2 + a[0] + a[2]) / 3, [lambda a: 4 / 3, lambda a: -(1 + a[0]) / 3],
               [lambda a: (2 - a[0] - a[2]) / 3, lambda a: (1 + a[2]) / 3], text="G0[1,1]"),
}

SIGMA2SIGMA1_G1 = {
    (0, 0): _E(_zero, [lambda a: (2 + a[0] + 2 * a[2]) / 3, lambda a: (1 + a[0]) / 3],
               [lambda a: (1 + a[0] + a[2]) / 3, lambda a: (2 + a[0] + a[2]) / 3], text="G1[0,0]"),
    (0, 1): _E(lambda a: (-1 + a[0] + 2 * a[2]) / 3, [lambda a: (4 - a[0] - 2 * a[2]) / 3, lambda a: (1 + a[0]) / 3],
               [lambda a: (2 - a[2]) / 3, lambda a: 1 - a[2] / 3], text="G1[0,1]"),
    (1, 0): _E(_zero, [lambda a: (2 + a[0] + 2 * a[2]) / 3, lambda a: -(1 + a[0]) / 3],
               [lambda a: a[2] / 3, lambda a: (1 + a[2]) / 3], text="G1[1,0]"),
    (1, 1): _E(lambda a: (-1 + a[0] + 2 * a[2]) / 3, [lambda a: (4 - a[0] - 2 * a[2]) / 3, lambda a: -(1 + a[0]) / 3],
               [lambda a: (1 - a[0] - a[2]) / 3, lambda a: (2 - a[0] - a[2]) / 3], text="G1[1,1]"),
}


def _require_nonresonant(diffs: Mapping[str, complex], tol: float = 1e-9) -> None:
    """Reject integer local exponent differences (logarithmic monodromy)."""
    for where, d in diffs.items():
        if abs(d - round(d.real)) < tol:
            raise DegenerateParameters(f"integer exponent difference {d} at {where}")


def _matrix(table, a) -> np.ndarray:
    return np.array([[table[(i, j)](a) for j in range(2)] for i in range(2)], dtype=complex)


def _conj(G, L):
    return G @ L @ np.linalg.inv(G)


def _e(x):
    return cmath.exp(2j * math.pi * x)


# Corrected transcription.  The connection matrix at 0 differs from the
# printed one in a single Gamma argument.  The matrix at 1/2 is rebuilt in
# the same basis at infinity as the one at 0: columns are the local
# solutions with exponents 0 and (1 + alpha0)/2, rows the solutions
# xi**(-a), xi**(-b) at infinity.  Each entry follows from the Gauss
# connection formula; see ``SIGMA1_CORRECTIONS`` for the entry-wise diff.
SIGMA1_G0_CORRECTED = dict(SIGMA1_G0)
SIGMA1_G0_CORRECTED[(1, 1)] = _E(
    lambda a: (a[0] + a[2] - 1) / 2, [lambda a: 1 + a[3], lambda a: -a[1] / 2],
    [lambda a: (2 - a[1] - a[2]) / 2, lambda a: a[3] + a[2] / 2], text="G0[1,1]",
)

SIGMA1_GH_CORRECTED = {
    (0, 0): _E(lambda a: (1 + a[0] + a[1]) / 2, [lambda a: (1 - a[0]) / 2, lambda a: a[1] / 2],
               [lambda a: (a[1] + a[2]) / 2, lambda a: (1 - a[0] - a[2]) / 2], text="Gh[0,0]"),
    (0, 1): _E(lambda a: a[1] / 2, [lambda a: (3 + a[0]) / 2, lambda a: a[1] / 2],
               [lambda a: 1 - a[3] - a[2] / 2, lambda a: 1 - a[2] / 2], sign=-1, text="Gh[0,1]"),
    (1, 0): _E(lambda a: (1 + a[0] - a[1]) / 2, [lambda a: (1 - a[0]) / 2, lambda a: -a[1] / 2],
               [lambda a: a[2] / 2, lambda a: a[3] + a[2] / 2], text="Gh[1,0]"),
    (1, 1): _E(lambda a: -a[1] / 2, [lambda a: (3 + a[0]) / 2, lambda a: -a[1] / 2],
               [lambda a: (1 + a[0] + a[2]) / 2, lambda a: (2 - a[1] - a[2]) / 2], sign=-1, text="Gh[1,1]"),
}

SIGMA1_CORRECTIONS = (
    "G0[1,1]: denominator Gamma((1 - a1 - a2)/2) -> Gamma((2 - a1 - a2)/2)",
    "Gh: printed matrix is the corrected one mirrored in its anti-diagonal "
    "(Gh_corr[i,j] ~ Gh_printed[1-j,1-i]), with row phases exp(+-i pi a1/2)",
    "Gh[1,0] (printed position): numerator Gamma(a1/2) -> Gamma(-a1/2)",
)


def _sigma1_matrices(a, g0: np.ndarray, gh: np.ndarray) -> dict[str, np.ndarray]:
    lam0 = np.diag([1, _e(a[3])])
    lamh = np.diag([1, -cmath.exp(1j * math.pi * a[0])])
    tinf = np.diag([cmath.exp(1j * math.pi * a[2]), cmath.exp(1j * math.pi * (a[1] + a[2]))])
    m0 = _conj(g0, lam0)
    mh = _conj(gh, lamh)
    return {
        "0": m0,
        "t": mh @ mh,
        "1": mh @ _conj(g0, lam0) @ np.linalg.inv(mh),
        "inf": tinf @ tinf,
    }


def exact_monodromy_sigma1(params: PviParams, variant: str = "corrected") -> MonodromyRep:
    """Closed-form monodromy of the S2-1 solution at t = 1/2 (raw gauge).

    ``variant="printed"`` uses the tables exactly as transcribed;
    ``"corrected"`` uses the connection matrices rederived in one basis.
    """
    require_sigma1(params)
    a = params.as_tuple()
    tables = {"printed": (SIGMA1_G0, SIGMA1_GH), "corrected": (SIGMA1_G0_CORRECTED, SIGMA1_GH_CORRECTED)}
    if variant not in tables:
        raise ValueError(f"unknown variant {variant!r}")
    t0, th = tables[variant]
    _require_nonresonant({"xi=0": a[3], "xi=1": (1 + a[0]) / 2, "xi=infinity": a[1] / 2})
    mats = _sigma1_matrices(a, _matrix(t0, a), _matrix(th, a))
    labels = {"0": "gamma_0", "t": "gamma_1/2", "1": "gamma_1", "inf": "gamma_inf"}
    return MonodromyRep(None, mats, "raw", labels, ("inf", "1", "t", "0"), {"variant": variant})


def exact_monodromy_sigma2sigma1(params: PviParams) -> MonodromyRep:
    """Closed-form monodromy of the S3-2 solution at t = -omega**2 (raw gauge).

    Roles follow the x-plane: ``"t"`` is x = -omega**2 (xi = infinity),
    ``"0"`` is x = 0 (xi = 1), ``"1"`` is x = 1 (xi = omega**2) and
    ``"inf"`` is x = infinity (xi = omega).
    """
    require_sigma2sigma1(params)
    a = params.as_tuple()
    _require_nonresonant({"eta=1": a[1], "eta=infinity": (1 + a[0]) / 3})
    g0 = _matrix(SIGMA2SIGMA1_G0, a)
    g1 = _matrix(SIGMA2SIGMA1_G1, a)
    lam0 = np.diag([1, _e(1 / 3)])
    lam1 = np.diag([1, _e((1 - a[0] - 2 * a[2]) / 3)])
    tinf = np.diag([_e(a[2] / 3), _e((1 + a[0] + a[2]) / 3)])
    l0 = _conj(g0, lam0)
    l1 = _conj(g1, lam1)
    l0i = np.linalg.inv(l0)
    mats = {
        "t": _e(-a[2]) * tinf @ tinf @ tinf,
        "0": l1,
        "1": l0 @ l1 @ l0i,
        "inf": _e(a[2]) * l0i @ l1 @ l0,
    }
    labels = {"t": "gamma_xi=inf", "0": "gamma_xi=1", "1": "gamma_xi=omega^2", "inf": "gamma_xi=omega"}
    meta = {"omega": "exp(2*pi*i/3)", "x_of_xi": {"1": "0", "omega^2": "1", "inf": "-omega^2", "omega": "inf"}}
    return MonodromyRep(None, mats, "raw", labels, ("t", "0", "1", "inf"), meta)


def _basis_factors(a):
    """printed / corrected for entries without a transcription error, per matrix and row."""
    h = cmath.exp(1j * math.pi * a[1] / 2)
    return {"G0": (1, 1), "Gh": (1 / h, -h)}


def sigma1_discrepancies(params: PviParams, tol: float = 1e-8) -> list[dict]:
    """Entry-wise comparison of printed and corrected connection matrices.

    The printed matrix at 1/2 is first mirrored in its anti-diagonal and the
    known row factors of the change of basis are divided out; an entry is
    flagged when the remaining ratio differs from 1 by more than ``tol``.
    """
    a = params.as_tuple()
    basis = _basis_factors(a)
    out = []
    for name, printed, corrected, mirror in (
        ("G0", SIGMA1_G0, SIGMA1_G0_CORRECTED, False),
        ("Gh", SIGMA1_GH, SIGMA1_GH_CORRECTED, True),
    ):
        p = _matrix(printed, a)
        c = _matrix(corrected, a)
        for i in range(2):
            for j in range(2):
                src = (1 - j, 1 - i) if mirror else (i, j)
                ratio = p[src] / c[i, j] / basis[name][i]
                out.append({
                    "matrix": name, "entry": (i, j), "printed_position": src,
                    "printed": p[src], "corrected": c[i, j], "ratio": ratio,
                    "flagged": abs(ratio - 1) > tol,
                })
    return out


# ---------------------------------------------------------------------------
# normalisation and trace coordinates


def sl2_scalars(params: PviParams) -> dict[str, complex]:
    """Scalars contributed on each loop by x^(a4/2) (x-1)^(a3/2) (x-t)^((a0-1)/2)."""
    a0, a1, a2, a3, a4 = params.as_tuple()
    s0 = cmath.exp(-1j * math.pi * a4)
    s1 = cmath.exp(-1j * math.pi * a3)
    st = cmath.exp(-1j * math.pi * (a0 - 1))
    return {"0": s0, "1": s1, "t": st, "inf": 1 / (s0 * s1 * st)}


def sl2_normalize(params: PviParams, rep: MonodromyRep) -> MonodromyRep:
    if rep.gauge != "raw":
        raise GaugeMismatch(f"representation is already in gauge {rep.gauge!r}")
    s = sl2_scalars(params)
    mats = {k: s[k] * m for k, m in rep.matrices.items()}
    return replace(rep, matrices=mats, gauge="sl2_normalized")


TRACE_KEYS = ("p0", "pt", "p1", "p_inf", "p01", "p1t", "pt0")


def trace_vector(rep: MonodromyRep) -> np.ndarray:
    """(p0, pt, p1, p_inf, p01, p1t, pt0) of the matrices as given."""
    m = rep.matrices
    tr = np.trace
    return np.array([
        tr(m["0"]), tr(m["t"]), tr(m["1"]), tr(m["inf"]),
        tr(m["0"] @ m["1"]), tr(m["1"] @ m["t"]), tr(m["t"] @ m["0"]),
    ])


def compare_reps(a: MonodromyRep, b: MonodromyRep) -> float:
    return float(np.max(np.abs(trace_vector(a) - trace_vector(b))))


# ---------------------------------------------------------------------------
# numerical counterparts


def numerical_monodromy_sigma1(params: PviParams, base: complex = -0.25, tol=TRANSPORT_TOL) -> MonodromyRep:
    rep = numerical_monodromy(heun_sigma1(params), sigma1_loops(base), tol)
    return replace(rep, meta={"equation": "heun_sigma1"})


def numerical_monodromy_sigma2sigma1(params: PviParams, xi_base: float = 0.5, tol=TRANSPORT_TOL) -> MonodromyRep:
    rep = numerical_monodromy(heun_sigma2sigma1(params), sigma2sigma1_loops(xi_base), tol)
    return replace(rep, meta={"equation": "heun_sigma2sigma1", "omega": "exp(2*pi*i/3)"})


def sigma1_xi_loops(xi_base: complex, radius: float = 0.1, height: float = 0.3) -> dict[str, Loop]:
    """Loops L0, L1 (tails through the upper half plane) and L_inf in the xi-plane."""
    ls = standard_loops({"0": 0j, "1": 1 + 0j}, base=xi_base, height=height, radius_factor=radius)
    return {"L0": ls.loops["0"], "L1": ls.loops["1"], "Linf": ls.loops["inf"]}


def sigma1_covering_defects(params: PviParams, base: complex = -0.25, tol=TRANSPORT_TOL) -> dict[str, float]:
    """Matrix identities between the x-plane loops and words in L0, L1, L_inf.

    x-plane monodromy is compared with ``S M_xi S^-1`` where
    ``S = diag(1, dxi/dx)`` at the basepoint converts between the two
    normalisations of the fundamental matrix.
    """
    red = hypergeometric_reduction_sigma1(params)
    xrep = numerical_monodromy_sigma1(params, base, tol)
    xi_b = red.pullback(base)
    hyp = hypergeometric_ode(red.a, red.b, red.c)
    L = {k: transport(hyp, lp.polyline, tol) for k, lp in sigma1_xi_loops(xi_b).items()}
    S = np.diag([1, red.pullback_derivative(base)])
    Si = np.linalg.inv(S)
    inv = np.linalg.inv
    words = {
        "0": L["L0"],
        "t": L["L1"] @ L["L1"],
        "1": L["L1"] @ L["L0"] @ inv(L["L1"]),
        "inf": L["Linf"] @ L["Linf"],
    }
    return {k: float(np.max(np.abs(xrep.matrices[k] - S @ w @ Si))) for k, w in words.items()}


def sigma2sigma1_covering_defects(params: PviParams, xi_base: float = 0.5, tol=TRANSPORT_TOL) -> dict[str, float]:
    """Same identities for the cubic covering eta = xi**3.

    The eta-plane loops L0, L1, L_inf are transported for the hypergeometric
    equation in eta; the x-plane solutions are (x + omega**2)**(-alpha2)
    times pulled-back eta-solutions, so the comparison conjugates by the
    jet map at the basepoint and multiplies by the scalar the twist picks up
    on loops winding around x = -omega**2.
    """
    red = hypergeometric_reduction_sigma2sigma1(params)
    xrep = numerical_monodromy_sigma2sigma1(params, xi_base, tol)
    hyp = hypergeometric_ode(red.a, red.b, red.c)
    eta_b = xi_base**3
    r = 0.1
    l1 = lollipop(eta_b, [], 1, r, "L1")
    l0 = Loop(eta_b, tuple(_arc(0, eta_b, 0.0, 2 * math.pi)), "L0")
    # leaves north-east so that the path product L0 L1 L_inf is trivial
    linf = Loop(eta_b, (eta_b,) + tuple(_arc(0, 4.0, math.pi / 4, math.pi / 4 - 2 * math.pi)) + (eta_b,), "Linf")
    L0, L1, Linf = (transport(hyp, lp.polyline, tol) for lp in (l0, l1, linf))
    inv = np.linalg.inv
    xb = x_from_xi(xi_base)
    # psi = f(x) * F(eta(x)): jet map from (F, F') at eta_b to (psi, psi') at xb
    f = (xb + OMEGA**2) ** (-params.alpha2)
    df = -params.alpha2 * f / (xb + OMEGA**2)
    S = np.array([[f, 0], [df, f * red.pullback_derivative(xb)]])
    Si = inv(S)
    a2 = params.alpha2
    words = {
        "0": L1,
        "1": L0 @ L1 @ inv(L0),
        "inf": _e(a2) * inv(L0) @ L1 @ L0,
        "t": _e(-a2) * Linf @ Linf @ Linf,
    }
    return {k: float(np.max(np.abs(xrep.matrices[k] - S @ w @ Si))) for k, w in words.items()}


def five_point_monodromy(params: PviParams, state: PhaseState, base: complex = -0.25, tol=TRANSPORT_TOL) -> MonodromyRep:
    """Numerical monodromy of the linear equation at a phase-space point."""
    ode = linear_ode(params, state)
    finite = {k: v for k, v in ode.points.items() if k != "y"}
    apparent = [state.y] if "y" in ode.points else []
    loops = standard_loops(finite, base=base, apparent=apparent)
    return numerical_monodromy(ode, loops, tol)


@dataclass(frozen=True)
class IsomonodromyReport:
    start: PhaseState
    end: PhaseState
    traces_start: np.ndarray
    traces_end: np.ndarray

    @property
    def drift(self) -> float:
        return float(np.max(np.abs(self.traces_start - self.traces_end)))


def isomonodromy_check(params: PviParams, t_end: complex = 0.35, base: complex = -0.25) -> IsomonodromyReport:
    """Trace coordinates of the S2-1 linear equation at t = 1/2 and at ``t_end``.

    The S2-1 solution takes the value (y, z) = (1/2, 0) at t = 1/2; it is
    continued along the straight segment to ``t_end`` by the Hamiltonian
    system.
    """
    from .pvi_core import ComplexPath, integrate

    require_sigma1(params)
    s0 = PhaseState(0.5, 0, 0.5)
    s1 = integrate(params, s0, ComplexPath((0.5, t_end)))[-1]
    r0 = sl2_normalize(params, five_point_monodromy(params, s0, base))
    r1 = sl2_normalize(params, five_point_monodromy(params, s1, base))
    return IsomonodromyReport(s0, s1, trace_vector(r0), trace_vector(r1))
