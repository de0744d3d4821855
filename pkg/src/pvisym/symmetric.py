"""Symmetric solutions about the fixed points of sigma1 and sigma2 o sigma1.

Every branch is a truncated Laurent expansion of (y, z) in ``s = t - center``.
The unknown coefficients solve one polynomial system made of

* the coefficients of ``t(t-1)y' - P`` and ``t(t-1)z' - Q`` (the Hamiltonian
  system cleared of denominators), at every order fully determined by the
  retained coefficients, and
* the coefficients of the symmetry defect ``Y(g(t)) - h(Y(t))`` (and its z
  analogue), which pin the free coefficient that appears at resonant orders
  of pole branches.

The system is triangular order by order, so Gauss-Newton started from the
displayed leading terms converges in a handful of iterations.  ``refine``
replays the same equations with ``mpmath`` coefficients (simplified Newton,
double-precision Jacobian), which is how truncation behaviour below double
rounding is examined.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import (
    IndeterminateFrame,
    NonGenericParameters,
    OutOfTrustRadius,
    SingularConfiguration,
    SingularTau,
)
from .pvi_core import (
    OMEGA,
    PhaseState,
    PviParams,
    require_sigma1,
    require_sigma2sigma1,
    rhs_polynomials,
    vector_field,
)
from .series import Laurent

SIGMA1_BRANCHES = ("S2-1", "S2-2", "S2-3", "S2-4")
SIGMA2SIGMA1_BRANCHES = ("S3-1", "S3-2", "S3-3", "S3-4", "S3-5", "S3-6")
ALL_BRANCHES = SIGMA1_BRANCHES + SIGMA2SIGMA1_BRANCHES
# extra orders solved above the requested truncation, then dropped
HEADROOM = 4


@dataclass(frozen=True)
class LaurentSeriesPair:
    center: complex
    branch: str
    y_min_order: int
    y_coeffs: np.ndarray
    z_min_order: int
    z_coeffs: np.ndarray
    truncation: int
    params: Optional[PviParams] = None
    trust_radius: float = 0.225

    @property
    def y(self) -> Laurent:
        return Laurent(self.y_min_order, self.y_coeffs)

    @property
    def z(self) -> Laurent:
        return Laurent(self.z_min_order, self.z_coeffs)

    @property
    def kind(self) -> str:
        return "sigma1" if self.branch.startswith("S2") else "sigma2sigma1"

    def y_coeff(self, k: int):
        return self.y.coeff(k)

    def z_coeff(self, k: int):
        return self.z.coeff(k)


# ---------------------------------------------------------------------------
# branch data


@dataclass(frozen=True)
class _Branch:
    kind: str
    omega: complex  # primitive cube root used by the displayed formulas
    center: complex
    y_min: int
    z_min: int
    fixed: Callable[[PviParams], dict]  # (var, order) -> value, held fixed
    guess: Callable[[PviParams], dict] = field(default=lambda p: {})


def _w(branch: str) -> complex:
    return OMEGA if branch in ("S3-1", "S3-2", "S3-3") else OMEGA**2


def _sigma1_branches():
    half = 0.5
    return {
        "S2-1": _Branch(
            "sigma1", OMEGA, half, 0, 0,
            lambda p: {("y", 0): half, ("z", 0): 0},
            lambda p: {("y", 1): 1 - p.alpha0, ("z", 1): 4 * p.alpha2 * (p.alpha1 + p.alpha2)},
        ),
        "S2-2": _Branch(
            "sigma1", OMEGA, half, 0, -1,
            lambda p: {("y", 0): half, ("z", -1): 1},
            lambda p: {("y", 1): 1 + p.alpha0},
        ),
        "S2-3": _Branch(
            "sigma1", OMEGA, half, -1, 0,
            lambda p: {("y", -1): 1 / (4 * p.alpha1)},
            lambda p: {("y", 0): half, ("z", 1): -4 * p.alpha1 * p.alpha2},
        ),
        "S2-4": _Branch(
            "sigma1", OMEGA, half, -1, 0,
            lambda p: {("y", -1): -1 / (4 * p.alpha1)},
            lambda p: {("y", 0): half, ("z", 1): 4 * p.alpha1 * (p.alpha1 + p.alpha2)},
        ),
    }


def _sigma2sigma1_branch(name: str) -> _Branch:
    w = _w(name)
    c = -(w**2)
    kind = "sigma2sigma1"
    if name in ("S3-1", "S3-4"):
        return _Branch(
            kind, w, c, 0, 0,
            lambda p: {("y", 0): -w, ("z", 0): -(1 + 2 * w) * p.alpha2 / 3},
            lambda p: {("z", 1): -(p.alpha0 - 3 * p.alpha1 - 1) * p.alpha2 / 6},
        )
    if name in ("S3-2", "S3-5"):
        return _Branch(
            kind, w, c, 0, 0,
            lambda p: {("y", 0): -(w**2), ("z", 0): (1 + 2 * w) * p.alpha2 / 3},
            lambda p: {("y", 1): 1 - p.alpha0, ("z", 1): (p.alpha0 - 1) * p.alpha2 / 3},
        )
    return _Branch(
        kind, w, c, 0, -1,
        lambda p: {("y", 0): -(w**2), ("z", -1): 1},
        lambda p: {
            ("y", 1): 1 + p.alpha0,
            ("z", 0): (1 + 2 * w) * (p.alpha0 - p.alpha1 + 1) / 2,
        },
    )


def branch_spec(name: str) -> _Branch:
    if name in SIGMA1_BRANCHES:
        return _sigma1_branches()[name]
    if name in SIGMA2SIGMA1_BRANCHES:
        return _sigma2sigma1_branch(name)
    raise ValueError(f"unknown branch {name!r}")


def default_trust_radius(kind: str, center: complex) -> float:
    if kind == "sigma1":
        return 0.45 * min(abs(center), abs(center - 1))
    return 0.45 * min(abs(center), abs(center - 1), abs(center - _far_point(center)))


def _far_point(center: complex) -> complex:
    # the other fixed point of t -> 1/(1-t); its symmetric frame sends it to infinity
    return -(OMEGA**2) if abs(center + OMEGA) < 1e-9 else -OMEGA


# ---------------------------------------------------------------------------
# residual system


def _time_series(center, dtype):
    return Laurent(0, np.array([center, 1], dtype=dtype))


def system_residual_series(params: PviParams, center, y: Laurent, z: Laurent):
    """Laurent expansions of t(t-1)y' - P and t(t-1)z' - Q."""
    t = _time_series(center, y.c.dtype)
    tt = t * (t - 1)
    p, q = rhs_polynomials(params, y, z, t)
    return tt * y.deriv() - p, tt * z.deriv() - q


def _symmetry_map_series(kind: str, center, hi: int, dtype):
    """g(t) - center as a series in s for the symmetry's action on t."""
    if kind == "sigma1":
        return Laurent(1, np.array([-1], dtype=dtype))
    # 1/(1 - center - s) - center with 1/(1 - center) = center
    k = np.arange(1, hi + 2)
    coeffs = np.array([(1 - center) ** (-(j + 1)) for j in k], dtype=complex)
    if dtype == object:
        import mpmath

        c = mpmath.mpc(center)
        coeffs = np.array([(1 - c) ** (-(j + 1)) for j in k], dtype=object)
    return Laurent(1, coeffs)


def symmetry_defect_series(params: PviParams, kind: str, center, y: Laurent, z: Laurent, hi: int):
    """Series of Y(g(t)) - h(Y(t)) and the corresponding z defect."""
    g = _symmetry_map_series(kind, center, hi + 4, y.c.dtype)
    if kind == "sigma1":
        dy = y.compose(g, hi) + y - 1
        dz = z.compose(g, hi) + z
        return dy.truncate(hi), dz.truncate(hi)
    one_minus = 1 - y
    inv = one_minus.reciprocal(hi + 2, tol=0.0)
    dy = y.compose(g, hi) - inv
    dz = z.compose(g, hi) - (one_minus * one_minus * z - one_minus * params.alpha2)
    return dy.truncate(hi), dz.truncate(hi)


class _System:
    """Unknown-vector bookkeeping for one branch at truncation N."""

    def __init__(self, params: PviParams, spec: _Branch, N: int, name: str = "", headroom: int = HEADROOM):
        self.params = params
        self.spec = spec
        self.name = name
        self.keep = N
        self.N = N = N + headroom
        self.fixed = spec.fixed(params)
        self.unknowns = [
            (v, k)
            for v, lo in (("y", spec.y_min), ("z", spec.z_min))
            for k in range(lo, N + 1)
            if (v, k) not in self.fixed
        ]
        self.rows = None

    def assemble(self, u, dtype=complex, pad=None):
        N = self.N
        lo_y, lo_z = self.spec.y_min, self.spec.z_min
        top = N if pad is None else N + len(pad[0])
        ya = np.zeros(top - lo_y + 1, dtype=dtype)
        za = np.zeros(top - lo_z + 1, dtype=dtype)
        if dtype == object:
            ya[:] = 0
            za[:] = 0
        for (v, k), x in self.fixed.items():
            (ya if v == "y" else za)[k - (lo_y if v == "y" else lo_z)] = x
        for (v, k), x in zip(self.unknowns, u):
            (ya if v == "y" else za)[k - (lo_y if v == "y" else lo_z)] = x
        if pad is not None:
            ya[N + 1 - lo_y :] = pad[0]
            za[N + 1 - lo_z :] = pad[1]
        return Laurent(lo_y, ya), Laurent(lo_z, za)

    def _blocks(self, y, z):
        e1, e2 = system_residual_series(self.params, self.spec.center, y, z)
        d1, d2 = symmetry_defect_series(
            self.params, self.spec.kind, self.spec.center, y, z, self.N + 2
        )
        return [e1, e2, d1, d2]

    def _complete_rows(self, u):
        rng = np.random.default_rng(12345)
        base = self._blocks(*self.assemble(u))
        pad = (rng.normal(size=3) + 1j * rng.normal(size=3), rng.normal(size=3) + 1j * rng.normal(size=3))
        padded = self._blocks(*self.assemble(u, pad=pad))
        rows = []
        for i, (b, pb) in enumerate(zip(base, padded)):
            lo = min(b.val, pb.val)
            for m in range(lo, b.top + 1):
                if abs(b.coeff(m) - pb.coeff(m)) < 1e-13 * (1 + abs(b.coeff(m))):
                    rows.append((i, m))
                else:
                    break
        return rows

    def residual(self, u, dtype=complex):
        blocks = self._blocks(*self.assemble(u, dtype))
        return np.array([blocks[i].coeff(m) for i, m in self.rows], dtype=dtype)

    def find_active(self, u):
        """Unknowns that enter at least one retained row (structural test)."""
        f0 = self.residual(u)
        self.active = np.zeros(len(u), dtype=bool)
        for j in range(len(u)):
            up = u.copy()
            up[j] += 1.0
            self.active[j] = np.max(np.abs(self.residual(up) - f0)) > 1e-9
        return self.active

    def jacobian(self, u):
        f0 = self.residual(u)
        J = np.zeros((len(f0), len(u)), dtype=complex)
        for j in np.flatnonzero(self.active):
            h = 1e-6 * (1 + abs(u[j]))
            up, um = u.copy(), u.copy()
            up[j] += h
            um[j] -= h
            J[:, j] = (self.residual(up) - self.residual(um)) / (2 * h)
        return J


def _initial_vector(system: _System) -> np.ndarray:
    guess = system.spec.guess(system.params)
    return np.array([complex(guess.get(key, 0)) for key in system.unknowns])


def _solve(system: _System, max_iter: int = 60) -> np.ndarray:
    u = _initial_vector(system)
    system.rows = system._complete_rows(u)
    system.find_active(u)
    f = system.residual(u)
    P = None
    last = np.inf
    for _ in range(max_iter):
        if P is None:
            J = system.jacobian(u)
            _check_rank(system, J)
            P = _step_matrix(J)
        delta = P @ -f
        u = u + delta
        f_new = system.residual(u)
        # keep the Jacobian while the iteration contracts fast enough
        if np.max(np.abs(f_new)) > 0.1 * np.max(np.abs(f)):
            P = None
        f = f_new
        step = np.max(np.abs(delta)) / (1 + np.max(np.abs(u)))
        if step < 1e-15 or (step < 1e-12 and step >= last):
            break
        last = step
    if np.max(np.abs(f)) > 1e-8 * (1 + np.max(np.abs(u))) ** 2:
        raise NonGenericParameters(
            system.N, f"recursion inconsistent: residual {np.max(np.abs(f)):.3g}"
        )
    return u


def _equilibrate(J):
    """Row/column scaled copy of J restricted to columns that enter any row."""
    active = np.max(np.abs(J), axis=0) > 0
    Ja = J[:, active]
    rs = 1 / np.maximum(np.max(np.abs(Ja), axis=1), 1e-300)
    Jr = Ja * rs[:, None]
    cs = 1 / np.max(np.abs(Jr), axis=0)
    return Jr * cs[None, :], rs, cs, active


def _step_matrix(J):
    """Least-squares solution operator; inactive unknowns are left unchanged.

    Only columns are scaled: row scaling would amplify rounding noise in
    rows whose Jacobian entries are small.
    """
    active = np.max(np.abs(J), axis=0) > 0
    Ja = J[:, active]
    cs = 1 / np.max(np.abs(Ja), axis=0)
    P = np.zeros((J.shape[1], J.shape[0]), dtype=complex)
    P[active] = cs[:, None] * np.linalg.pinv(Ja * cs[None, :], rcond=1e-13)
    return P


def _check_rank(system: _System, J) -> None:
    """Raise if a coefficient of order <= N is left undetermined.

    Coefficients in the headroom above N may be free; they are discarded.
    """
    kept = np.array([k <= system.keep for _, k in system.unknowns])
    J, _, _, active = _equilibrate(J)
    if np.any(kept & ~active):
        k = min(k for (_, k), a, kp in zip(system.unknowns, active, kept) if kp and not a)
        raise NonGenericParameters(k, f"branch {system.name}: coefficient of order {k} undetermined")
    kept = kept[active]
    unknowns = [x for x, a in zip(system.unknowns, active) if a]
    _, sv, vh = np.linalg.svd(J)
    sv = np.concatenate([sv, np.zeros(J.shape[1] - len(sv))])
    for s_j, v in zip(sv, vh.conj()):
        if s_j < 1e-10 * sv[0] and np.max(np.abs(v[kept]), initial=0.0) > 1e-6:
            k = unknowns[int(np.argmax(np.abs(v) * kept))][1]
            raise NonGenericParameters(k, f"branch {system.name}: coefficient of order {k} undetermined")


def _build(params: PviParams, name: str, N: int) -> LaurentSeriesPair:
    spec = branch_spec(name)
    if N < 0:
        raise ValueError("truncation must be non-negative")
    system = _System(params, spec, N, name)
    u = _solve(system) if system.unknowns else np.array([], dtype=complex)
    y, z = system.assemble(u)
    y, z = y.truncate(N), z.truncate(N)
    return LaurentSeriesPair(
        center=spec.center,
        branch=name,
        y_min_order=y.val,
        y_coeffs=y.c,
        z_min_order=z.val,
        z_coeffs=z.c,
        truncation=N,
        params=params,
        trust_radius=default_trust_radius(spec.kind, spec.center),
    )


def sigma1_series(params: PviParams, branch: str = "S2-1", N: int = 12) -> LaurentSeriesPair:
    """Branch S2-1..S2-4 about t = 1/2 (requires alpha3 = alpha4)."""
    require_sigma1(params)
    if branch not in SIGMA1_BRANCHES:
        raise ValueError(f"{branch!r} is not a sigma1 branch")
    if branch in ("S2-3", "S2-4") and abs(params.alpha1) < 1e-12:
        raise NonGenericParameters(-1, f"{branch} needs alpha1 != 0")
    return _build(params, branch, N)


def sigma2sigma1_series(params: PviParams, branch: str = "S3-2", N: int = 12) -> LaurentSeriesPair:
    """Branch S3-1..S3-6 about t = -omega**2 (1..3) or t = -omega (4..6)."""
    require_sigma2sigma1(params)
    if branch not in SIGMA2SIGMA1_BRANCHES:
        raise ValueError(f"{branch!r} is not a sigma2 o sigma1 branch")
    return _build(params, branch, N)


def symmetric_series(params: PviParams, branch: str, N: int = 12) -> LaurentSeriesPair:
    if branch in SIGMA1_BRANCHES:
        return sigma1_series(params, branch, N)
    return sigma2sigma1_series(params, branch, N)


def refine(series: LaurentSeriesPair, dps: int = 50, iterations: int = 8) -> LaurentSeriesPair:
    """Replay the recursion with mpmath numbers at ``dps`` digits.

    Simplified Newton: the double-precision Jacobian is reused, each step
    gains about eight digits.
    """
    import mpmath

    params = series.params
    spec = branch_spec(series.branch)
    system = _System(params, spec, series.truncation, series.branch)
    u = _solve(system)
    pinv = _step_matrix(system.jacobian(u))
    with mpmath.workdps(dps):
        mp_params = _mp_params(params)
        mp_system = _System(mp_params, _mp_spec(spec, series.branch), series.truncation, series.branch)
        mp_system.rows = system.rows
        _exact_fixed(mp_system, series.branch, mp_params)
        um = np.array([mpmath.mpc(x) for x in u], dtype=object)
        for _ in range(iterations):
            f = mp_system.residual(um, dtype=object)
            fc = np.array([complex(x) for x in f])
            delta = pinv @ -fc
            # correction in double is enough: the residual itself is exact
            um = um + np.array([mpmath.mpc(d) for d in delta], dtype=object)
        y, z = mp_system.assemble(um, dtype=object)
        y, z = y.truncate(series.truncation), z.truncate(series.truncation)
    return LaurentSeriesPair(
        series.center, series.branch, y.val, y.c, z.val, z.c, series.truncation,
        params, series.trust_radius,
    )


class _MpParams:
    """Duck-typed parameter holder with mpmath entries."""

    def __init__(self, values):
        self.alpha0, self.alpha1, self.alpha2, self.alpha3, self.alpha4 = values

    def as_tuple(self):
        return (self.alpha0, self.alpha1, self.alpha2, self.alpha3, self.alpha4)


def _mp_params(params: PviParams):
    import mpmath

    a0, a1, _, a3, a4 = (mpmath.mpc(x) for x in params.as_tuple())
    # restore the affine relation exactly at working precision
    a2 = (1 - a0 - a1 - a3 - a4) / 2
    return _MpParams((a0, a1, a2, a3, a4))


def _mp_omega(w: complex):
    import mpmath

    k = 1 if abs(w - OMEGA) < 1e-9 else 2
    return mpmath.expjpi(mpmath.mpf(2 * k) / 3)


def _mp_spec(spec: _Branch, name: str) -> _Branch:
    import mpmath

    if spec.kind == "sigma1":
        return _Branch(spec.kind, spec.omega, mpmath.mpf(1) / 2, spec.y_min, spec.z_min, spec.fixed)
    w = _mp_omega(spec.omega)
    return _Branch(spec.kind, w, -(w**2), spec.y_min, spec.z_min, spec.fixed)


def _exact_fixed(system: _System, name: str, p) -> None:
    """Recompute the fixed seeds from mp parameters and mp omega."""
    import mpmath

    w = system.spec.omega
    half = mpmath.mpf(1) / 2
    table = {
        "S2-1": {("y", 0): half, ("z", 0): 0},
        "S2-2": {("y", 0): half, ("z", -1): 1},
        "S2-3": {("y", -1): 1 / (4 * p.alpha1)},
        "S2-4": {("y", -1): -1 / (4 * p.alpha1)},
    }
    if name in table:
        fixed = table[name]
    elif name in ("S3-1", "S3-4"):
        fixed = {("y", 0): -w, ("z", 0): -(1 + 2 * w) * p.alpha2 / 3}
    elif name in ("S3-2", "S3-5"):
        fixed = {("y", 0): -(w**2), ("z", 0): (1 + 2 * w) * p.alpha2 / 3}
    else:
        fixed = {("y", 0): -(w**2), ("z", -1): 1}
    system.fixed = {k: mpmath.mpc(v) for k, v in fixed.items()}


# ---------------------------------------------------------------------------
# evaluation and checks


def evaluate(series: LaurentSeriesPair, t: complex, trust_radius: Optional[float] = None) -> PhaseState:
    r = series.trust_radius if trust_radius is None else trust_radius
    s = complex(t) - complex(series.center)
    has_pole = series.y_min_order < 0 or series.z_min_order < 0
    if abs(s) >= r or (has_pole and s == 0):
        raise OutOfTrustRadius(f"|t - center| = {abs(s):.3g} outside (0, {r:.3g})")
    return PhaseState(complex(series.y(s)), complex(series.z(s)), t)


def _ring(center, radius, points=24):
    return [center + radius * cmath.exp(2j * math.pi * (k + 0.25) / points) for k in range(points)]


def symmetry_residual(series: LaurentSeriesPair, params: PviParams, radius: float = 0.05) -> float:
    """Max defect of the branch's functional equation on a circle about the center."""
    y, z = series.y, series.z
    c = complex(series.center)
    worst = 0.0
    for t in _ring(c, radius):
        s = t - c
        ys, zs = y(s), z(s)
        if series.kind == "sigma1":
            g = 1 - t
            dy = y(g - c) - (1 - ys)
            dz = z(g - c) + zs
        else:
            g = 1 / (1 - t)
            dy = y(g - c) - 1 / (1 - ys)
            dz = z(g - c) - (-(1 - ys) * (-zs * (1 - ys) + params.alpha2))
        worst = max(worst, abs(complex(dy)), abs(complex(dz)))
    return worst


def decay_exponent(f: Callable[[float], float], r1: float, r2: float) -> float:
    """log(f(r2)/f(r1)) / log(r2/r1)."""
    return math.log(f(r2) / f(r1)) / math.log(r2 / r1)


def system_residual(series: LaurentSeriesPair, radius: float, points: int = 24, dps: int = 50) -> float:
    """Max of |t(t-1)y' - P|, |t(t-1)z' - Q| over a circle about the center.

    Works on double or mpmath coefficient arrays (the latter evaluated at
    ``dps`` digits); the return value is a float.
    """
    if series.y_coeffs.dtype != object:
        e1, e2 = system_residual_series(series.params, series.center, series.y, series.z)
        nodes = [radius * cmath.exp(2j * math.pi * (k + 0.25) / points) for k in range(points)]
        return float(max(max(abs(e1(s)), abs(e2(s))) for s in nodes))
    import mpmath

    with mpmath.workdps(dps):
        center = _mp_spec(branch_spec(series.branch), series.branch).center
        e1, e2 = system_residual_series(_mp_params(series.params), center, series.y, series.z)
        nodes = [
            mpmath.mpf(radius) * mpmath.expjpi(2 * (mpmath.mpf(k) + 0.25) / points)
            for k in range(points)
        ]
        return float(max(max(abs(e1(s)), abs(e2(s))) for s in nodes))


def parity_defect(series: LaurentSeriesPair) -> float:
    """Largest relative coefficient outside the symmetry-allowed support.

    sigma1: lambda = y - 1/2 and mu = z in tau = t - 1/2 must be odd.
    sigma2 o sigma1: lambda(tau) only at orders 1 mod 3, mu(tau) at 2 mod 3.
    """
    lam, mu = frame_series(series)
    if series.kind == "sigma1":
        allowed_l = allowed_m = lambda k: k % 2 == 1
    else:
        allowed_l = lambda k: k % 3 == 1
        allowed_m = lambda k: k % 3 == 2
    worst = 0.0
    for ser, ok in ((lam, allowed_l), (mu, allowed_m)):
        scale = max(abs(x) for x in ser.c) or 1
        for k in range(ser.val, ser.top + 1):
            if not ok(k):
                worst = max(worst, float(abs(ser.coeff(k)) / scale))
    return worst


def frame_series(series: LaurentSeriesPair, dps: int = 50) -> tuple[Laurent, Laurent]:
    """(lambda(tau), mu(tau)) expansions of a branch in its symmetric frame.

    Only orders that do not depend on coefficients beyond the truncation
    are returned.  mpmath coefficient arrays are handled at ``dps`` digits.
    """
    if series.y_coeffs.dtype == object:
        import mpmath

        with mpmath.workdps(dps):
            return _stable_frame(series)
    return _stable_frame(series)


def _stable_frame(series):
    y, z = series.y, series.z
    base = _frame_raw(series, y, z)
    rng = np.random.default_rng(7)
    pad = [rng.normal(size=3) + 1j * rng.normal(size=3) for _ in range(2)]
    y2 = Laurent(y.val, np.concatenate([y.c, pad[0].astype(y.c.dtype)]))
    z2 = Laurent(z.val, np.concatenate([z.c, pad[1].astype(z.c.dtype)]))
    other = _frame_raw(series, y2, z2)
    out = []
    for a, b in zip(base, other):
        a = a.normalized(1e-9 * max(abs(x) for x in a.c))
        hi = a.val - 1
        while hi + 1 <= a.top and abs(a.coeff(hi + 1) - b.coeff(hi + 1)) <= 1e-12 * (1 + abs(a.coeff(hi + 1))):
            hi += 1
        out.append(a.truncate(hi))
    return out[0], out[1]


def _frame_raw(series: LaurentSeriesPair, y: Laurent, z: Laurent):
    N = y.top + 6
    if series.kind == "sigma1":
        return (y - 0.5), z
    dtype = y.c.dtype
    spec = branch_spec(series.branch)
    params = series.params
    if dtype == object:
        spec = _mp_spec(spec, series.branch)
        params = _mp_params(params)
    w, c = spec.omega, spec.center
    # t = m(tau) with m(u) = (-w u - 1)/(u + w); s = m(tau) - c
    tau = Laurent(1, np.array([1], dtype=dtype))
    s_of_tau = ((-w * tau - 1) * (tau + w).reciprocal(N + 3) - c).truncate(N + 3)
    s_of_tau = s_of_tau.normalized(1e-14)
    Y = y.compose(s_of_tau, N + 2)
    Z = z.compose(s_of_tau, N + 2)
    T = (s_of_tau + c).truncate(N + 2)
    lam = ((-w * Y - 1) * (Y + w).reciprocal(N + 2, tol=1e-12)).truncate(N)
    F = _mu_offset_series(params, w, Y, T, N)
    mu = ((Y + w) * (Y + w) * Z * (1 / (1 - w**2)) + F).truncate(N)
    return lam, mu


def _mu_offset_series(params, w, Y, T, N):
    a0, a1 = params.alpha0, params.alpha1
    hi = N + 2

    def inv(x):
        return x.reciprocal(hi, tol=1e-12)

    ypw2 = (Y + w) * (Y + w)
    # the y' term after substituting the y equation
    first = ypw2 * ((1 - a0) * inv(Y - T) - a1 * inv(Y - 1) - a1 * inv(Y)) * (1 / (2 * (1 - w**2)))
    rest = (
        (T + w) * (T + w) * inv(Y - T) * ((w - 1) * (a0 + 1) / 6)
        + inv(Y) * ((1 - w**2) * a1 / 6)
        + inv(Y - 1) * (w**2 * (1 - w**2) * a1 / 6)
        + Y * ((1 - w) * a1 / 6)
        + (T + w) * ((w - 1) * (1 + a0) / 6)
        + (w**2 - 1) * a1 / 6
    )
    return (first + rest).truncate(hi)


# ---------------------------------------------------------------------------
# symmetric frames


@dataclass(frozen=True)
class SymmetricFrame:
    kind: str
    tau: complex
    lam: complex
    mu: complex


def _moebius(u, w=OMEGA):
    return (-w * u - 1) / (u + w)


def mu_offset(params: PviParams, y: complex, t: complex, w: complex = OMEGA) -> complex:
    """F(y, t) in mu = (y + w)**2 z / (1 - w**2) + F(y, t)."""
    a0, a1 = params.alpha0, params.alpha1
    first = (y + w) ** 2 / (2 * (1 - w**2)) * ((1 - a0) / (y - t) - a1 / (y - 1) - a1 / y)
    rest = (
        (w - 1) * (t + w) ** 2 * (a0 + 1) / (6 * (y - t))
        + (1 - w**2) * a1 / (6 * y)
        + w**2 * (1 - w**2) * a1 / (6 * (y - 1))
        + (1 - w) * a1 * y / 6
        + ((w - 1) * (t + w) * (1 + a0) + (w**2 - 1) * a1) / 6
    )
    return first + rest


def to_symmetric_frame(kind: str, params: PviParams, s: PhaseState) -> SymmetricFrame:
    if kind == "sigma1":
        return SymmetricFrame(kind, s.t - 0.5, s.y - 0.5, s.z)
    if kind != "sigma2sigma1":
        raise ValueError(kind)
    w = OMEGA
    if s.t + w == 0 or s.y + w == 0 or s.y in (0, 1) or s.y == s.t:
        raise IndeterminateFrame(f"frame undefined at {s}")
    tau = _moebius(s.t, w)
    lam = _moebius(s.y, w)
    mu = (s.y + w) ** 2 * s.z / (1 - w**2) + mu_offset(params, s.y, s.t, w)
    return SymmetricFrame(kind, tau, lam, mu)


def from_symmetric_frame(kind: str, params: PviParams, f: SymmetricFrame) -> PhaseState:
    if kind == "sigma1":
        return PhaseState(f.lam + 0.5, f.mu, f.tau + 0.5)
    w = OMEGA
    if f.tau + w == 0 or f.lam + w == 0:
        raise IndeterminateFrame(f"frame inverse undefined at {f}")
    t = _moebius(f.tau, w)
    y = _moebius(f.lam, w)
    if y + w == 0 or y in (0, 1) or y == t:
        raise IndeterminateFrame(f"frame inverse undefined at {f}")
    z = (f.mu - mu_offset(params, y, t, w)) * (1 - w**2) / (y + w) ** 2
    return PhaseState(y, z, t)


def k_hamiltonian(kind: str, params: PviParams, f: SymmetricFrame) -> complex:
    a0, a1, a2, a3, _ = params.as_tuple()
    tau, lam, mu = f.tau, f.lam, f.mu
    if kind == "sigma1":
        d = tau * tau - 0.25
        if d == 0:
            raise SingularTau("tau**2 = 1/4")
        body = (
            mu * mu * (lam - tau) * (lam * lam - 0.25)
            - mu * ((lam * lam - 0.25) * (a0 - 1) + 2 * lam * (lam - tau) * a3)
            + (lam - tau) * a2 * (a1 + a2)
        )
        return body / d
    d = tau**3 + 1
    if d == 0:
        raise SingularTau("tau**3 = -1")
    body = (
        mu * mu * (lam**3 + 1) * (lam - tau)
        + mu * ((lam**3 + 1) * (1 + a0) + 3 * lam * lam * (lam - tau) * a1)
        + (1 + a0 + 3 * a1) / 4 * lam * ((lam + tau) * (1 + a0) + 3 * (lam - tau) * a1)
    )
    return body / d


def frame_vector_field(kind: str, params: PviParams, f: SymmetricFrame) -> tuple[complex, complex]:
    """Right sides of the frame Hamiltonian system, written out explicitly."""
    a0, a1, a2, a3, _ = params.as_tuple()
    tau, lam, mu = f.tau, f.lam, f.mu
    if kind == "sigma1":
        d = tau * tau - 0.25
        dl = 2 * (lam * lam - 0.25) * mu * (lam - tau) - (lam * lam - 0.25) * (a0 - 1) - 2 * lam * (lam - tau) * a3
        dm = (
            -((lam * lam - 0.25) + 2 * lam * (lam - tau)) * mu * mu
            + 2 * (lam * (a0 - 1) + (2 * lam - tau) * a3) * mu
            - a2 * (a1 + a2)
        )
        return dl / d, dm / d
    d = tau**3 + 1
    dl = 2 * (1 + lam**3) * mu * (lam - tau) + 3 * lam * lam * (lam - tau) * a1 + (1 + lam**3) * (1 + a0)
    dm = (
        mu * mu * (-4 * lam**3 + 3 * lam * lam * tau - 1)
        - 3 * lam * mu * (lam * (1 + a0) + (3 * lam - 2 * tau) * a1)
        - lam * (a2 - 1) ** 2
        + (a2 - 1) / 2 * ((lam + tau) * (1 + a0) + 3 * (lam - tau) * a1)
    )
    return dl / d, dm / d


def lambda_ode_residual(params: PviParams, tau: complex, lambda_jet) -> complex:
    """Defect of the second-order equation for lambda(tau) (sigma2 o sigma1 frame)."""
    lam, lp, lpp = lambda_jet
    a0, a1 = params.alpha0, params.alpha1
    if lam**3 == -1 or tau**3 == -1 or lam == tau:
        raise SingularConfiguration("lambda**3 = -1, tau**3 = -1 or lambda = tau")
    lhs = (lam - tau) * lpp
    rhs = (
        (4 * lam**3 - 3 * tau * lam * lam + 1) / (2 * (lam**3 + 1)) * lp * lp
        + (-3 * tau * tau * lam + 2 * tau**3 - 1) / (tau**3 + 1) * lp
        + (
            (lam**3 + 1) ** 2 * (tau**3 + 1) * (1 - a0 * a0)
            + 9 * (lam - tau) ** 2 * (lam**4 - 2 * tau * lam**3 - 2 * lam + tau) * a1 * a1
        )
        / (2 * (lam**3 + 1) * (tau**3 + 1) ** 2)
    )
    return lhs - rhs


# ---------------------------------------------------------------------------
# Backlund interchange of branches

# (generator, source) -> target; every generator fixing the stratum permutes
# the branches about the same center
INTERCHANGE = {
    "sigma1": {
        "s0": {"S2-1": "S2-2", "S2-2": "S2-1", "S2-3": "S2-3", "S2-4": "S2-4"},
        "s1": {"S2-1": "S2-1", "S2-2": "S2-2", "S2-3": "S2-4", "S2-4": "S2-3"},
        "s2": {"S2-1": "S2-3", "S2-2": "S2-2", "S2-3": "S2-1", "S2-4": "S2-4"},
        "pi2": {"S2-1": "S2-3", "S2-2": "S2-4", "S2-3": "S2-1", "S2-4": "S2-2"},
    },
    "sigma2sigma1": {
        "s0": {"S3-1": "S3-1", "S3-2": "S3-3", "S3-3": "S3-2",
               "S3-4": "S3-4", "S3-5": "S3-6", "S3-6": "S3-5"},
        "s2": {"S3-1": "S3-2", "S3-2": "S3-1", "S3-3": "S3-3",
               "S3-4": "S3-5", "S3-5": "S3-4", "S3-6": "S3-6"},
    },
}


def transformed_series(g: str, params: PviParams, branch: str, N: int = 14, hi: int = 8):
    """Image under generator ``g`` of ``branch`` built at ``g(params)``.

    ``g`` is an involution, so the image lives on the stratum of ``params``
    and is to be compared with a branch built there.  Returns Laurent
    series (y, z, t) in ``s = t - center`` up to order ``hi``.
    """
    from .backlund import apply_to_params, apply_to_series

    pre = apply_to_params(g, params)
    ser = symmetric_series(pre, branch, N)
    t = Laurent(0, np.array([ser.center, 1], dtype=complex))
    return apply_to_series(g, pre, ser.y, ser.z, t, hi)


def interchange_defect(
    g: str, params: PviParams, branch: str, orders: range = range(-1, 7), N: int = 14
) -> tuple[str, float]:
    """(expected target, max coefficient mismatch over ``orders``) for one arrow."""
    kind = "sigma1" if branch in SIGMA1_BRANCHES else "sigma2sigma1"
    target = INTERCHANGE[kind][g][branch]
    y, z, t = transformed_series(g, params, branch, N, hi=orders.stop)
    ref = symmetric_series(params, target, N)
    d = abs(t.coeff(0) - ref.center) + abs(t.coeff(1) - 1)
    for k in orders:
        d = max(d, abs(y.coeff(k) - ref.y_coeff(k)), abs(z.coeff(k) - ref.z_coeff(k)))
    return target, float(d)
