"""Complex Gamma and Gauss hypergeometric functions in double precision.

``gamma`` uses the Lanczos approximation (g = 7, nine coefficients) with the
reflection formula for ``Re z < 1/2``.  ``hyp2f1`` sums the defining series
after mapping the argument, via the Pfaff or one of the standard connection
formulas, to the point of smallest modulus.  Arguments that no
transformation brings inside ``|w| <= 0.9`` (a neighbourhood of
``exp(+-i pi/3)``) are reached by integrating the hypergeometric equation
from a nearby point on the same ray.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateParameters, NonConvergence, PoleError

__all__ = [
    "ToleranceConfig",
    "SERIES_TOL",
    "gamma",
    "rgamma",
    "hyp2f1",
    "hyp2f1_derivative",
    "hyp2f1_series",
]


@dataclass(frozen=True)
class ToleranceConfig:
    """Relative/absolute tolerances and a term (or step) budget."""

    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_terms: int = 5000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("rel_tol and abs_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")


SERIES_TOL = ToleranceConfig(rel_tol=1e-16, abs_tol=1e-300, max_terms=5000)

_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2 * math.pi)
_POLE_TOL = 1e-12
_INT_TOL = 1e-9


def _near_nonpositive_integer(z: complex, tol: float) -> bool:
    n = round(z.real)
    return n <= 0 and abs(z - n) < tol


def _lanczos(z: complex) -> complex:
    # valid for Re z >= 1/2
    z -= 1
    x = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        x += _LANCZOS[i] / (z + i)
    t = z + _G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * x


def gamma(z: complex) -> complex:
    """Gamma function for complex ``z``; raises PoleError near 0, -1, -2, ..."""
    z = complex(z)
    if _near_nonpositive_integer(z, _POLE_TOL):
        raise PoleError(f"Gamma has a pole at {round(z.real)}")
    if z.real < 0.5:
        return math.pi / (cmath.sin(math.pi * z) * _lanczos(1 - z))
    return _lanczos(z)


def rgamma(z: complex) -> complex:
    """1/Gamma(z), which is entire; exactly zero at the poles of Gamma."""
    z = complex(z)
    if _near_nonpositive_integer(z, _POLE_TOL):
        return 0j
    if z.real < 0.5:
        return cmath.sin(math.pi * z) * _lanczos(1 - z) / math.pi
    return 1 / _lanczos(z)


def _near_integer(x: complex, tol: float = _INT_TOL) -> bool:
    return abs(x - round(x.real)) < tol


def hyp2f1_series(a, b, c, z, tol: ToleranceConfig = SERIES_TOL) -> complex:
    """Direct Gauss series; intended for ``|z| < 1``."""
    if _near_nonpositive_integer(complex(c), _POLE_TOL):
        raise DegenerateParameters(f"c = {c} is a non-positive integer")
    term = 1 + 0j
    total = 1 + 0j
    small = 0
    for n in range(tol.max_terms):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z
        total += term
        if term == 0:
            return total
        if abs(term) <= max(tol.abs_tol, tol.rel_tol * abs(total)):
            small += 1
            if small >= 2:
                return total
        else:
            small = 0
    raise NonConvergence(
        f"2F1({a}, {b}; {c}; {z}) series did not converge in {tol.max_terms} terms"
    )


def _candidates(z: complex):
    """(modulus, name) for every standard transformation of the argument."""
    out = [(abs(z), "direct")]
    if z != 1:
        out.append((abs(z / (z - 1)), "pfaff"))
        out.append((abs(1 / (1 - z)), "inv_one_minus"))
    out.append((abs(1 - z), "one_minus"))
    if z != 0:
        out.append((abs(1 / z), "inverse"))
        out.append((abs(1 - 1 / z), "one_minus_inverse"))
    out.sort(key=lambda p: p[0])
    return out


def _needs(name, a, b, c):
    """Return the integer-difference that makes ``name`` unusable, if any."""
    if name in ("one_minus", "one_minus_inverse") and _near_integer(c - a - b):
        return "c - a - b"
    if name in ("inverse", "inv_one_minus") and _near_integer(a - b):
        return "a - b"
    return None


def _apply(name, a, b, c, z, tol):
    F = lambda aa, bb, cc, w: hyp2f1_series(aa, bb, cc, w, tol)
    if name == "direct":
        return F(a, b, c, z)
    if name == "pfaff":
        return (1 - z) ** (-a) * F(a, c - b, c, z / (z - 1))
    gc = gamma(c)
    if name == "one_minus":
        w = 1 - z
        t1 = gc * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)
        t2 = gc * gamma(a + b - c) * rgamma(a) * rgamma(b)
        s1 = F(a, b, a + b - c + 1, w) if t1 != 0 else 0
        s2 = F(c - a, c - b, c - a - b + 1, w) if t2 != 0 else 0
        return t1 * s1 + t2 * w ** (c - a - b) * s2
    if name == "inverse":
        w = 1 / z
        t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a)
        t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b)
        s1 = F(a, a - c + 1, a - b + 1, w) if t1 != 0 else 0
        s2 = F(b, b - c + 1, b - a + 1, w) if t2 != 0 else 0
        return t1 * (-z) ** (-a) * s1 + t2 * (-z) ** (-b) * s2
    if name == "inv_one_minus":
        w = 1 / (1 - z)
        t1 = gc * gamma(b - a) * rgamma(b) * rgamma(c - a)
        t2 = gc * gamma(a - b) * rgamma(a) * rgamma(c - b)
        s1 = F(a, c - b, a - b + 1, w) if t1 != 0 else 0
        s2 = F(b, c - a, b - a + 1, w) if t2 != 0 else 0
        return t1 * (1 - z) ** (-a) * s1 + t2 * (1 - z) ** (-b) * s2
    if name == "one_minus_inverse":
        w = 1 - 1 / z
        t1 = gc * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b)
        t2 = gc * gamma(a + b - c) * rgamma(a) * rgamma(b)
        s1 = F(a, a - c + 1, a + b - c + 1, w) if t1 != 0 else 0
        s2 = F(c - a, 1 - a, c - a - b + 1, w) if t2 != 0 else 0
        return t1 * z ** (-a) * s1 + t2 * (1 - z) ** (c - a - b) * z ** (a - c) * s2
    raise ValueError(name)


def _by_continuation(a, b, c, z, tol):
    """Integrate the hypergeometric equation radially from |z0| = 1/2."""
    from .integrator import integrate_segment

    z0 = 0.5 * z / abs(z)
    u0 = np.array([hyp2f1(a, b, c, z0, tol), hyp2f1_derivative(a, b, c, z0, tol)])

    def rhs(x, u):
        return np.array(
            [u[1], ((a + b + 1) * x - c) * u[1] / (x * (1 - x)) + a * b * u[0] / (x * (1 - x))]
        )

    u = integrate_segment(rhs, z0, z, u0, rtol=1e-14, atol=1e-300)
    return u[0]


def hyp2f1(a, b, c, z, tol: ToleranceConfig = SERIES_TOL, side: int = 1) -> complex:
    """Principal branch of 2F1(a, b; c; z).

    On the cut ``z > 1`` the value is the limit from ``Im z > 0`` by default
    (``side=-1`` selects the lower edge).
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _near_nonpositive_integer(c, _POLE_TOL):
        raise DegenerateParameters(f"c = {c} is a non-positive integer")
    if z == 0:
        return 1 + 0j
    if z.imag == 0 and z.real > 1:
        z = complex(z.real, math.copysign(1e-300, side))
    blocked = []
    for modulus, name in _candidates(z):
        if modulus > 0.9:
            break
        why = _needs(name, a, b, c)
        if why is not None:
            blocked.append(why)
            continue
        return _apply(name, a, b, c, z, tol)
    if blocked:
        raise DegenerateParameters(
            f"{' and '.join(sorted(set(blocked)))} within {_INT_TOL} of an integer; "
            f"no logarithmic continuation for z = {z}"
        )
    return _by_continuation(a, b, c, z, tol)


def hyp2f1_derivative(a, b, c, z, tol: ToleranceConfig = SERIES_TOL, side: int = 1) -> complex:
    """d/dz 2F1(a, b; c; z) = (ab/c) 2F1(a+1, b+1; c+1; z)."""
    a, b, c = complex(a), complex(b), complex(c)
    if _near_nonpositive_integer(c, _POLE_TOL):
        raise DegenerateParameters(f"c = {c} is a non-positive integer")
    if a * b == 0:
        return 0j
    return a * b / c * hyp2f1(a + 1, b + 1, c + 1, z, tol, side)
