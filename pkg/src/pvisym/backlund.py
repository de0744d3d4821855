"""Backlund transformations of the Painleve VI Hamiltonian system.

The ten generators are stored as data: an integer matrix acting on
``(alpha0, ..., alpha4)`` and, for each of y, z, t, a numerator/denominator
pair of polynomial maps.  Keeping numerator and denominator apart lets the
same rows act on finite points (with a named error when a denominator
vanishes) and on truncated Laurent series.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import IndeterminateAction
from .pvi_core import (
    DEFAULT_TOL,
    ComplexPath,
    PhaseState,
    PviParams,
    integrate,
)
from .series import Laurent
from .specfun import ToleranceConfig

GENERATORS = ("s0", "s1", "s2", "s3", "s4", "pi1", "pi2", "sigma1", "sigma2", "sigma3")
_TOKEN_ALIASES = {"sig1": "sigma1", "sig2": "sigma2", "sig3": "sigma3"}

Poly = Callable  # (a, y, z, t) -> value; uses only +, -, *


@dataclass(frozen=True)
class Row:
    """One generator: parameter matrix and rational phase map."""

    name: str
    matrix: tuple[tuple[int, ...], ...]
    y: tuple[Poly, Poly]
    z: tuple[Poly, Poly]
    t: tuple[Poly, Poly]
    denominators: tuple[tuple[str, Poly], ...]


def _one(a, y, z, t):
    return 1


def _y(a, y, z, t):
    return y


def _z(a, y, z, t):
    return z


def _t(a, y, z, t):
    return t


_ID = ((1, 0, 0, 0, 0), (0, 1, 0, 0, 0), (0, 0, 1, 0, 0), (0, 0, 0, 1, 0), (0, 0, 0, 0, 1))


def _perm(*order):
    """Matrix sending alpha to (alpha[order[0]], ..., alpha[order[4]])."""
    return tuple(tuple(int(j == k) for j in range(5)) for k in order)


def _reflect(i, extra):
    """Reflection alpha_i -> -alpha_i, alpha_j -> alpha_j + alpha_i for j in extra."""
    rows = [list(r) for r in _ID]
    rows[i][i] = -1
    for j in extra:
        rows[j][i] = 1
    return tuple(tuple(r) for r in rows)


TABLE: dict[str, Row] = {
    "s0": Row(
        "s0", _reflect(0, [2]),
        (_y, _one),
        (lambda a, y, z, t: z * (y - t) - a[0], lambda a, y, z, t: y - t),
        (_t, _one),
        (("y - t", lambda a, y, z, t: y - t),),
    ),
    "s1": Row("s1", _reflect(1, [2]), (_y, _one), (_z, _one), (_t, _one), ()),
    "s2": Row(
        "s2", _reflect(2, [0, 1, 3, 4]),
        (lambda a, y, z, t: y * z + a[2], _z),
        (_z, _one),
        (_t, _one),
        (("z", _z),),
    ),
    "s3": Row(
        "s3", _reflect(3, [2]),
        (_y, _one),
        (lambda a, y, z, t: z * (y - 1) - a[3], lambda a, y, z, t: y - 1),
        (_t, _one),
        (("y - 1", lambda a, y, z, t: y - 1),),
    ),
    "s4": Row(
        "s4", _reflect(4, [2]),
        (_y, _one),
        (lambda a, y, z, t: z * y - a[4], _y),
        (_t, _one),
        (("y", _y),),
    ),
    "pi1": Row(
        "pi1", _perm(3, 4, 2, 0, 1),
        (_t, _y),
        (lambda a, y, z, t: -y * (y * z + a[2]), _t),
        (_t, _one),
        (("y", _y), ("t", _t)),
    ),
    "pi2": Row(
        "pi2", _perm(1, 0, 2, 4, 3),
        (lambda a, y, z, t: t * (y - 1), lambda a, y, z, t: y - t),
        (
            lambda a, y, z, t: -((y - t) * (y - t) * z + (y - t) * a[2]),
            lambda a, y, z, t: (t - 1) * t,
        ),
        (_t, _one),
        (("y - t", lambda a, y, z, t: y - t), ("t(t - 1)", lambda a, y, z, t: (t - 1) * t)),
    ),
    "sigma1": Row(
        "sigma1", _perm(0, 1, 2, 4, 3),
        (lambda a, y, z, t: 1 - y, _one),
        (lambda a, y, z, t: -z, _one),
        (lambda a, y, z, t: 1 - t, _one),
        (),
    ),
    "sigma2": Row(
        "sigma2", _perm(0, 4, 2, 3, 1),
        (_one, _y),
        (lambda a, y, z, t: -y * (y * z + a[2]), _one),
        (_one, _t),
        (("y", _y), ("t", _t)),
    ),
    "sigma3": Row(
        "sigma3", _perm(4, 1, 2, 3, 0),
        (lambda a, y, z, t: t - y, lambda a, y, z, t: t - 1),
        (lambda a, y, z, t: (1 - t) * z, _one),
        (_t, lambda a, y, z, t: t - 1),
        (("t - 1", lambda a, y, z, t: t - 1),),
    ),
}


def parse_word(text: str) -> list[str]:
    """Whitespace-separated generator tokens (s0..s4, pi1, pi2, sig1..sig3)."""
    out = []
    for tok in text.split():
        name = _TOKEN_ALIASES.get(tok, tok)
        if name not in TABLE:
            raise ValueError(f"unknown generator token {tok!r}")
        out.append(name)
    return out


def apply_to_params(g: str, params: PviParams) -> PviParams:
    M = np.array(TABLE[g].matrix)
    return PviParams(*(M @ np.array(params.as_tuple())))


def apply_generator(g: str, params: PviParams, s: PhaseState) -> tuple[PviParams, PhaseState]:
    """Image of (params, state) under one table row."""
    if g not in TABLE:
        raise ValueError(f"unknown generator {g!r}")
    row = TABLE[g]
    a = params.as_tuple()
    for label, den in row.denominators:
        if den(a, s.y, s.z, s.t) == 0:
            raise IndeterminateAction(f"{g}: denominator {label} vanishes at {s}")
    vals = [num(a, s.y, s.z, s.t) / den(a, s.y, s.z, s.t) for num, den in (row.y, row.z, row.t)]
    return apply_to_params(g, params), PhaseState(*vals)


def apply_word(word: Sequence[str], params: PviParams, s: PhaseState) -> tuple[PviParams, PhaseState]:
    """Apply the letters of ``word`` one after another, left to right."""
    for i, g in enumerate(word):
        try:
            params, s = apply_generator(g, params, s)
        except IndeterminateAction as exc:
            raise IndeterminateAction(f"letter {i} ({g}): {exc}") from exc
    return params, s


def _ratio(n, d, hi: int):
    if isinstance(d, Laurent):
        if not isinstance(n, Laurent):
            n = Laurent.const(n, d.c.dtype)
        return (n * d.reciprocal(hi - n.val, tol=1e-12)).truncate(hi)
    return n * (1 / d)


def apply_to_series(g: str, params, y: Laurent, z: Laurent, t: Laurent, hi: int):
    """Image of Laurent series (y, z, t) under a row, to order ``hi``.

    ``t`` is the Laurent series of the time variable itself.  Denominators
    are inverted as Laurent series, so poles are created or cancelled as
    the map dictates.
    """
    row = TABLE[g]
    a = params.as_tuple()
    return tuple(_ratio(num(a, y, z, t), den(a, y, z, t), hi) for num, den in (row.y, row.z, row.t))


def pushforward_check(
    g: str,
    params: PviParams,
    s: PhaseState,
    h: complex = 1e-3,
    tol: ToleranceConfig = DEFAULT_TOL,
) -> float:
    """Mismatch between 'flow then transform' and 'transform then flow'.

    The state is continued from t to t + h, both ends are mapped by ``g``,
    and the transformed system is integrated between the mapped times.
    """
    end = integrate(params, s, ComplexPath((s.t, s.t + h), min_clearance=1e-6), tol)[-1]
    p2, start_img = apply_generator(g, params, s)
    _, end_img = apply_generator(g, params, end)
    if start_img.t == end_img.t:
        flowed = start_img
    else:
        flowed = integrate(
            p2, start_img, ComplexPath((start_img.t, end_img.t), min_clearance=1e-6), tol
        )[-1]
    return max(abs(flowed.y - end_img.y), abs(flowed.z - end_img.z))
