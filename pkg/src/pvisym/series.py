"""Finite Laurent polynomials and truncated series arithmetic.

A :class:`Laurent` stores ``sum(c[i] * s**(val + i))``.  Arithmetic is exact
on the stored terms; operations that produce infinite expansions
(``reciprocal``, ``compose``) take an explicit highest order.  Coefficient
arrays may be ``complex`` or ``object`` (e.g. ``mpmath.mpc``) so the same
recursion can be replayed in extended precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _zero_like(c: np.ndarray):
    return c.dtype.type(0) if c.dtype != object else 0 * c[0] if len(c) else 0


@dataclass(frozen=True)
class Laurent:
    val: int
    c: np.ndarray

    @classmethod
    def const(cls, x, dtype=complex) -> "Laurent":
        return cls(0, np.array([x], dtype=dtype))

    @classmethod
    def monomial(cls, x, order: int, dtype=complex) -> "Laurent":
        return cls(order, np.array([x], dtype=dtype))

    @property
    def top(self) -> int:
        return self.val + len(self.c) - 1

    def coeff(self, k: int):
        i = k - self.val
        if 0 <= i < len(self.c):
            return self.c[i]
        return _zero_like(self.c)

    def coeffs(self, lo: int, hi: int) -> np.ndarray:
        """Coefficients of orders lo..hi inclusive (zeros outside storage)."""
        out = np.zeros(hi - lo + 1, dtype=self.c.dtype)
        if self.c.dtype == object:
            out[:] = _zero_like(self.c)
        a, b = max(lo, self.val), min(hi, self.top)
        if a <= b:
            out[a - lo : b - lo + 1] = self.c[a - self.val : b - self.val + 1]
        return out

    def _align(self, other: "Laurent"):
        lo = min(self.val, other.val)
        hi = max(self.top, other.top)
        return lo, self.coeffs(lo, hi), other.coeffs(lo, hi)

    def __add__(self, other):
        if not isinstance(other, Laurent):
            other = Laurent.const(other, self.c.dtype)
        lo, a, b = self._align(other)
        return Laurent(lo, a + b)

    __radd__ = __add__

    def __neg__(self):
        return Laurent(self.val, -self.c)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Laurent) else -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Laurent):
            return Laurent(self.val + other.val, np.convolve(self.c, other.c))
        return Laurent(self.val, self.c * other)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = Laurent.const(1, self.c.dtype)
        for _ in range(n):
            out = out * self
        return out

    def deriv(self) -> "Laurent":
        orders = np.arange(self.val, self.top + 1)
        return Laurent(self.val - 1, self.c * orders)

    def truncate(self, hi: int) -> "Laurent":
        if hi < self.val:
            return Laurent(self.val, self.c[:1] * 0)
        return Laurent(self.val, self.c[: hi - self.val + 1])

    def shift(self, k: int) -> "Laurent":
        """Multiply by s**k."""
        return Laurent(self.val + k, self.c)

    def __call__(self, s):
        acc = _zero_like(self.c) * s
        for x in self.c[::-1]:
            acc = acc * s + x
        return acc * s**self.val

    def valuation(self, tol: float = 0.0) -> int:
        """Lowest order whose coefficient exceeds ``tol`` in modulus."""
        for i, x in enumerate(self.c):
            if abs(x) > tol:
                return self.val + i
        raise ZeroDivisionError("series is zero to tolerance")

    def normalized(self, tol: float = 0.0) -> "Laurent":
        v = self.valuation(tol)
        return Laurent(v, self.c[v - self.val :])

    def reciprocal(self, hi: int, tol: float = 0.0) -> "Laurent":
        """1/self with orders up to ``hi``; leading term taken above ``tol``."""
        a = self.normalized(tol)
        n = hi + a.val + 1
        if n <= 0:
            return Laurent(-a.val, a.c[:1] * 0)
        src = a.coeffs(a.val, a.val + n - 1)
        d = np.zeros(n, dtype=src.dtype)
        if src.dtype == object:
            d[:] = _zero_like(src)
        d[0] = 1 / src[0]
        for k in range(1, n):
            acc = src[1 : k + 1] @ d[k - 1 :: -1][:k]
            d[k] = -acc / src[0]
        return Laurent(-a.val, d)

    def compose(self, inner: "Laurent", hi: int) -> "Laurent":
        """self(inner(s)) up to order ``hi``; ``inner`` must have valuation 1."""
        if inner.valuation() != 1:
            raise ValueError("inner series must vanish to first order exactly")
        dtype = self.c.dtype
        pad = max(0, -self.val)
        inner = inner.truncate(hi + pad + 1)
        inv = inner.reciprocal(hi + pad + 1)
        out = Laurent.const(0, dtype) * 0
        p = Laurent.const(1, dtype)
        for k in range(0, self.top + 1):
            if k > 0:
                p = (p * inner).truncate(hi + pad)
            if k >= self.val:
                out = out + p * self.coeff(k)
        p = Laurent.const(1, dtype)
        for k in range(-1, self.val - 1, -1):
            p = (p * inv).truncate(hi + pad)
            out = out + p * self.coeff(k)
        return out.truncate(hi)
