"""Polynomials in the summation index and related scalar helpers.

Polynomials here are small (degree at most ``max(p, q) + 2``) and are stored
densely in the monomial basis of the index ``n``.  Coefficients may be any
numeric type closed under ``+ - * /``: Python ``complex``/``float``,
``fractions.Fraction`` (exact tests) or ``mpmath.mpc`` (extended precision).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Sequence

import mpmath

__all__ = [
    "EXTENDED_PREC",
    "Poly",
    "delta",
    "delta_power_at",
    "eps_for",
    "gen_binom",
    "gen_binom_inv",
    "poch",
    "poly_eval",
    "to_scalar",
]

#: Working precision (bits) of the extended tier.  113 bits is IEEE quad.
EXTENDED_PREC = 113

DOUBLE_EPS = 2.0**-52


def eps_for(prec: int | None):
    """Machine epsilon of the double tier (``prec=None``) or of ``prec`` bits."""
    if prec is None:
        return DOUBLE_EPS
    return mpmath.mpf(2) ** (1 - prec)


def to_scalar(x, prec: int | None = None):
    """Convert ``x`` to the complex scalar type of the requested tier.

    ``prec=None`` gives a Python ``complex``; an integer gives an
    ``mpmath.mpc`` (the caller is responsible for the active working
    precision).  Fractions are converted exactly in the extended tier.
    """
    if prec is None:
        if isinstance(x, Fraction):
            return complex(float(x))
        return complex(x)
    if isinstance(x, Fraction):
        return mpmath.mpc(mpmath.mpf(x.numerator) / x.denominator)
    if isinstance(x, mpmath.mpc):
        return x
    return mpmath.mpc(mpmath.mpmathify(x))


def poch(x, m: int):
    """Rising factorial ``(x)_m = x (x+1) ... (x+m-1)``; ``(x)_0 = 1``."""
    if m < 0:
        raise ValueError("poch requires m >= 0")
    result = x * 0 + 1
    for i in range(m):
        result = result * (x + i)
    return result


def _is_zero(c) -> bool:
    return c == 0


@dataclass(frozen=True)
class Poly:
    """Dense polynomial in ``n``; ``coeffs[i]`` multiplies ``n**i``."""

    coeffs: tuple

    def __post_init__(self):
        cs = list(self.coeffs)
        while cs and _is_zero(cs[-1]):
            cs.pop()
        object.__setattr__(self, "coeffs", tuple(cs))

    @classmethod
    def const(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def linear(cls, c0, c1=1) -> "Poly":
        """``c0 + c1 n``; ``Poly.linear(a)`` is the factor ``n + a``."""
        return cls((c0, c1))

    @classmethod
    def from_roots(cls, shifts: Sequence, lead=1) -> "Poly":
        """``lead * prod(n + s for s in shifts)``."""
        p = cls.const(lead)
        for s in shifts:
            p = p * cls.linear(s)
        return p

    @property
    def degree(self) -> int:
        """Degree; the zero polynomial reports ``-1``."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, n):
        return poly_eval(self, n)

    def __add__(self, other: "Poly") -> "Poly":
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        return Poly(tuple(a[i] + (b[i] if i < len(b) else 0) for i in range(len(a))))

    def __neg__(self) -> "Poly":
        return Poly(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return Poly(tuple(c * other for c in self.coeffs))
        if self.is_zero() or other.is_zero():
            return Poly(())
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return Poly(tuple(out))

    __rmul__ = __mul__

    def shift(self, c) -> "Poly":
        """Return ``n -> p(n + c)``."""
        out = Poly(())
        for a in reversed(self.coeffs):
            out = out * Poly.linear(c) + Poly.const(a)
        return out

    def map(self, fn) -> "Poly":
        """Apply ``fn`` to every coefficient (e.g. a precision conversion)."""
        return Poly(tuple(fn(c) for c in self.coeffs))

    def divide_linear(self, c):
        """Synthetic division by ``n + c``; returns ``(quotient, remainder)``."""
        if self.degree < 1:
            return Poly(()), (self.coeffs[0] if self.coeffs else 0)
        cs = self.coeffs
        deg = len(cs) - 1
        quot = [0] * deg
        carry = cs[deg]
        for i in range(deg - 1, -1, -1):
            quot[i] = carry
            carry = cs[i] - c * carry
        return Poly(tuple(quot)), carry


def poly_eval(p: Poly, n):
    """Horner evaluation of ``p`` at ``n``."""
    acc = 0
    for c in reversed(p.coeffs):
        acc = acc * n + c
    return acc


def delta(p: Poly) -> Poly:
    """Forward difference ``p(n+1) - p(n)``, computed on the coefficients."""
    cs = p.coeffs
    deg = len(cs) - 1
    if deg < 1:
        return Poly(())
    out = []
    for m in range(deg):
        acc = 0
        for i in range(m + 1, deg + 1):
            acc = acc + cs[i] * comb(i, m)
        out.append(acc)
    return Poly(tuple(out))


def delta_power_at(p: Poly, n, kmax: int) -> list:
    """``[Δ^k p (n) for k in 0..kmax]`` by exact repeated differencing."""
    out = []
    d = p
    for _ in range(kmax + 1):
        out.append(poly_eval(d, n))
        d = delta(d)
    return out


def _check_c(c, length: int) -> None:
    # (c+k)_{n+1} vanishes for some k, n < length iff c is a nonpositive integer
    cz = complex(c)
    if cz.imag == 0 and cz.real <= 0 and cz.real == int(cz.real) and -cz.real < 2 * length:
        raise ValueError(f"generalized binomial transform undefined for c = {c}")


def gen_binom(a: Sequence, c) -> list:
    """``b_n = sum_k C(n,k) (c+n)_k a_k`` for ``n < len(a)``."""
    out = []
    for n in range(len(a)):
        acc = 0
        binom = 1
        pk = 1
        for k in range(n + 1):
            if k:
                binom = binom * (n - k + 1) // k
                pk = pk * (c + n + k - 1)
            acc = acc + binom * pk * a[k]
        out.append(acc)
    return out


def gen_binom_inv(b: Sequence, c) -> list:
    """Inverse of :func:`gen_binom`.

    ``a_n = sum_k C(n,k) (-1)^(n-k) (c+2k) / (c+k)_{n+1} b_k``.
    """
    _check_c(c, len(b))
    out = []
    for n in range(len(b)):
        acc = 0
        binom = 1
        for k in range(n + 1):
            if k:
                binom = binom * (n - k + 1) // k
            sign = -1 if (n - k) % 2 else 1
            acc = acc + sign * binom * (c + 2 * k) / poch(c + k, n + 1) * b[k]
        out.append(acc)
    return out
