"""The pFq term sequence and the polynomial data driving the recurrences.

For ``pFq(alpha; beta; z)`` the term ratio ``a_{n+1}/a_n`` is the rational
function ``z prod(alpha_i + n) / ((n + 1) prod(beta_j + n))``.  Given a
remainder estimate ``omega_n`` whose successive ratio and ``a_n/omega_n`` are
rational, the partial sums satisfy::

    p(n) D_{n+1} = q(n) D_n             with D_n = 1/omega_n
    u(n) N_{n+1} = v(n) N_n + w(n)      with N_n = s_n/omega_n

and :func:`recurrence_polys` returns those five polynomials (plus the
variants used by the factorial Levin-type transformation).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .poly import Poly, to_scalar

__all__ = [
    "HyperParams",
    "OmegaKind",
    "RecurrencePolys",
    "partial_sums",
    "recurrence_polys",
    "remainder_estimates",
    "sum_terminating",
    "term_ratio",
]

# relative tolerance for treating two linear factors as identical
_FACTOR_TOL = 1e-14


def _nonpositive_int(x) -> int | None:
    """Return ``m`` if ``x == -m`` for an integer ``m >= 0``, else None."""
    try:
        c = complex(x)
    except TypeError:
        return None
    if c.imag != 0 or c.real > 0 or c.real != int(c.real):
        return None
    return -int(c.real)


class OmegaKind(enum.Enum):
    """Choice of remainder estimate ``omega_n``."""

    A_N = "a_n"  # omega_n = a_n
    A_NP1 = "a_np1"  # omega_n = a_{n+1}
    N_GAMMA_AN = "n_gamma_an"  # omega_n = (n + gamma) a_n
    AITKEN = "aitken"  # omega_n = a_n a_{n+1} / (a_{n+1} - a_n)

    @classmethod
    def parse(cls, value: "OmegaKind | str") -> "OmegaKind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        for kind in cls:
            if key in (kind.value, kind.name.lower()):
                return kind
        raise ValueError(f"unknown remainder estimate {value!r}")


@dataclass(frozen=True)
class HyperParams:
    """Upper parameters ``alpha`` and lower parameters ``beta`` of pFq."""

    alpha: tuple = ()
    beta: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(self.alpha))
        object.__setattr__(self, "beta", tuple(self.beta))
        stop = self.terminating_degree
        for b in self.beta:
            m = _nonpositive_int(b)
            if m is not None and (stop is None or stop > m):
                raise ValueError(
                    f"lower parameter {b} is a pole of the series "
                    "(no upper parameter terminates it first)"
                )

    @property
    def p(self) -> int:
        return len(self.alpha)

    @property
    def q(self) -> int:
        return len(self.beta)

    @property
    def terminating_degree(self) -> int | None:
        """Degree of the polynomial if some ``alpha_i`` is in ``-N_0``."""
        degs = [m for m in map(_nonpositive_int, self.alpha) if m is not None]
        return min(degs) if degs else None

    @property
    def terminating(self) -> bool:
        return self.terminating_degree is not None

    def converted(self, prec):
        """``(alpha, beta)`` converted to the scalar type of tier ``prec``."""
        conv = _converter(prec)
        return [conv(a) for a in self.alpha], [conv(b) for b in self.beta]


def _converter(prec):
    if prec == "exact":
        return Fraction
    return lambda x: to_scalar(x, prec)


def term_ratio(params: HyperParams, z, prec=None) -> tuple[Poly, Poly]:
    """Numerator and denominator polynomials of ``a_{n+1}/a_n``."""
    alpha, beta = params.converted(prec)
    z = _converter(prec)(z)
    one = _converter(prec)(1)
    num = Poly.from_roots(alpha, lead=z)
    den = Poly.from_roots([one] + beta, lead=one)
    return num, den


def _terms(params: HyperParams, z, count: int, prec=None) -> list:
    alpha, beta = params.converted(prec)
    conv = _converter(prec)
    z = conv(z)
    a = conv(1)
    out = [a]
    for n in range(count - 1):
        num = z
        for al in alpha:
            num = num * (al + n)
        den = n + 1
        for be in beta:
            den = den * (be + n)
        if num == 0:
            a = a * 0
        else:
            a = a * num / den
        if prec is None and not abs(a) < float("inf"):
            raise OverflowError(f"term a_{n + 1} overflowed")
        out.append(a)
    return out


def partial_sums(params: HyperParams, z, count: int, prec=None) -> list[tuple]:
    """``[(a_n, s_n) for n in range(count)]`` of the Maclaurin series."""
    if count < 1:
        raise ValueError("count must be >= 1")
    out = []
    s = 0
    for a in _terms(params, z, count, prec):
        s = s + a
        out.append((a, s))
    return out


def sum_terminating(params: HyperParams, z, prec=None):
    """Exact finite sum of a terminating series."""
    m = params.terminating_degree
    if m is None:
        raise ValueError("series does not terminate")
    s = 0
    for a in _terms(params, z, m + 1, prec):
        s = s + a
    return s


def remainder_estimates(params: HyperParams, z, kind, count: int, gamma=None, prec=None) -> list:
    """Directly computed ``omega_0 .. omega_{count-1}``."""
    kind = OmegaKind.parse(kind)
    a = _terms(params, z, count + 1, prec)
    if kind is OmegaKind.A_N:
        return a[:count]
    if kind is OmegaKind.A_NP1:
        return a[1 : count + 1]
    if kind is OmegaKind.N_GAMMA_AN:
        g = _need_gamma(gamma, prec)
        return [(n + g) * a[n] for n in range(count)]
    return [a[n] * a[n + 1] / (a[n + 1] - a[n]) for n in range(count)]


def _need_gamma(gamma, prec):
    if gamma is None:
        raise ValueError("this remainder estimate requires gamma")
    return _converter(prec)(gamma)


@dataclass(frozen=True)
class _Factored:
    """``lead * prod(n + s)``, or an opaque polynomial when ``shifts`` is None."""

    lead: object
    shifts: tuple | None
    poly: Poly

    @classmethod
    def of(cls, lead, shifts) -> "_Factored":
        shifts = tuple(shifts)
        return cls(lead, shifts, Poly.from_roots(shifts, lead=lead))

    @classmethod
    def opaque(cls, poly: Poly) -> "_Factored":
        return cls(None, None, poly)

    def find(self, s) -> int | None:
        if self.shifts is None:
            return None
        for i, t in enumerate(self.shifts):
            if _same(t, s):
                return i
        return None

    def without(self, i: int) -> "_Factored":
        return _Factored.of(self.lead, self.shifts[:i] + self.shifts[i + 1 :])


def _same(a, b) -> bool:
    if a == b:
        return True
    try:
        return abs(complex(a) - complex(b)) <= _FACTOR_TOL * max(1.0, abs(complex(a)))
    except TypeError:
        return False


def _divides_linear(f: _Factored, g):
    """Quotient ``f / (n + g)`` if the division is exact, else None."""
    i = f.find(g)
    if i is not None:
        return f.without(i).poly
    if f.shifts is not None:
        return None
    quot, rem = f.poly.divide_linear(g)
    scale = max([abs(complex(c)) for c in f.poly.coeffs] + [1.0])
    if abs(complex(rem)) <= _FACTOR_TOL * scale:
        return quot
    return None


@dataclass(frozen=True)
class RecurrencePolys:
    """Polynomials of the first-order relations for ``1/omega_n`` and ``s_n/omega_n``.

    ``hat_*`` are the polynomials entering the factorial Levin-type recurrences:
    ``((n+g) p, q, (n+g) u, v, w)`` in general, or ``(p, q/(n+g), u, v/(n+g),
    w/(n+g))`` when ``n + gamma`` divides ``q``, ``v`` and ``w`` (``reduced``).
    """

    p: Poly
    q: Poly
    u: Poly
    v: Poly
    w: Poly
    omega: OmegaKind
    gamma: object = None
    hat_p: Poly | None = None
    hat_q: Poly | None = None
    hat_u: Poly | None = None
    hat_v: Poly | None = None
    hat_w: Poly | None = None
    reduced: bool = False
    r_star: int = 0

    @property
    def drummond_length(self) -> int:
        """Largest degree among ``p, q, u, v``: the Drummond window length."""
        return max(self.p.degree, self.q.degree, self.u.degree, self.v.degree, 0)


def recurrence_polys(
    params: HyperParams,
    z,
    omega=OmegaKind.A_NP1,
    gamma=None,
    prec=None,
    cancel: bool = False,
) -> RecurrencePolys:
    """Build ``p, q, u, v, w`` for the chosen remainder estimate.

    With ``gamma`` given, the factorial Levin-type variants are filled in and
    ``r_star`` accounts for the reduced form.  ``cancel=True`` removes linear
    factors common to ``p``, ``q`` and ``w`` (shorter recurrences, same
    transformation).
    """
    omega = OmegaKind.parse(omega)
    conv = _converter(prec)
    alpha, beta = params.converted(prec)
    z = conv(z)
    one = conv(1)
    g = None if gamma is None else conv(gamma)

    if omega is OmegaKind.A_NP1:
        p = _Factored.of(z, [al + 1 for al in alpha])
        q = _Factored.of(one, [one * 2] + [be + 1 for be in beta])
        w = q
    elif omega is OmegaKind.A_N:
        p = _Factored.of(z, alpha)
        q = _Factored.of(one, [one] + beta)
        w = p
    elif omega is OmegaKind.N_GAMMA_AN:
        g = _need_gamma(gamma, prec)
        p = _Factored.of(z, [g + 1] + alpha)
        q = _Factored.of(one, [g, one] + beta)
        w = _Factored.of(z, alpha)
    else:
        num = Poly.from_roots(alpha, lead=z)
        den = Poly.from_roots([one] + beta, lead=one)
        diff = num - den
        if diff.is_zero():
            raise ValueError("Aitken remainder estimate undefined: a_{n+1} - a_n vanishes identically")
        diff1 = diff.shift(one)
        p = _Factored.opaque(diff * num.shift(one))
        q = _Factored.opaque(den * diff1)
        w = _Factored.opaque(diff * diff1)

    if cancel and p.shifts is not None and q.shifts is not None and w.shifts is not None:
        changed = True
        while changed:
            changed = False
            for s in p.shifts:
                iq, iw = q.find(s), w.find(s)
                if iq is not None and iw is not None:
                    p, q, w = p.without(p.find(s)), q.without(iq), w.without(iw)
                    changed = True
                    break

    u, v = p, q
    P, Q, U, V, W = p.poly, q.poly, u.poly, v.poly, w.poly
    base_rstar = max(P.degree + 1, Q.degree, U.degree + 1, V.degree, W.degree)
    if g is None:
        return RecurrencePolys(P, Q, U, V, W, omega, r_star=base_rstar)

    hq, hv, hw = _divides_linear(q, g), _divides_linear(v, g), _divides_linear(w, g)
    if hq is not None and hv is not None and hw is not None:
        hats = (P, hq, U, hv, hw)
        reduced = True
    else:
        lin = Poly.linear(g, one)
        hats = (lin * P, Q, lin * U, V, W)
        reduced = False
    r_star = max(h.degree for h in hats)
    return RecurrencePolys(
        P, Q, U, V, W, omega, g,
        hat_p=hats[0], hat_q=hats[1], hat_u=hats[2], hat_v=hats[3], hat_w=hats[4],
        reduced=reduced, r_star=max(r_star, 0),
    )
