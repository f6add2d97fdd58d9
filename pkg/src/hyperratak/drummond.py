"""Stabilized Drummond transformation in linear complexity.

The transformation is carried as a ratio of rationals: ``mu^(k)`` is the
reciprocal ratio ``D^(k-1)/D^(k)`` of successive denominators and ``T^(k)`` the
transformed value, both updated from a fixed window of the previous orders.
"""

from __future__ import annotations

import contextlib
import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

import mpmath
import numpy as np

from . import _kernels as K
from .hyperterm import HyperParams, OmegaKind, RecurrencePolys, partial_sums, recurrence_polys, remainder_estimates
from .poly import DOUBLE_EPS, Poly, delta, to_scalar

__all__ = [
    "CoeffRows",
    "EvalResult",
    "Status",
    "TransformCursor",
    "coeff_row",
    "coeff_step",
    "drummond_cursor",
    "drummond_init",
    "drummond_iterate",
    "drummond_run",
    "drummond_step",
    "series_start",
]


class Status(enum.Enum):
    RUNNING = "running"
    CONVERGED = "converged"
    OVERFLOW = "overflow"
    K_MAX_REACHED = "k_max_reached"
    ZERO_DENOMINATOR = "zero_denominator"


_FAILURES = {K.NONFINITE: Status.OVERFLOW, K.ZERO_DENOMINATOR: Status.ZERO_DENOMINATOR}


@dataclass(frozen=True)
class EvalResult:
    value: complex
    k: int
    converged: bool
    err_est: float
    status: Status = Status.CONVERGED

    def __complex__(self):
        return complex(self.value)


def _tier_of(x):
    if isinstance(x, Fraction):
        return "exact"
    if isinstance(x, (complex, float, int)):
        return None
    return "mp"


def _zero_like(sample):
    return sample * 0


def _array(values, like):
    """1-d array holding ``values`` in the tier of ``like``."""
    if _tier_of(like) is None:
        return np.array([complex(v) for v in values], dtype=np.complex128)
    out = np.empty(len(values), dtype=object)
    for i, v in enumerate(values):
        out[i] = v
    return out


def _matrix(rows, width, like):
    zero = _zero_like(like)
    dtype = np.complex128 if _tier_of(like) is None else object
    out = np.empty((len(rows), width), dtype=dtype)
    for i, coeffs in enumerate(rows):
        for j in range(width):
            out[i, j] = coeffs[j] if j < len(coeffs) else zero
    return out


@dataclass
class CoeffRows:
    """Rows ``c_{n,j}^{(k)} = C(k,j) Δ^j c(n+k-j)`` of ``p, q, u, v`` at two levels.

    ``rows[i, j]`` is level ``k``, ``prev[i, j]`` level ``k - 1``; ``inh[k]`` is
    ``Δ^k w(n)`` for ``k <= deg w``.
    """

    polys: np.ndarray
    degs: np.ndarray
    rows: np.ndarray
    prev: np.ndarray
    inh: np.ndarray
    n: int
    k: int = 0

    def row(self, i: int) -> list:
        return list(self.rows[i, : min(self.k, int(self.degs[i])) + 1])


def _diff_table(w: Poly, n, like) -> list:
    out = []
    cur = w
    while not cur.is_zero():
        out.append(cur(n))
        cur = delta(cur)
    if not out:
        out.append(_zero_like(like))
    return out


def _make_rows(polys: list[Poly], w: Poly, n: int, width: int, like) -> CoeffRows:
    zero = _zero_like(like)
    coeffs = [list(pl.coeffs) or [zero] for pl in polys]
    degs = np.array([max(pl.degree, 0) for pl in polys], dtype=np.int64)
    D = int(degs.max()) + 1
    pmat = _matrix(coeffs, D, like)
    seeds = [[pl(n) if not pl.is_zero() else zero] for pl in polys]
    rows = _matrix(seeds, width, like)
    prev = _matrix([[zero]] * 4, width, like)
    inh = _array(_diff_table(w, n, like), like)
    return CoeffRows(pmat, degs, rows, prev, inh, n, 0)


def coeff_step(rows: CoeffRows) -> CoeffRows:
    """Advance the coefficient rows one level (in place) and return them."""
    k = rows.k + 1
    n = rows.n
    width = rows.rows.shape[1]
    rows.prev[:, :] = rows.rows
    for i in range(4):
        d = int(rows.degs[i])
        acc = rows.polys[i, d]
        for m in range(d - 1, -1, -1):
            acc = acc * (n + k) + rows.polys[i, m]
        rows.rows[i, 0] = acc
        for j in range(1, width):
            if j <= min(k, d):
                rows.rows[i, j] = ((k - j + 1) * rows.rows[i, j - 1] - k * rows.prev[i, j - 1]) / j
            else:
                rows.rows[i, j] = rows.rows[i, j] * 0
    rows.k = k
    return rows


def coeff_row(poly: Poly, n: int, k: int) -> list:
    """Definition of the row: ``C(k,j) Δ^j poly(n+k-j)`` for ``j = 0..min(k, deg)``."""
    out = []
    cur = poly
    for j in range(min(k, max(poly.degree, 0)) + 1):
        out.append(comb(k, j) * cur(n + k - j))
        cur = delta(cur)
    return out


@dataclass
class TransformCursor:
    """Mutable state of one Drummond evaluation at fixed ``n``."""

    n: int
    k: int
    mu: np.ndarray
    T: np.ndarray
    rows: CoeffRows
    aux: np.ndarray
    r_star: int
    status: Status = Status.RUNNING
    err_est: float = float("inf")
    kind: str = field(default="drummond")
    prec: int | None = None

    @property
    def value(self):
        return self.T[0]

    @property
    def window(self) -> int:
        return self.mu.shape[0]

    @property
    def compiled(self) -> bool:
        return self.T.dtype == np.complex128


def _polys_for(rp: RecurrencePolys):
    return [rp.p, rp.q, rp.u, rp.v], rp.w


def working_precision(prec):
    """Context setting the mpmath working precision for an integer ``prec``."""
    if isinstance(prec, int):
        return mpmath.workprec(prec)
    return contextlib.nullcontext()


def drummond_init(rp: RecurrencePolys, sums, n: int = 0, prec=None) -> TransformCursor:
    """Cursor at ``k = 0``.

    ``sums`` is ``(s_n, omega_n)``: the partial sum and the remainder estimate.
    ``prec`` (bits) is the working precision used when stepping mpmath values.
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    s_n, omega_n = sums
    if omega_n == 0:
        raise ZeroDivisionError("remainder estimate vanishes at this n; choose another n")
    if rp.u != rp.p or rp.v != rp.q:
        raise ValueError("the numerator recurrence requires u = p and v = q")
    polys, w = _polys_for(rp)
    L = max(rp.drummond_length, 1)
    like = s_n * 0 + omega_n * 0 + polys[0](0) * 0
    rows = _make_rows(polys, w, n, L + 1, like)
    zero = _zero_like(like)
    mu = _array([omega_n] + [zero] * L, like)
    T = _array([s_n] + [zero] * L, like)
    aux = _array([omega_n], like)
    return TransformCursor(n, 0, mu, T, rows, aux, rp.r_star, prec=prec if isinstance(prec, int) else None)


def _args(cur: TransformCursor):
    r = cur.rows
    return (cur.k, cur.n, r.polys, r.degs, r.rows, r.prev, cur.mu, cur.T, r.inh, cur.aux)


def drummond_step(cur: TransformCursor) -> TransformCursor:
    """Advance to order ``k + 1`` (in place); failures set ``status``."""
    if cur.status is not Status.RUNNING:
        raise RuntimeError(f"cursor is not running ({cur.status.value})")
    if cur.compiled:
        st = K.drummond_step(*_args(cur))
    else:
        with working_precision(cur.prec):
            st = K.drummond_step.py_func(*_args(cur))
    if st != K.OK:
        cur.status = _FAILURES[st]
        return cur
    cur.k += 1
    cur.rows.k = cur.k
    cur.err_est = abs(cur.T[0] - cur.T[1])
    return cur


def drummond_run(cur: TransformCursor, tol=None, k_max: int = 1 << 20, guard: int | None = None) -> TransformCursor:
    """Iterate until the stopping test holds for some ``k > guard``.

    ``guard`` defaults to ``r_star + 2``.
    """
    if guard is None:
        guard = cur.r_star + 2
    if tol is None:
        tol = 8 * DOUBLE_EPS
    if cur.compiled:
        k, st, conv, err = K.drummond_run(*_args(cur), k_max, float(tol), guard)
        cur.k = cur.rows.k = int(k)
        cur.err_est = float(err)
        _finish(cur, st, conv)
        return cur
    with working_precision(cur.prec):
        while cur.k < k_max:
            drummond_step(cur)
            if cur.status is not Status.RUNNING:
                return cur
            t0, t1 = cur.T[0], cur.T[1]
            if cur.k > guard and cur.err_est <= tol * max(abs(t0), abs(t1)):
                cur.status = Status.CONVERGED
                return cur
    cur.status = Status.K_MAX_REACHED
    return cur


def _finish(cur, st, conv):
    if st != K.OK:
        cur.status = _FAILURES[st]
    elif conv:
        cur.status = Status.CONVERGED
    else:
        cur.status = Status.K_MAX_REACHED


def drummond_iterate(cur: TransformCursor, k_stop: int) -> TransformCursor:
    """Advance without a stopping test until ``k == k_stop`` or a failure."""
    if cur.compiled:
        k, st = K.drummond_iterate(*_args(cur), k_stop)
        cur.k = cur.rows.k = int(k)
        if st != K.OK:
            cur.status = _FAILURES[st]
        return cur
    while cur.k < k_stop and cur.status is Status.RUNNING:
        drummond_step(cur)
    return cur


def series_start(params: HyperParams, z, omega, n: int, gamma=None, prec=None):
    """``(s_n, omega_n)`` of the Maclaurin series in tier ``prec``."""
    s_n = partial_sums(params, z, n + 1, prec)[-1][1]
    om = remainder_estimates(params, z, omega, n + 1, gamma, prec)[-1]
    return s_n, om


def drummond_cursor(params: HyperParams, z, omega=OmegaKind.A_NP1, n: int = 0, prec=None, gamma=None) -> TransformCursor:
    """Convenience: build polynomials and initial values, then :func:`drummond_init`."""
    omega = OmegaKind.parse(omega)
    g = gamma if omega is OmegaKind.N_GAMMA_AN else None
    with working_precision(prec):
        rp = recurrence_polys(params, z, omega, gamma=g, prec=prec)
        if g is not None:
            # r_star above includes the Levin-type hats; Drummond's guard uses plain degrees
            rp = RecurrencePolys(rp.p, rp.q, rp.u, rp.v, rp.w, rp.omega,
                                 r_star=max(rp.p.degree + 1, rp.q.degree, rp.w.degree, 0))
        return drummond_init(rp, series_start(params, z, omega, n, g, prec), n, prec)
