"""Stabilized factorial Levin-type transformation in linear complexity.

The numerator and denominator sequences ``P^(k)`` and ``Q^(k)`` carry a
factor ``(n+gamma)_{k-1}`` that is never formed: the cursor keeps the scaled
reciprocal ratio ``mu~^(k) = (n+gamma+k-2) Q^(k-1)/Q^(k)`` and the value
``R^(k) = P^(k)/Q^(k)``.  For ``k <= r*`` the recurrences run with a growing
length ``r = k - 1`` (startup); afterwards ``r = r*`` (steady state).
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from . import _kernels as K
from .drummond import (
    Status,
    _FAILURES,
    _array,
    _diff_table,
    _finish,
    _matrix,
    _zero_like,
    series_start,
    working_precision,
)
from .hyperterm import HyperParams, OmegaKind, RecurrencePolys, recurrence_polys
from .poly import DOUBLE_EPS, Poly, delta, poch

__all__ = [
    "GAMMA_GUARD",
    "WenigerCursor",
    "WenigerRows",
    "weniger_coeff_row",
    "weniger_coeff_step",
    "weniger_cursor",
    "weniger_init",
    "weniger_iterate",
    "weniger_run",
    "weniger_step",
]

#: ``n + gamma - 1`` closer than this to a nonpositive integer is rejected
GAMMA_GUARD = 1e-6


@dataclass
class WenigerRows:
    """Rows of ``p^, q, u^, v`` (indices 0..3) at orders ``k`` and ``k - 1``."""

    polys: np.ndarray
    degs: np.ndarray
    rows: np.ndarray
    prev: np.ndarray
    inh: np.ndarray
    n: int
    gamma: object
    r_star: int
    k: int = 0

    @property
    def phase(self) -> str:
        return "startup" if self.k <= self.r_star else "steady"

    @property
    def r(self) -> int:
        return self.k - 1 if self.k <= self.r_star else self.r_star

    def row(self, i: int) -> list:
        return list(self.rows[i, : self.r + 2])


def _check_gamma(n: int, gamma) -> None:
    c = complex(n + gamma - 1)
    if c.real <= GAMMA_GUARD and abs(c.imag) <= GAMMA_GUARD:
        if abs(c.real - round(c.real)) <= GAMMA_GUARD:
            raise ValueError(f"n + gamma - 1 = {c} is (near) a nonpositive integer")


def _kernel(name: str, compiled: bool):
    fn = getattr(K, name)
    return fn if compiled else fn.py_func


def _make_rows(rp: RecurrencePolys, n: int, gamma, r_star: int, like) -> WenigerRows:
    polys = [rp.hat_p, rp.hat_q, rp.hat_u, rp.hat_v]
    zero = _zero_like(like)
    coeffs = [list(pl.coeffs) or [zero] for pl in polys]
    degs = np.array([max(pl.degree, 0) for pl in polys], dtype=np.int64)
    pmat = _matrix(coeffs, int(degs.max()) + 1, like)
    width = r_star + 2
    rows = _matrix([[zero]] * 4, width, like)
    prev = _matrix([[zero]] * 4, width, like)
    compiled = rows.dtype == np.complex128
    g = complex(gamma) if compiled else gamma
    _kernel("weniger_seed", compiled)(0, n, g, r_star, pmat, degs, rows)
    inh = _array(_diff_table(rp.hat_w, n, like), like)
    return WenigerRows(pmat, degs, rows, prev, inh, n, g, r_star, 0)


def weniger_coeff_step(rows: WenigerRows) -> WenigerRows:
    """Advance the rows to order ``k + 1`` (in place) by the adjacent-entry rules."""
    K_ = rows.k + 1
    n, g, rs = rows.n, rows.gamma, rows.r_star
    rows.prev[:, :] = rows.rows
    compiled = rows.rows.dtype == np.complex128
    _kernel("weniger_seed", compiled)(K_, n, g, rs, rows.polys, rows.degs, rows.rows)
    width = rows.rows.shape[1]
    if K_ <= rs + 1:
        for i in range(4):
            shift = 1 if i % 2 == 0 else 0
            for j in range(1, width):
                if j > K_:
                    rows.rows[i, j] = rows.rows[i, j] * 0
                    continue
                a = (n + g + 2 * K_ - j + shift) * rows.rows[i, j - 1]
                if j >= 2:
                    a = a + K_ * rows.prev[i, j - 2]
                rows.rows[i, j] = ((K_ - j + 1) * a - K_ * rows.prev[i, j - 1]) / j
    else:
        r = rs
        for i in range(4):
            shift = 1 if i % 2 == 0 else 0
            for j in range(1, r + 2):
                a = (n + g + 2 * K_ - j + shift) * rows.rows[i, j - 1]
                if j >= 2:
                    a = a - (r - j + 2 + shift) * K_ * rows.prev[i, j - 2]
                b = (n + g + 2 * K_ - j - r - 2) * K_ * rows.prev[i, j - 1]
                rows.rows[i, j] = ((K_ - j + 1) * a - b) / j
    rows.k = K_
    return rows


def _gbinom(a: int, b: int) -> int:
    """Binomial with the convention ``C(a, b) = 0`` for ``b < 0`` except ``C(-1, -1) = 1``."""
    if b < 0:
        return 1 if a == b == -1 else 0
    if a < 0:
        return 0 if b > 0 else 1
    return comb(a, b)


def weniger_coeff_row(poly: Poly, n: int, k: int, r: int, gamma, hatted: bool) -> list:
    """Definition of a row, ``j = 0 .. r + 1``, as an explicit double sum.

    ``hatted`` selects the ``p^`` form (extra Pochhammer factor) over the ``q`` form.
    """
    extra = 1 if hatted else 0
    diffs = []
    cur = poly
    for s in range(min(k, max(poly.degree, 0)) + 1):
        diffs.append(cur)
        cur = delta(cur)
    out = []
    for j in range(r + 2):
        total = 0
        for s in range(min(k, j, len(diffs) - 1) + 1):
            coef = comb(k, s) * _gbinom(r + extra - s, r + extra - j) * (-1) ** (j - s)
            if coef == 0:
                continue
            total = total + coef * poch(k - j + 1, j - s) * diffs[s](n + k - s) / poch(
                n + gamma + 2 * k - j - r - 1, r - s + 1 + extra
            )
        out.append(total)
    return out


@dataclass
class WenigerCursor:
    """Mutable state of one factorial Levin-type evaluation at fixed ``n``."""

    n: int
    k: int
    gamma: object
    mu: np.ndarray
    R: np.ndarray
    rows: WenigerRows
    aux: np.ndarray
    r_star: int
    status: Status = Status.RUNNING
    err_est: float = float("inf")
    prec: int | None = None
    kind: str = "factorial_levin"

    @property
    def value(self):
        return self.R[0]

    @property
    def T(self):
        return self.R

    @property
    def window(self) -> int:
        return self.mu.shape[0]

    @property
    def compiled(self) -> bool:
        return self.R.dtype == np.complex128


def weniger_init(rp: RecurrencePolys, sums, n: int = 0, gamma=None, prec=None, r_star: int | None = None) -> WenigerCursor:
    """Cursor at ``k = 0``.

    ``rp`` must carry the Levin-type polynomials (built with ``gamma``).
    ``r_star`` may be raised above ``rp.r_star`` (any larger length is valid).
    """
    if rp.hat_p is None:
        raise ValueError("recurrence polynomials were built without gamma")
    if rp.hat_u != rp.hat_p or rp.hat_v != rp.hat_q:
        raise ValueError("the numerator recurrence requires u = p and v = q")
    gamma = rp.gamma if gamma is None else gamma
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_gamma(n, gamma)
    s_n, omega_n = sums
    if omega_n == 0:
        raise ZeroDivisionError("remainder estimate vanishes at this n; choose another n")
    rs = rp.r_star if r_star is None else r_star
    if rs < rp.r_star:
        raise ValueError(f"r_star must be at least {rp.r_star}")
    like = s_n * 0 + omega_n * 0 + rp.hat_p(0) * 0
    rows = _make_rows(rp, n, gamma, rs, like)
    zero = _zero_like(like)
    inv_q0 = (n + gamma - 1) * omega_n
    W = rs + 2
    mu = _array([inv_q0] + [zero] * (W - 1), like)
    R = _array([s_n] + [zero] * (W - 1), like)
    aux = _array([inv_q0], like)
    return WenigerCursor(n, 0, rows.gamma, mu, R, rows, aux, rs, prec=prec if isinstance(prec, int) else None)


def _args(cur: WenigerCursor):
    r = cur.rows
    return (cur.k, cur.n, cur.gamma, cur.r_star, r.polys, r.degs, r.rows, r.prev, cur.mu, cur.R, r.inh, cur.aux)


def weniger_step(cur: WenigerCursor) -> WenigerCursor:
    """Advance to order ``k + 1`` (in place); failures set ``status``."""
    if cur.status is not Status.RUNNING:
        raise RuntimeError(f"cursor is not running ({cur.status.value})")
    if cur.compiled:
        st = K.weniger_step(*_args(cur))
    else:
        with working_precision(cur.prec):
            st = K.weniger_step.py_func(*_args(cur))
    if st != K.OK:
        cur.status = _FAILURES[st]
        return cur
    cur.k += 1
    cur.rows.k = cur.k
    cur.err_est = abs(cur.R[0] - cur.R[1])
    return cur


def weniger_run(cur: WenigerCursor, tol=None, k_max: int = 1 << 20, guard: int | None = None) -> WenigerCursor:
    """Iterate until the stopping test holds for some ``k > guard`` (default ``r* + 2``)."""
    if guard is None:
        guard = cur.r_star + 2
    if tol is None:
        tol = 8 * DOUBLE_EPS
    if cur.compiled:
        k, st, conv, err = K.weniger_run(*_args(cur), k_max, float(tol), guard)
        cur.k = cur.rows.k = int(k)
        cur.err_est = float(err)
        _finish(cur, st, conv)
        return cur
    with working_precision(cur.prec):
        while cur.k < k_max:
            weniger_step(cur)
            if cur.status is not Status.RUNNING:
                return cur
            r0, r1 = cur.R[0], cur.R[1]
            if cur.k > guard and cur.err_est <= tol * max(abs(r0), abs(r1)):
                cur.status = Status.CONVERGED
                return cur
    cur.status = Status.K_MAX_REACHED
    return cur


def weniger_iterate(cur: WenigerCursor, k_stop: int) -> WenigerCursor:
    """Advance without a stopping test until ``k == k_stop`` or a failure."""
    if cur.compiled:
        k, st = K.weniger_iterate(*_args(cur), k_stop)
        cur.k = cur.rows.k = int(k)
        if st != K.OK:
            cur.status = _FAILURES[st]
        return cur
    while cur.k < k_stop and cur.status is Status.RUNNING:
        weniger_step(cur)
    return cur


def weniger_cursor(
    params: HyperParams,
    z,
    omega=OmegaKind.A_NP1,
    n: int = 0,
    gamma=2,
    prec=None,
    r_star: int | None = None,
) -> WenigerCursor:
    """Convenience: build polynomials and initial values, then :func:`weniger_init`."""
    with working_precision(prec):
        rp = recurrence_polys(params, z, omega, gamma=gamma, prec=prec)
        sums = series_start(params, z, omega, n, gamma, prec)
        return weniger_init(rp, sums, n, rp.gamma, prec, r_star)
