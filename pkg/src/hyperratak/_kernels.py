"""Inner loops of the stabilized transformations.

Every kernel is a flat function (no calls into other jitted code) so that the
compiled version serves the double tier while ``kernel.py_func`` runs the very
same arithmetic on object arrays of ``mpmath.mpc`` or ``Fraction``.

Layout shared by both transformations (``L`` is the window length):

``polys``  (4, D+1) coefficients of the four recurrence polynomials
           ``[p, q, u, v]`` (Levin-type: ``[p^, q^, u^, v^]``), zero padded
``degs``   their degrees
``rows``   (4, L+1) coefficient rows at the current order ``k``
``prev``   (4, L+1) rows at order ``k - 1``
``mu``     ``mu[i]`` is the denominator ratio at order ``k - i``
``tw``     ``tw[i]`` is the transformation at order ``k - i``
``inh``    ``Δ^k w(n)`` for ``k = 0 .. deg w``
``aux``    ``aux[0]`` is ``1/D^{(k)}`` (kept while the inhomogeneity is live)

The numerator updates are written in terms of differences of the value
window, which requires ``u = p`` and ``v = q`` (true for every supported
remainder estimate; the cursor constructors check it).

Status codes: 0 ok, 1 non-finite value, 2 vanishing denominator.
"""

from __future__ import annotations

import numpy as np
from numba import njit

OK = 0
NONFINITE = 1
ZERO_DENOMINATOR = 2

_INF = np.inf


@njit(cache=True, nogil=True)
def drummond_step(k, n, polys, degs, rows, prev, mu, tw, inh, aux):
    """Advance a Drummond cursor from order ``k`` to ``k + 1`` in place."""
    L = mu.shape[0] - 1
    jp = min(k, degs[0])
    jq = min(k, degs[1])
    ju = min(k, degs[2])
    jv = min(k, degs[3])

    # denominator: p0 (1/mu' + 1) + sum_{j>=1} p_j P_{j-1} (1 + mu^(k-j+1)) = sum_j q_j P_j
    J = max(jq, jp - 1)
    h = rows[1, J] if J <= jq else rows[1, J] * 0
    if J + 1 <= jp:
        h = h - rows[0, J + 1] * (1 + mu[J])
    for j in range(J - 1, -1, -1):
        c = rows[1, j] if j <= jq else rows[1, j] * 0
        if j + 1 <= jp:
            c = c - rows[0, j + 1] * (1 + mu[j])
        h = c + mu[j] * h
    p0 = rows[0, 0]
    if p0 == 0:
        return ZERO_DENOMINATOR
    x = h / p0 - 1
    if x == 0:
        return ZERO_DENOMINATOR
    mu_new = 1 / x

    # numerator: u0 (T'/mu' + T^(k)) + sum_{j>=1} u_j P_{j-1} (T^(k-j+1) + T^(k-j) mu^(k-j+1))
    #            = sum_j v_j T^(k-j) P_j + Δ^k w mu^(k)...mu^(0)
    # minus T^(k) times the denominator relation (valid since u = p, v = q), so
    # only differences d_j = T^(k-j) - T^(k) enter
    J = max(jv, ju - 1)
    t0 = tw[0]
    h = tw[0] * 0
    for j in range(J, -1, -1):
        dj = tw[j] - t0
        c = rows[3, j] * dj if j <= jv else dj * 0
        if j + 1 <= ju:
            c = c - rows[2, j + 1] * (dj + (tw[j + 1] - t0) * mu[j])
        h = c + mu[j] * h
    if k < inh.shape[0]:
        h = h + inh[k] * aux[0]
    u0 = rows[2, 0]
    if u0 == 0:
        return ZERO_DENOMINATOR
    t_new = t0 + mu_new * h / u0
    if not (abs(t_new) < _INF) or not (abs(mu_new) < _INF):
        return NONFINITE
    if k + 1 < inh.shape[0]:
        aux[0] = aux[0] * mu_new

    for i in range(L, 0, -1):
        mu[i] = mu[i - 1]
        tw[i] = tw[i - 1]
    mu[0] = mu_new
    tw[0] = t_new

    # coefficient rows at order k + 1: j c_j = (K-j+1) c_{j-1} - K c'_{j-1}
    K = k + 1
    x = n + K
    for i in range(4):
        d = degs[i]
        for j in range(L + 1):
            prev[i, j] = rows[i, j]
        acc = polys[i, d]
        for m in range(d - 1, -1, -1):
            acc = acc * x + polys[i, m]
        rows[i, 0] = acc
        for j in range(1, min(K, d) + 1):
            rows[i, j] = ((K - j + 1) * rows[i, j - 1] - K * prev[i, j - 1]) / j
    return OK


@njit(cache=True, nogil=True)
def drummond_run(k, n, polys, degs, rows, prev, mu, tw, inh, aux, kmax, tol, guard):
    """Step until the stopping test passes, ``kmax`` is hit or a failure occurs.

    Returns ``(k, status, converged, err)``.
    """
    err = abs(tw[0]) * 0.0
    while k < kmax:
        st = drummond_step(k, n, polys, degs, rows, prev, mu, tw, inh, aux)
        if st != OK:
            return k, st, False, err
        k += 1
        err = abs(tw[0] - tw[1])
        if k > guard and err <= tol * max(abs(tw[0]), abs(tw[1])):
            return k, OK, True, err
    return k, OK, False, err


@njit(cache=True, nogil=True)
def drummond_iterate(k, n, polys, degs, rows, prev, mu, tw, inh, aux, kstop):
    """Step to order ``kstop`` without a stopping test (benchmarks)."""
    while k < kstop:
        st = drummond_step(k, n, polys, degs, rows, prev, mu, tw, inh, aux)
        if st != OK:
            return k, st
        k += 1
    return k, OK


@njit(cache=True, nogil=True)
def weniger_seed(K, n, g, rs, polys, degs, rows):
    """Write the ``j = 0`` entries of the order-``K`` rows (inlined in the step)."""
    r = K - 1 if K <= rs else rs
    base = n + g + 2 * K - r - 1
    x = n + K
    for i in range(4):
        d = degs[i]
        acc = polys[i, d]
        for m in range(d - 1, -1, -1):
            acc = acc * x + polys[i, m]
        # hatted p, u rows carry (base)_{r+2}; q, v rows carry (base)_{r+1}
        length = r + 2 if i % 2 == 0 else r + 1
        den = base * 0 + 1
        for m in range(length):
            den = den * (base + m)
        rows[i, 0] = acc / den


@njit(cache=True, nogil=True)
def weniger_step(k, n, g, rs, polys, degs, rows, prev, mu, tw, inh, aux):
    """Advance a factorial Levin-type cursor from order ``k`` to ``k + 1``.

    ``mu[i]`` holds the scaled ratio of order ``k - i``; the unscaled ratio
    ``Q^(m-1)/Q^(m)`` is ``mu^(m) / (n + g + m - 2)``.
    """
    W = mu.shape[0]
    r = k - 1 if k <= rs else rs
    J = r + 1
    lam = mu[:W] * 0
    for i in range(J):
        lam[i] = mu[i] / (n + g + k - i - 2)

    # denominator
    h = rows[1, J] * (n + g + 2 * k - 2 * J - 1)
    for j in range(J - 1, -1, -1):
        c = rows[1, j] * (n + g + 2 * k - 2 * j - 1)
        c = c - rows[0, j + 1] * (1 + (n + g + k - j - 2) * lam[j])
        h = c + lam[j] * h
    p0 = rows[0, 0]
    if p0 == 0:
        return ZERO_DENOMINATOR
    x = h / p0 - (n + g + k - 1)
    if x == 0:
        return ZERO_DENOMINATOR
    lam_new = 1 / x

    # numerator, differenced against R^(k) as in the Drummond step
    t0 = tw[0]
    h = tw[0] * 0
    for j in range(J, -1, -1):
        dj = tw[j] - t0
        c = rows[3, j] * (n + g + 2 * k - 2 * j - 1) * dj
        if j < J:
            c = c - rows[2, j + 1] * (dj + (n + g + k - j - 2) * (tw[j + 1] - t0) * lam[j])
        h = c + lam[j] * h if j < J else c
    if k < inh.shape[0]:
        h = h + inh[k] * aux[0]
    u0 = rows[2, 0]
    if u0 == 0:
        return ZERO_DENOMINATOR
    t_new = t0 + lam_new * h / u0
    if not (abs(t_new) < _INF) or not (abs(lam_new) < _INF):
        return NONFINITE
    if k + 1 < inh.shape[0]:
        aux[0] = aux[0] * lam_new

    for i in range(W - 1, 0, -1):
        mu[i] = mu[i - 1]
    for i in range(tw.shape[0] - 1, 0, -1):
        tw[i] = tw[i - 1]
    mu[0] = lam_new * (n + g + k - 1)
    tw[0] = t_new

    # coefficient rows at order K = k + 1
    K = k + 1
    for i in range(4):
        for j in range(W):
            prev[i, j] = rows[i, j]
    r = K - 1 if K <= rs else rs
    base = n + g + 2 * K - r - 1
    for i in range(4):
        d = degs[i]
        acc = polys[i, d]
        for m in range(d - 1, -1, -1):
            acc = acc * (n + K) + polys[i, m]
        length = r + 2 if i % 2 == 0 else r + 1
        den = base * 0 + 1
        for m in range(length):
            den = den * (base + m)
        rows[i, 0] = acc / den
    if K <= rs + 1:
        for i in range(4):
            hat = i % 2 == 0
            for j in range(1, K + 1):
                a = rows[i, j - 1] * ((n + g + 2 * K - j + 1) if hat else (n + g + 2 * K - j))
                if j >= 2:
                    a = a + K * prev[i, j - 2]
                rows[i, j] = ((K - j + 1) * a - K * prev[i, j - 1]) / j
    else:
        r = rs
        for i in range(4):
            hat = i % 2 == 0
            for j in range(1, r + 2):
                if hat:
                    a = (n + g + 2 * K - j + 1) * rows[i, j - 1]
                    if j >= 2:
                        a = a - (r - j + 3) * K * prev[i, j - 2]
                else:
                    a = (n + g + 2 * K - j) * rows[i, j - 1]
                    if j >= 2:
                        a = a - (r - j + 2) * K * prev[i, j - 2]
                b = (n + g + 2 * K - j - r - 2) * K * prev[i, j - 1]
                rows[i, j] = ((K - j + 1) * a - b) / j
    return OK


@njit(cache=True, nogil=True)
def weniger_run(k, n, g, rs, polys, degs, rows, prev, mu, tw, inh, aux, kmax, tol, guard):
    """Step until the stopping test passes; returns ``(k, status, converged, err)``."""
    err = abs(tw[0]) * 0.0
    while k < kmax:
        st = weniger_step(k, n, g, rs, polys, degs, rows, prev, mu, tw, inh, aux)
        if st != OK:
            return k, st, False, err
        k += 1
        err = abs(tw[0] - tw[1])
        if k > guard and err <= tol * max(abs(tw[0]), abs(tw[1])):
            return k, OK, True, err
    return k, OK, False, err


@njit(cache=True, nogil=True)
def weniger_iterate(k, n, g, rs, polys, degs, rows, prev, mu, tw, inh, aux, kstop):
    while k < kstop:
        st = weniger_step(k, n, g, rs, polys, degs, rows, prev, mu, tw, inh, aux)
        if st != OK:
            return k, st
        k += 1
    return k, OK


@njit(cache=True, nogil=True)
def pade_exp_run(z, tol, kmax):
    """Diagonal Padé approximants of ``exp(z)`` by the two-term ratio recurrence.

    Returns ``(value, k, converged, err, status)``.
    """
    if kmax < 1:
        return z * 0 + 1, 0, False, 0.0, OK
    den = 2 - z
    if den == 0:
        return z * 0 + 1, 0, False, 0.0, ZERO_DENOMINATOR
    mu = 1 / den
    r_prev = z * 0 + 1
    r = r_prev + 2 * z * mu
    z2 = z * z
    k = 1
    tol2 = tol * tol
    while k < kmax:
        den = 4 * k + 2 + z2 * mu
        if den == 0:
            return r, k, False, abs(r - r_prev), ZERO_DENOMINATOR
        mu_new = 1 / den
        r_new = ((4 * k + 2) * r + z2 * r_prev * mu) * mu_new
        mu = mu_new
        r_prev = r
        r = r_new
        k += 1
        # squared moduli: no square roots in the hot loop
        d = r - r_prev
        e2 = d.real * d.real + d.imag * d.imag
        m2 = max(r.real * r.real + r.imag * r.imag, r_prev.real * r_prev.real + r_prev.imag * r_prev.imag)
        if k > 2 and e2 <= tol2 * m2:
            return r, k, True, abs(d), OK
    return r, k, False, abs(r - r_prev), OK
