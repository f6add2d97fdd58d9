"""Independent oracles: the direct transformation formulas, a high-precision
truth source and closed forms.

The direct formulas are weighted binomial sums of ``s_{n+j}/omega_{n+j}`` and
``1/omega_{n+j}``.  They lose accuracy factorially fast in fixed precision and
exist only as test foils and for the instability demonstration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath
import numpy as np
import scipy.linalg

from .drummond import working_precision
from .hyperterm import HyperParams, OmegaKind, _converter, _terms, remainder_estimates
from .poly import EXTENDED_PREC, eps_for, poch

__all__ = [
    "OracleConfig",
    "OracleMode",
    "bessel_poly_roots",
    "closed_form_2f0_11",
    "direct_terms",
    "drummond_direct",
    "jacobi_roots",
    "oracle_pFq",
    "weniger_direct",
]


def direct_terms(params: HyperParams, z, n: int, k: int, omega, gamma=None, prec=None):
    """``(s_{n+j}, omega_{n+j})`` for ``j = 0..k``."""
    terms = _terms(params, z, n + k + 1, prec)
    sums, s = [], 0
    for a in terms:
        s = s + a
        sums.append(s)
    om = remainder_estimates(params, z, omega, n + k + 1, gamma, prec)
    return sums[n:], om[n:]


def _weighted(sums, om, weights, prec):
    num = den = 0
    for s, w, c in zip(sums, om, weights):
        if w == 0:
            raise ZeroDivisionError("remainder estimate vanishes")
        num = num + c * s / w
        den = den + c / w
    if prec is None and not (abs(num) < float("inf") and abs(den) < float("inf")):
        raise OverflowError("direct formula overflowed")
    if den == 0:
        raise ZeroDivisionError("direct denominator vanishes")
    return num / den


def _binomials(k: int, one):
    """Signed binomials ``(-1)^j C(k, j)`` by the multiplicative rule."""
    out = [one]
    c = one
    for j in range(k):
        c = -c * (k - j) / (j + 1)
        out.append(c)
    return out


def drummond_direct(params: HyperParams, z, n: int, k: int, omega=OmegaKind.A_NP1, prec=None, gamma=None):
    """Drummond ``T_n^(k)`` from its defining binomial sums (``gamma`` only for ``(n+gamma) a_n``)."""
    with working_precision(prec):
        sums, om = direct_terms(params, z, n, k, omega, gamma, prec)
        one = _converter(prec)(1)
        return _weighted(sums, om, _binomials(k, one), prec)


def weniger_direct(params: HyperParams, z, n: int, k: int, omega=OmegaKind.A_NP1, gamma=2, prec=None):
    """Factorial Levin-type ``R_n^(k)`` from its defining binomial sums."""
    with working_precision(prec):
        conv = _converter(prec)
        g = conv(gamma)
        sums, om = direct_terms(params, z, n, k, omega, g, prec)
        base = poch(n + g + k, k - 1) if k >= 1 else conv(1)
        weights = [c * poch(n + g + j, k - 1) / base if k >= 1 else c
                   for j, c in enumerate(_binomials(k, conv(1)))]
        return _weighted(sums, om, weights, prec)


class OracleMode(enum.Enum):
    AUTO = "auto"
    MACLAURIN = "maclaurin"
    STABLE_WENIGER = "stable_weniger"


@dataclass(frozen=True)
class OracleConfig:
    precision: int = EXTENDED_PREC
    mode: OracleMode = OracleMode.AUTO
    #: ``None`` means ``max(70, precision - 4)``
    tail_bits: int | None = None
    max_terms: int = 200_000


def _maclaurin_ok(params: HyperParams, z) -> bool:
    if params.terminating:
        return True
    if params.p <= params.q:
        return True
    return params.p == params.q + 1 and abs(complex(z)) < 0.9


def oracle_pFq(params: HyperParams, z, cfg: OracleConfig = OracleConfig()):
    """Reference value of ``pFq`` as an ``mpmath.mpc`` at ``cfg.precision`` bits."""
    mode = cfg.mode
    if mode is OracleMode.AUTO:
        mode = OracleMode.MACLAURIN if _maclaurin_ok(params, z) else OracleMode.STABLE_WENIGER
    if mode is OracleMode.MACLAURIN:
        if not _maclaurin_ok(params, z):
            raise ValueError("Maclaurin mode needs a convergent series at z")
        return _maclaurin(params, z, cfg)
    return _stable(params, z, cfg)


def _maclaurin(params: HyperParams, z, cfg: OracleConfig):
    prec = cfg.precision
    with mpmath.workprec(prec + 20):
        alpha, beta = params.converted(prec)
        z = _converter(prec)(z)
        zabs = abs(z)
        bits = cfg.tail_bits if cfg.tail_bits is not None else max(70, prec - 4)
        tail = mpmath.mpf(2) ** (-bits)
        a = mpmath.mpc(1)
        s = a
        for n in range(cfg.max_terms):
            num = z
            for al in alpha:
                num = num * (al + n)
            if num == 0:
                return +s
            den = n + 1
            for be in beta:
                den = den * (be + n)
            ratio = num / den
            a = a * ratio
            s = s + a
            rho = abs(ratio)
            if params.p == params.q + 1:
                rho = max(rho, zabs)
            # remaining ratios stay below rho once past the peak
            if rho < 1 and n > 2 and abs(a) * rho / (1 - rho) <= tail * abs(s) and _past_peak(alpha, beta, zabs, n, rho):
                return +s
    raise ArithmeticError("Maclaurin oracle did not reach its tail bound")


def _past_peak(alpha, beta, zabs, n, rho) -> bool:
    """Whether ``|a_{m+1}/a_m| <= rho`` plausibly holds for all ``m > n``.

    For ``p <= q`` the ratio is eventually decreasing in ``m``; a look-ahead
    over a few hundred indices guards against a later rise.
    """
    for m in (n + 1, n + 10, n + 100, 2 * n + 200):
        num = zabs
        for al in alpha:
            num = num * abs(al + m)
        den = m + 1
        for be in beta:
            den = den * abs(be + m)
        if num / den > rho:
            return False
    return True


def _stable(params: HyperParams, z, cfg: OracleConfig):
    from .weniger import weniger_cursor, weniger_run

    prec = cfg.precision
    cur = weniger_cursor(params, z, OmegaKind.A_NP1, 0, 2, prec=prec)
    with mpmath.workprec(prec):
        weniger_run(cur, tol=8 * eps_for(prec), k_max=20_000)
    if cur.status.value != "converged":
        raise ArithmeticError(f"stable oracle did not converge ({cur.status.value})")
    return cur.value


def closed_form_2f0_11(z, prec: int = EXTENDED_PREC):
    """``2F0(1,1;z)`` (Borel sum) for ``z`` off the positive real axis: ``x e^x E1(x)``, ``x = -1/z``."""
    with mpmath.workprec(prec):
        x = -1 / mpmath.mpmathify(z)
        return x * mpmath.exp(x) * mpmath.e1(x)


def jacobi_roots(k: int, a: float, b: float) -> np.ndarray:
    """Roots of the Jacobi polynomial ``P_k^(a,b)`` (``a, b > -1``) as eigenvalues of
    the symmetric Jacobi matrix of the three-term recurrence."""
    if k < 1:
        return np.zeros(0)
    i = np.arange(k, dtype=float)
    s = 2 * i + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2))
    diag[0] = (b - a) / (a + b + 2)
    j = np.arange(1, k, dtype=float)
    sj = 2 * j + a + b
    # (j+a+b)/(sj-1) is 1 at j = 1; written out to avoid 0/0 when a+b = -1
    ratio = np.where(j == 1, 1.0, (j + a + b) / np.where(j == 1, 1.0, sj - 1))
    off = 2 / sj * np.sqrt(j * (j + a) * (j + b) * ratio / (sj + 1))
    return np.sort(scipy.linalg.eigh_tridiagonal(diag, off, eigvals_only=True))


def bessel_poly_roots(k: int, coeff_shift, prec: int = 200) -> np.ndarray:
    """Roots in ``zeta`` of ``sum_j C(k,j) (coeff_shift)_j (-zeta)^j``.

    With ``coeff_shift = n + 2`` these are the reciprocal poles of the
    Drummond ``0F0`` denominators; with ``k + n + 1`` those of the ``gamma = 2``
    Levin-type case (generalized Bessel polynomials in ``2 zeta``).
    """
    with mpmath.workprec(prec):
        c = mpmath.mpf(coeff_shift)
        coeffs = []
        b = mpmath.mpf(1)
        for j in range(k + 1):
            coeffs.append(b * mpmath.rf(c, j) * (-1) ** j)
            b = b * (k - j) / (j + 1)
        roots = mpmath.polyroots(coeffs[::-1], maxsteps=400, extraprec=prec)
        return np.array([complex(r) for r in roots])
