"""Reciprocal poles ``zeta = 1/z`` of the transformation denominators.

For ``0F0`` and ``1F0`` with ``omega_n = Δ s_n`` the denominators obey
three-term recurrences in ``k`` whose coefficients are linear in ``zeta``, so
their nontrivial reciprocal roots are eigenvalues of ``k x k`` banded
pencils.  This module builds those pencils, checks the bound theorems, and
compares the denominators with their terminating hypergeometric closed forms.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .hyperterm import HyperParams, _terms, sum_terminating
from .poly import EXTENDED_PREC, poch

__all__ = [
    "Pencil",
    "PencilCase",
    "PoleReport",
    "bessel_shift",
    "build_pencil",
    "check_report",
    "cross_check",
    "denominator_poly",
    "drummond_b_inverse",
    "extended_bits",
    "reciprocal_poles",
    "standard_matrix",
    "terminating_identity_check",
]

CHECK_TOL = 1e-10


class PencilCase(enum.Enum):
    DRUMMOND_0F0 = "drummond0f0"
    DRUMMOND_1F0 = "drummond1f0"
    DELTA_0F0 = "delta0f0"
    DELTA_1F0 = "delta1f0"

    @classmethod
    def parse(cls, value) -> "PencilCase":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("_", "").replace("-", "")
        for case in cls:
            if case.value == key:
                return case
        raise ValueError(f"unknown pencil case {value!r}")

    @property
    def drummond(self) -> bool:
        return self in (PencilCase.DRUMMOND_0F0, PencilCase.DRUMMOND_1F0)


@dataclass(frozen=True)
class Pencil:
    """``det(A - zeta B) = 0``; ``B`` is the identity for the Levin-type cases."""

    case: PencilCase
    n: int
    k: int
    A: np.ndarray
    B: np.ndarray
    alpha: float | None = None
    gamma: int = 2


def _drummond_b(n: int, k: int) -> np.ndarray:
    B = np.zeros((k, k))
    for i in range(k):
        B[i, i] = n + i + 2
        if i > 0:
            B[i, i - 1] = i
    return B


def drummond_b_inverse(n: int, k: int) -> np.ndarray:
    """Closed-form inverse of the lower bidiagonal ``B`` of the Drummond pencils."""
    Binv = np.zeros((k, k))
    for i in range(1, k + 1):
        for j in range(1, i + 1):
            Binv[i - 1, j - 1] = (-1) ** (i - j) * poch(j, i - j) / poch(n + j + 1, i - j + 1)
    return Binv


def build_pencil(case, n: int, k: int, alpha=None) -> Pencil:
    """Pencil whose generalized eigenvalues are the ``k`` nontrivial reciprocal poles."""
    case = PencilCase.parse(case)
    if k < 1:
        raise ValueError("k must be >= 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    needs_alpha = case in (PencilCase.DRUMMOND_1F0, PencilCase.DELTA_1F0)
    if needs_alpha and alpha is None:
        raise ValueError(f"{case.value} requires alpha")
    a = float(alpha) if needs_alpha else None
    A = np.zeros((k, k))
    if case is PencilCase.DRUMMOND_0F0:
        for i in range(k):
            A[i, i] = 1
            if i + 1 < k:
                A[i, i + 1] = 1
        return Pencil(case, n, k, A, _drummond_b(n, k))
    if case is PencilCase.DRUMMOND_1F0:
        for i in range(k):
            A[i, i] = a + n + 2 * i + 1
            if i + 1 < k:
                A[i, i + 1] = a + n + i + 1
            if i > 0:
                A[i, i - 1] = i
        return Pencil(case, n, k, A, _drummond_b(n, k), a)
    for i in range(k):
        if i + 1 < k:
            up = 1.0 if case is PencilCase.DELTA_0F0 else n + i + a + 1
            A[i, i + 1] = up / poch(n + 2 * i + 1, 2)
        if i > 0:
            low = -1.0 if case is PencilCase.DELTA_0F0 else (i - a)
            A[i, i - 1] = low * i * (n + i) / poch(n + 2 * i, 2)
        # n/((n+2i)(n+2i+2)) is 1/(n+2) at i = 0 for every n, including n = 0
        ratio = 1 / (n + 2) if i == 0 else n / ((n + 2 * i) * (n + 2 * i + 2))
        if case is PencilCase.DELTA_0F0:
            A[i, i] = ratio
        else:
            A[i, i] = 0.5 * (1 + (n + 2 * a) * ratio)
    return Pencil(case, n, k, A, np.eye(k), a)


def standard_matrix(p: Pencil) -> np.ndarray:
    """``B^{-1} A`` with the closed-form inverse, or ``A`` for the Levin-type cases."""
    if p.case.drummond:
        return drummond_b_inverse(p.n, p.k) @ p.A
    return p.A


def extended_bits(p: Pencil) -> int | None:
    """Working precision needed for the pencil's eigenvalues (None: double suffices).

    The Levin-type matrices are far from normal: eigenvalue sensitivity grows
    exponentially in ``k`` and double precision is exhausted near ``k = 20``.
    """
    if p.case.drummond or p.k <= 8:
        return None
    return 64 + 4 * p.k


def _levin_matrix_mp(p: Pencil):
    M = mpmath.zeros(p.k, p.k)
    for m in range(p.k):
        up, low, diag = _delta_row(p.case, p.n, m, p.alpha)
        M[m, m] = diag
        if m + 1 < p.k:
            M[m, m + 1] = up
        if m > 0:
            M[m, m - 1] = low
    return M


def reciprocal_poles(p: Pencil, prec="auto") -> np.ndarray:
    """Generalized eigenvalues sorted by modulus, largest first.

    ``prec="auto"`` uses :func:`extended_bits`; ``None`` forces double
    precision; an integer forces that many bits (Levin-type cases).
    """
    if p.k > 500:
        raise ValueError("desk-scale pencils only (k <= 500)")
    bits = extended_bits(p) if prec == "auto" else prec
    if bits is not None and not p.case.drummond:
        with mpmath.workprec(bits):
            try:
                ev = mpmath.eig(_levin_matrix_mp(p), left=False, right=False)
            except Exception as exc:  # mpmath raises plain errors on QR failure
                raise ArithmeticError(f"eigenvalue solver failed: {exc}") from exc
            ev = np.array([complex(x) for x in ev])
    else:
        try:
            ev = np.linalg.eigvals(standard_matrix(p)).astype(complex)
        except np.linalg.LinAlgError as exc:
            raise ArithmeticError(f"eigenvalue solver failed: {exc}") from exc
    return ev[np.argsort(-np.abs(ev), kind="stable")]


@dataclass
class PoleReport:
    case: PencilCase
    n: int
    k: int
    reciprocal_poles: np.ndarray
    bound_lower: float | None
    bound_upper: float | None
    checks: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)


def check_report(p: Pencil, poles: np.ndarray | None = None, tol: float = CHECK_TOL) -> PoleReport:
    """Evaluate the bound theorems valid for the pencil's parameters.

    Each check is ``(name, passed, margin)`` with ``margin >= -tol`` on success.
    """
    z = reciprocal_poles(p) if poles is None else np.asarray(poles)
    n, k = p.n, p.k
    rho = float(np.max(np.abs(z)))
    checks = []
    lo = hi = None

    def add(name, margin):
        checks.append((name, bool(margin >= -tol), float(margin)))

    if p.case is PencilCase.DRUMMOND_0F0 or p.case is PencilCase.DELTA_0F0:
        if p.case is PencilCase.DRUMMOND_0F0:
            lo, hi, tr = 1 / (n + k + 1), 1 / (n + 2), k / (n + k + 1)
        else:
            lo, hi, tr = 1 / (n + 2 * k), 1 / (n + k + 1), k / (n + 2 * k)
        add("lower_bound", rho - lo)
        add("upper_bound", hi - rho)
        add("trace", -abs(np.trace(standard_matrix(p)) - tr))
    elif p.case is PencilCase.DRUMMOND_1F0:
        lo, hi = 0.0, 2.0
        if p.alpha <= 1 and p.alpha + n + 1 > 0:
            add("disk_|zeta-1|<=1", 1 - float(np.max(np.abs(z - 1))))
    else:
        lo, hi = 0.0, 1.0
        if -n - 1 < p.alpha < 1:
            imag = np.abs(z.imag) - tol * np.maximum(1, np.abs(z))
            add("real", -float(np.max(imag)) - tol)
            add("in_(0,1)", float(min(np.min(z.real), np.min(1 - z.real))))
    return PoleReport(p.case, n, k, z, lo, hi, checks)


def bessel_shift(case, n: int, k: int):
    """``c`` such that the poles are the roots of ``sum_j C(k,j) (c)_j (-zeta)^j``."""
    case = PencilCase.parse(case)
    if case is PencilCase.DRUMMOND_0F0:
        return n + 2
    if case is PencilCase.DELTA_0F0:
        return k + n + 1
    raise ValueError("Bessel representation only for the 0F0 cases")


def _match(a: np.ndarray, b: np.ndarray) -> float:
    """Max relative distance after sorting both root sets by (real, imag)."""
    a = np.array(sorted(np.asarray(a, dtype=complex), key=lambda c: (round(c.real, 12), c.imag)))
    b = np.array(sorted(np.asarray(b, dtype=complex), key=lambda c: (round(c.real, 12), c.imag)))
    return float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))


def cross_check(p: Pencil, poles: np.ndarray | None = None) -> dict:
    """Relative disagreement of the pencil eigenvalues with independent root sets.

    ``bessel``: polynomial roots of the Bessel representation (0F0 cases).
    ``jacobi``: ``(1 - x)/2`` over the Jacobi nodes ``x`` of ``P_k^(alpha+n, -alpha)``
    (Delta1F0 with ``-n-1 < alpha < 1``).
    ``recurrence``: roots of the denominator generated by its recurrence in ``k``.
    """
    z = reciprocal_poles(p) if poles is None else np.asarray(poles)
    out = {}
    if p.case in (PencilCase.DRUMMOND_0F0, PencilCase.DELTA_0F0):
        from .reference import bessel_poly_roots

        out["bessel"] = _match(z, bessel_poly_roots(p.k, bessel_shift(p.case, p.n, p.k)))
    if p.case is PencilCase.DELTA_1F0 and -p.n - 1 < p.alpha < 1:
        from .reference import jacobi_roots

        out["jacobi"] = _match(z, (1 - jacobi_roots(p.k, p.alpha + p.n, -p.alpha)) / 2)
    with mpmath.workprec(200):
        coeffs = denominator_poly(p.case, p.n, p.k, p.alpha)
        roots = mpmath.polyroots(coeffs[::-1], maxsteps=400, extraprec=200)
    out["recurrence"] = _match(z, np.array([complex(r) for r in roots]))
    return out


def denominator_poly(case, n: int, k: int, alpha=None, prec: int = 200) -> list:
    """Coefficients (ascending in ``zeta``) of the order-``k`` denominator generated
    by iterating its three-term recurrence in ``k`` (normalized ``D^(0) = 1``)."""
    case = PencilCase.parse(case)
    with mpmath.workprec(prec):
        prev, cur = [mpmath.mpf(0)], [mpmath.mpf(1)]
        for m in range(k):
            nxt = [mpmath.mpf(0)] * (len(cur) + 1)
            if case is PencilCase.DRUMMOND_0F0:
                # D' = zeta [(n+m+2) D + m D_prev] - D
                for i, c in enumerate(cur):
                    nxt[i + 1] += (n + m + 2) * c
                    nxt[i] -= c
                for i, c in enumerate(prev):
                    nxt[i + 1] += m * c
            elif case is PencilCase.DRUMMOND_1F0:
                al = mpmath.mpf(alpha)
                # (al+n+m+1) D' = zeta [(n+m+2) D + m D_prev] - (al+n+2m+1) D - m D_prev
                for i, c in enumerate(cur):
                    nxt[i + 1] += (n + m + 2) * c
                    nxt[i] -= (al + n + 2 * m + 1) * c
                for i, c in enumerate(prev):
                    nxt[i + 1] += m * c
                    nxt[i] -= m * c
                nxt = [c / (al + n + m + 1) for c in nxt]
            else:
                # row m of the tridiagonal matrix: up Q' = zeta Q - diag Q - low Q_prev
                up, low, diag = _delta_row(case, n, m, alpha)
                for i, c in enumerate(cur):
                    nxt[i + 1] += c
                    nxt[i] -= diag * c
                for i, c in enumerate(prev):
                    nxt[i] -= low * c
                nxt = [c / up for c in nxt]
            prev, cur = cur, nxt
        return cur


def _delta_row(case, n, m, alpha):
    """Exact ``(up, low, diag)`` coefficients of row ``m`` of the Levin-type matrices."""
    n = mpmath.mpf(n)
    ratio = 1 / (n + 2) if m == 0 else n / ((n + 2 * m) * (n + 2 * m + 2))
    lowpoch = (n + 2 * m) * (n + 2 * m + 1) if m else 1
    if case is PencilCase.DELTA_0F0:
        return 1 / ((n + 2 * m + 1) * (n + 2 * m + 2)), -m * (n + m) / lowpoch, ratio
    a = mpmath.mpf(alpha)
    up = (n + m + a + 1) / ((n + 2 * m + 1) * (n + 2 * m + 2))
    low = (m - a) * m * (n + m) / lowpoch
    return up, low, (1 + (n + 2 * a) * ratio) / 2


def _lemma_rhs(kind: str, params: HyperParams, n: int, k: int, z, gamma):
    """Prefactor times the terminating series of the closed form."""
    zeta = 1 / z
    alpha = [mpmath.mpmathify(a) for a in params.alpha]
    beta = [mpmath.mpmathify(b) for b in params.beta]
    pref = mpmath.mpf(-1) ** k / z ** (n + 1)
    for b in beta:
        pref *= mpmath.rf(b, n + 1)
    for a in alpha:
        pref /= mpmath.rf(a, n + 1)
    lower = [a + n + 1 for a in alpha]
    if kind == "drummond":
        pref *= mpmath.rf(1, n + 1)
        upper = [-k, n + 2] + [b + n + 1 for b in beta]
    elif gamma == 2:
        pref *= mpmath.rf(1, n + k)
        upper = [-k, k + n + 1] + [b + n + 1 for b in beta]
    else:
        g = mpmath.mpmathify(gamma)
        pref *= mpmath.rf(1, n + 1) * (mpmath.rf(n + g, k - 1) if k >= 1 else 1 / (n + g - 1))
        upper = [-k, k + n + g - 1, n + 2] + [b + n + 1 for b in beta]
        lower = [n + g] + lower
    series = sum_terminating(HyperParams(tuple(upper), tuple(lower)), zeta, prec=mpmath.mp.prec)
    return pref * series


def _lemma_lhs(kind: str, params: HyperParams, n: int, k: int, z, gamma):
    """``Δ^k`` of ``1/Δ s_n`` (times ``(n+gamma)_{k-1}`` for the Levin-type case), directly."""
    a = _terms(params, z, n + k + 2, prec=mpmath.mp.prec)
    g = mpmath.mpmathify(gamma)
    total = 0
    binom = mpmath.mpf(1)
    for j in range(k + 1):
        weight = 1 if kind == "drummond" else poch(n + j + g, k - 1) if k >= 1 else 1 / (n + j + g - 1)
        total += binom * (-1) ** (k - j) * weight / a[n + 1 + j]
        binom = binom * (k - j) / (j + 1)
    return total


def terminating_identity_check(kind, params: HyperParams, n: int, k: int, z_samples, gamma=2, prec: int = EXTENDED_PREC) -> float:
    """Largest relative deviation between the denominators and their closed forms."""
    kind = "drummond" if str(getattr(kind, "value", kind)).lower() == "drummond" else "weniger"
    if k < 0 or n < 0:
        raise ValueError("n, k must be >= 0")
    worst = 0.0
    with mpmath.workprec(prec):
        for z in z_samples:
            z = mpmath.mpmathify(z)
            if z == 0:
                raise ValueError("z = 0 is excluded")
            lhs = _lemma_lhs(kind, params, n, k, z, gamma)
            rhs = _lemma_rhs(kind, params, n, k, z, gamma)
            worst = max(worst, float(abs(lhs - rhs) / abs(rhs)))
    return worst
