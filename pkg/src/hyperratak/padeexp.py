"""Diagonal Padé approximants of ``exp(z)`` by a two-term ratio recurrence.

``R_k`` is the type ``(k, k)`` approximant.  With ``mu_0 = 1``,
``mu_1 = 1/(2 - z)`` and ``mu_{k+1} = 1/(4k + 2 + z^2 mu_k)``::

    R_0 = 1,  R_1 = 1 + 2 z mu_1,  R_{k+1} = [(4k+2) R_k + z^2 R_{k-1} mu_k] mu_{k+1}

On the imaginary axis each ``R_k`` has unit modulus in exact arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import _kernels as K
from .drummond import EvalResult, Status
from .poly import DOUBLE_EPS

__all__ = ["PadeExpCursor", "classical_pade_exp", "default_k_max", "pade_exp", "unitarity_defect"]


@dataclass
class PadeExpCursor:
    """Stepwise form of the recurrence (the fast path is :func:`pade_exp`)."""

    z: complex
    k: int = 0
    mu: complex = 1
    R_prev: complex = 1
    R: complex = 1

    def step(self) -> "PadeExpCursor":
        z = self.z
        if self.k == 0:
            self.mu = 1 / (2 - z)
            self.R_prev, self.R = self.R, 1 + 2 * z * self.mu
        else:
            k = self.k
            mu_new = 1 / (4 * k + 2 + z * z * self.mu)
            self.R_prev, self.R = self.R, ((4 * k + 2) * self.R + z * z * self.R_prev * self.mu) * mu_new
            self.mu = mu_new
        self.k += 1
        return self


def default_k_max(z) -> int:
    """Order cap: convergence sets in once ``k`` passes roughly ``|z|/2``."""
    return max(1 << 20, int(abs(complex(z))) + 1000)


def pade_exp(z, tol: float | None = None, k_max: int | None = None) -> EvalResult:
    """Iterate until ``|R_k - R_{k-1}| <= tol max(|R_k|, |R_{k-1}|)`` for some ``k > 2``."""
    tol = 8 * DOUBLE_EPS if tol is None else float(tol)
    k_max = default_k_max(z) if k_max is None else int(k_max)
    if k_max < 2:
        raise ValueError("k_max must be >= 2")
    value, k, conv, err, st = K.pade_exp_run(complex(z), tol, k_max)
    if st != K.OK:
        status = Status.ZERO_DENOMINATOR
    else:
        status = Status.CONVERGED if conv else Status.K_MAX_REACHED
    return EvalResult(complex(value), int(k), bool(conv), float(err), status)


def unitarity_defect(value) -> float:
    """``| |value| - 1 |``."""
    return abs(abs(complex(value)) - 1.0)


def classical_pade_exp(z, k: int):
    """``[k/k]`` Padé approximant ``P_k(z)/P_k(-z)`` from its explicit coefficients."""
    coeffs = [Fraction(math.factorial(2 * k - j) * math.factorial(k), math.factorial(2 * k) * math.factorial(j) * math.factorial(k - j)) for j in range(k + 1)]
    num = sum(float(c) * z**j for j, c in enumerate(coeffs))
    den = sum(float(c) * (-z) ** j for j, c in enumerate(coeffs))
    return num / den
