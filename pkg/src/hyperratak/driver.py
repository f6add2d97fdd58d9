"""Evaluation entry points: dispatch, stopping rule and precision doubling."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import mpmath

from .drummond import EvalResult, Status, drummond_cursor, drummond_run, working_precision
from .hyperterm import HyperParams, OmegaKind, sum_terminating
from .poly import eps_for, to_scalar
from .weniger import weniger_cursor, weniger_run

__all__ = [
    "EvalOptions",
    "EvalResult",
    "Kind",
    "pFq",
    "pFq_guaranteed",
    "transform_limit",
]

DEFAULT_K_MAX = 1_048_576
#: step cap for the extended-precision runs of :func:`pFq_guaranteed`
GUARANTEED_K_MAX = 20_000


class Kind(enum.Enum):
    DRUMMOND = "drummond"
    FACTORIAL_LEVIN = "weniger"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        if key in ("drummond", "d"):
            return cls.DRUMMOND
        if key in ("weniger", "levin", "factorial_levin", "factoriallevin", "w"):
            return cls.FACTORIAL_LEVIN
        raise ValueError(f"unknown transformation {value!r}")


@dataclass(frozen=True)
class EvalOptions:
    """``tol=None`` means ``8 eps`` of the working precision."""

    kind: Kind = Kind.FACTORIAL_LEVIN
    omega: OmegaKind = OmegaKind.A_NP1
    gamma: object = 2
    n: int = 0
    tol: object = None
    k_max: int = DEFAULT_K_MAX

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        object.__setattr__(self, "omega", OmegaKind.parse(self.omega))
        if self.tol is not None and not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.n < 0:
            raise ValueError("n must be >= 0")


def _cursor(params: HyperParams, z, opts: EvalOptions, prec):
    if opts.kind is Kind.DRUMMOND:
        return drummond_cursor(params, z, opts.omega, opts.n, prec, opts.gamma), drummond_run
    return weniger_cursor(params, z, opts.omega, opts.n, opts.gamma, prec), weniger_run


def _one(prec):
    return to_scalar(1, prec) if prec != "exact" else 1


def transform_limit(params: HyperParams, z, opts: EvalOptions = EvalOptions(), prec=None) -> EvalResult:
    """Iterate the chosen transformation to the stopping criterion.

    Accepts the first ``k > r* + 2`` with ``|T^(k) - T^(k-1)| <= tol max(|T^(k)|, |T^(k-1)|)``.
    """
    with working_precision(prec):
        cur, run = _cursor(params, z, opts, prec)
        if opts.k_max < cur.r_star + 3:
            raise ValueError(f"k_max must be at least r* + 3 = {cur.r_star + 3}")
        tol = opts.tol if opts.tol is not None else 8 * eps_for(prec)
        run(cur, tol=tol, k_max=opts.k_max)
        value = cur.value
        if cur.compiled:
            value = complex(value)
    err = cur.err_est
    return EvalResult(value, cur.k, cur.status is Status.CONVERGED, err, cur.status)


def pFq(params: HyperParams, z, opts: EvalOptions = EvalOptions(), prec=None) -> EvalResult:
    """``pFq(alpha; beta; z)``: exact for ``z = 0`` and terminating series, else by transformation."""
    if z == 0:
        return EvalResult(_one(prec), 0, True, 0.0, Status.CONVERGED)
    if params.terminating:
        with working_precision(prec):
            value = sum_terminating(params, z, prec)
        if prec is None:
            value = complex(value)
        return EvalResult(value, 0, True, 0.0, Status.CONVERGED)
    return transform_limit(params, z, opts, prec)


def pFq_guaranteed(
    params: HyperParams,
    z,
    target_bits: int = 53,
    opts: EvalOptions = EvalOptions(),
    max_doublings: int = 4,
    k_max: int = GUARANTEED_K_MAX,
):
    """Value whose leading ``target_bits`` agree between runs at ``q`` and ``2q`` bits.

    Starts from ``q = 2 target_bits + 8`` and doubles ``q`` until two
    successive runs agree.  Returns a ``complex`` for ``target_bits <= 53`` and
    an ``mpmath.mpc`` otherwise.  Each run is capped at
    ``min(k_max, opts.k_max)`` steps; a run that stops without converging
    raises ``ArithmeticError`` at once.
    """
    if target_bits < 1:
        raise ValueError("target_bits must be positive")
    opts = EvalOptions(opts.kind, opts.omega, opts.gamma, opts.n, None, min(opts.k_max, k_max))

    def run(bits):
        res = pFq(params, z, opts, prec=bits)
        if not res.converged:
            raise ArithmeticError(f"no convergence at {bits} bits ({res.status.value}, k={res.k})")
        return res

    q = 2 * target_bits + 8
    prev = run(q)
    for _ in range(max_doublings):
        q *= 2
        cur = run(q)
        with mpmath.workprec(q):
            scale = max(abs(cur.value), mpmath.mpf(2) ** (-q // 2))
            if abs(cur.value - prev.value) <= mpmath.mpf(2) ** (-target_bits) * scale:
                if target_bits <= 53:
                    return complex(cur.value)
                with mpmath.workprec(target_bits):
                    return +cur.value
        prev = cur
    raise ArithmeticError(f"no agreement to {target_bits} bits after {max_doublings} doublings")
