"""Command-line front end.

Subcommands: ``eval``, ``grid``, ``poles``, ``pade-exp``, ``unstable-demo`` and
``bench``.  Results go to stdout as CSV (17 significant digits); commands that
take ``--out DIR`` also write their CSV files there together with PPM images
and PNG figures rendered from those files.

Exit codes: 0 success, 1 malformed input or unwritable output, 2 order cap
reached (or a failed check), 3 overflow or vanishing denominator.
"""

from __future__ import annotations

import argparse
import cmath
import csv
import io
import math
import os
import re
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .driver import DEFAULT_K_MAX, EvalOptions, Kind, pFq
from .drummond import Status, drummond_cursor, drummond_iterate, drummond_step
from .hyperterm import HyperParams, OmegaKind
from .padeexp import pade_exp, unitarity_defect
from .reference import OracleConfig, OracleMode, drummond_direct, oracle_pFq, weniger_direct
from .weniger import weniger_cursor, weniger_iterate, weniger_step

__all__ = [
    "BENCH_COLUMNS",
    "GRID_COLUMNS",
    "GridJob",
    "main",
    "parse_complex",
    "parse_params",
    "run_grid",
]

GRID_COLUMNS = ["method", "i_re", "i_im", "re_z", "im_z", "re_f", "im_f", "k", "converged", "err_est", "seconds", "status", "rel_err"]
POLE_COLUMNS = ["case", "n", "k", "alpha", "index", "re_zeta", "im_zeta", "checks_passed"]
CHECK_COLUMNS = ["case", "n", "k", "alpha", "check", "passed", "margin"]
PADE_COLUMNS = ["re_z", "im_z", "re_f", "im_f", "k", "converged", "err_est", "abs_err", "unitarity_defect", "seconds", "status"]
UNSTABLE_COLUMNS = ["k"] + [
    f"{m}_{v}_{w}" for m in ("drummond", "weniger") for v in ("direct", "stable") for w in ("approx", "true")
]
BENCH_COLUMNS = ["method", "k", "seconds", "ratio", "seconds_per_step"]

#: grid order cap; cells that stall at the rounding floor would otherwise run to 2^20
GRID_K_MAX = 10_000

EXIT_OK, EXIT_USAGE, EXIT_KMAX, EXIT_NUMERIC = 0, 1, 2, 3
_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.K_MAX_REACHED: EXIT_KMAX,
    Status.OVERFLOW: EXIT_NUMERIC,
    Status.ZERO_DENOMINATOR: EXIT_NUMERIC,
}


class UsageError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits; empty for missing values."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _writer(fh, columns):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    return w


def _scalar(text: str):
    text = text.strip()
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return complex(text.replace(" ", ""))
    except ValueError:
        raise UsageError(f"cannot parse parameter {text!r}") from None


def parse_params(alpha: str, beta: str) -> HyperParams:
    """Comma lists of rationals (``5/4``, ``1.5``) or complex numbers (``1+2j``)."""
    try:
        return HyperParams(
            tuple(_scalar(a) for a in alpha.split(",") if a.strip()),
            tuple(_scalar(b) for b in beta.split(",") if b.strip()),
        )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_complex(text: str) -> complex:
    """``re,im`` or a single real/complex literal."""
    parts = [p.strip() for p in text.split(",")]
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        if len(parts) == 1:
            return complex(parts[0].replace(" ", ""))
    except ValueError:
        pass
    raise UsageError(f"cannot parse complex number {text!r}")


def _floats(text: str, count: int, name: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{name}: expected {count} comma-separated numbers") from None
    if len(vals) != count:
        raise UsageError(f"{name}: expected {count} comma-separated numbers")
    return vals


def _real(text: str) -> float:
    v = _scalar(text)
    if isinstance(v, complex):
        if v.imag:
            raise UsageError(f"expected a real number, got {text!r}")
        v = v.real
    return float(v)


def _gamma(text: str):
    v = _scalar(text)
    return float(v) if isinstance(v, Fraction) else v


def thread_count() -> int:
    """Worker pool size: available cores, capped by ``HYPERRATAK_THREADS``."""
    n = len(os.sched_getaffinity(0)) if hasattr(os, "sched_getaffinity") else (os.cpu_count() or 1)
    cap = os.environ.get("HYPERRATAK_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise UsageError("HYPERRATAK_THREADS must be an integer") from None
    return max(1, n)


def _oracle_cfg(mode: str) -> OracleConfig | None:
    if mode == "none":
        return None
    return OracleConfig(mode=OracleMode(mode))


def _rel_err(value, truth) -> float | None:
    if truth is None or value is None:
        return None
    t = complex(truth)
    d = abs(complex(value) - t)
    return d / abs(t) if t != 0 else d


def _oracle_value(params, z, cfg):
    if cfg is None:
        return None
    try:
        return oracle_pFq(params, z, cfg)
    except (ArithmeticError, ValueError):
        return None


# ---------------------------------------------------------------- grid / eval


@dataclass(frozen=True)
class GridJob:
    params: HyperParams
    methods: tuple
    rect: tuple  # (re_min, re_max, im_min, im_max)
    resolution: tuple  # (n_re, n_im)
    opts: EvalOptions
    oracle: OracleConfig | None = None
    repeat: int = 1

    def cells(self):
        """``(i_re, i_im, z)`` in image order: top row is the largest imaginary part."""
        re_min, re_max, im_min, im_max = self.rect
        n_re, n_im = self.resolution
        re = np.linspace(re_min, re_max, n_re)
        im = np.linspace(im_max, im_min, n_im)
        return [(i, j, complex(re[i], im[j])) for j in range(n_im) for i in range(n_re)]


def _evaluate(params, z, opts, repeat=1):
    """``(result, seconds, status)``; the time is the median over ``repeat`` runs."""
    times, res = [], None
    for _ in range(max(1, repeat)):
        t0 = time.perf_counter()
        try:
            res = pFq(params, z, opts)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            return None, time.perf_counter() - t0, f"error:{type(exc).__name__}"
        times.append(time.perf_counter() - t0)
    return res, statistics.median(times), res.status.value


def _cell_row(method, i, j, z, res, seconds, status, truth):
    value = None if res is None else complex(res.value)
    return [
        method,
        i,
        j,
        z.real,
        z.imag,
        None if value is None else value.real,
        None if value is None else value.imag,
        None if res is None else res.k,
        None if res is None else res.converged,
        None if res is None else res.err_est,
        seconds,
        status,
        _rel_err(value, truth),
    ]


def run_grid(job: GridJob, threads: int | None = None) -> dict:
    """Evaluate every cell for every method; rows are ordered by cell index."""
    cells = job.cells()
    threads = thread_count() if threads is None else threads

    def oracle(cell):
        return _oracle_value(job.params, cell[2], job.oracle)

    def work(method):
        opts = EvalOptions(method, job.opts.omega, job.opts.gamma, job.opts.n, job.opts.tol, job.opts.k_max)

        def one(args):
            (i, j, z), truth = args
            res, sec, st = _evaluate(job.params, z, opts, job.repeat)
            return _cell_row(method.value, i, j, z, res, sec, st, truth)

        # load the compiled kernels outside the timed cells
        _evaluate(job.params, cells[0][2], opts)
        return one

    with ThreadPoolExecutor(max_workers=threads) as pool:
        truths = list(pool.map(oracle, cells)) if job.oracle else [None] * len(cells)
        out = {}
        for method in job.methods:
            out[method] = list(pool.map(work(method), zip(cells, truths)))
    return out


def _write_rows(path, columns, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh, columns)
        for r in rows:
            w.writerow([fmt(x) for x in r])


def _emit(rows, columns) -> None:
    w = _writer(sys.stdout, columns)
    for r in rows:
        w.writerow([fmt(x) for x in r])


def _opts(args, method: str) -> EvalOptions:
    try:
        return EvalOptions(
            kind=Kind.parse(method),
            omega=OmegaKind.parse(args.omega),
            gamma=_gamma(args.gamma),
            n=args.n,
            tol=args.tol,
            k_max=args.kmax,
        )
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_eval(args) -> int:
    params = parse_params(args.alpha, args.beta)
    z = parse_complex(args.z)
    opts = _opts(args, args.method)
    res, sec, status = _evaluate(params, z, opts)
    if res is None:
        raise UsageError(f"evaluation failed ({status})")
    truth = _oracle_value(params, z, _oracle_cfg(args.oracle))
    _emit([_cell_row(opts.kind.value, 0, 0, z, res, sec, status, truth)], GRID_COLUMNS)
    return _EXIT[res.status]


def _methods(text: str) -> tuple:
    try:
        return tuple(Kind.parse(m) for m in text.split(",") if m.strip())
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _out_dir(path) -> Path | None:
    if path is None:
        return None
    out = Path(path)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write_probe"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise UsageError(f"cannot write to {out}: {exc}") from None
    return out


def cmd_grid(args) -> int:
    from . import plotting

    params = parse_params(args.alpha, args.beta)
    rect = tuple(_floats(args.rect, 4, "--rect"))
    res = tuple(int(v) for v in _floats(args.res, 2, "--res"))
    if min(res) < 1:
        raise UsageError("--res entries must be >= 1")
    methods = _methods(args.methods)
    job = GridJob(params, methods, rect, res, _opts(args, methods[0].value), _oracle_cfg(args.oracle), args.repeat)
    out = _out_dir(args.out)
    t0 = time.perf_counter()
    results = run_grid(job, args.threads)
    elapsed = time.perf_counter() - t0
    summary = io.StringIO()
    w = _writer(summary, ["method", "cells", "converged", "median_k", "frac_rel_err_le_1e-10", "seconds_total"])
    for method, rows in results.items():
        name = method.value
        ks = [r[7] for r in rows if r[7] is not None]
        errs = [r[12] for r in rows if r[12] is not None]
        good = sum(e <= 1e-10 for e in errs) / len(errs) if errs else None
        w.writerow([name, len(rows), sum(bool(r[8]) for r in rows), fmt(statistics.median(ks)) if ks else "", fmt(good), fmt(elapsed)])
        if out is not None:
            csv_path = out / f"grid_{name}.csv"
            _write_rows(csv_path, GRID_COLUMNS, rows)
            if not args.no_ppm:
                plotting.render_grid_ppms(csv_path, out, f"grid_{name}")
            if not args.no_figures:
                plotting.grid_figure(csv_path, out / f"grid_{name}.png", title=f"{name}: alpha={args.alpha} beta={args.beta}")
        else:
            _emit(rows, GRID_COLUMNS)
    if out is not None:
        sys.stdout.write(summary.getvalue())
    return EXIT_OK


# ---------------------------------------------------------------- poles


def cmd_poles(args) -> int:
    from . import plotting
    from .poles import PencilCase, build_pencil, check_report, cross_check, reciprocal_poles

    try:
        case = PencilCase.parse(args.case)
        alpha = None if args.alpha is None else _real(args.alpha)
        if case in (PencilCase.DRUMMOND_1F0, PencilCase.DELTA_1F0) and alpha is None:
            raise UsageError("--alpha is required for the 1F0 cases")
        if args.k < 1 or args.n < 0:
            raise UsageError("need k >= 1 and n >= 0")
        pencil = build_pencil(case, args.n, args.k, alpha)
    except UsageError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    zeta = reciprocal_poles(pencil)
    report = check_report(pencil, zeta)
    head = [case.value, args.n, args.k, alpha]
    rows = [head + [i, z.real, z.imag, report.passed] for i, z in enumerate(zeta)]
    checks = [head + [name, ok, margin] for name, ok, margin in report.checks]
    if args.cross_check:
        for name, err in cross_check(pencil, zeta).items():
            checks.append(head + [f"{name}_roots_rel", err <= 1e-8, 1e-8 - err])
    _emit(rows, POLE_COLUMNS)
    out = _out_dir(args.out)
    if out is not None:
        stem = f"poles_{case.value}_n{args.n}_k{args.k}"
        _write_rows(out / f"{stem}.csv", POLE_COLUMNS, rows)
        _write_rows(out / f"{stem}_checks.csv", CHECK_COLUMNS, checks)
        if not args.no_figures:
            plotting.poles_figure(out / f"{stem}.csv", out / f"{stem}.png")
    for r in checks:
        print(",".join(fmt(x) for x in r), file=sys.stderr)
    return EXIT_OK if all(r[5] for r in checks) else EXIT_KMAX


# ---------------------------------------------------------------- pade-exp


def _exp_oracle(z: complex) -> complex:
    with mpmath.workprec(max(80, int(math.log2(abs(z) + 1)) + 80)):
        return complex(mpmath.exp(mpmath.mpc(z)))


def cmd_pade_exp(args) -> int:
    z = parse_complex(args.z)
    if args.kmax is not None and args.kmax < 2:
        raise UsageError("--kmax must be >= 2")
    t0 = time.perf_counter()
    res = pade_exp(z, args.tol, args.kmax)
    sec = time.perf_counter() - t0
    err = abs(res.value - _exp_oracle(z))
    row = [z.real, z.imag, res.value.real, res.value.imag, res.k, res.converged, res.err_est, err, unitarity_defect(res.value), sec, res.status.value]
    _emit([row], PADE_COLUMNS)
    return _EXIT[res.status]


# ---------------------------------------------------------------- unstable-demo


def _stable_sequence(cursor, step, k_max):
    vals = [complex(cursor.value)]
    while cursor.k < k_max:
        step(cursor)
        if cursor.status is not Status.RUNNING:
            break
        vals.append(complex(cursor.value))
    return vals + [complex("nan")] * (k_max + 1 - len(vals))


def _direct_sequence(fn, params, z, k_max):
    vals = []
    for k in range(k_max + 1):
        try:
            with np.errstate(all="ignore"):
                vals.append(complex(fn(params, z, 0, k)))
        except (OverflowError, ZeroDivisionError):
            vals.append(complex("nan"))
    return vals


def _errors(vals, truth):
    approx, true = [], []
    for k, v in enumerate(vals):
        true.append(abs(v - truth) / abs(truth) if cmath.isfinite(v) else math.inf)
        if k == 0 or not cmath.isfinite(v):
            approx.append(None if k == 0 else math.inf)
        else:
            prev = vals[k - 1]
            approx.append(abs(v - prev) / abs(v) if cmath.isfinite(prev) and v != 0 else math.inf)
    return approx, true


def unstable_table(params: HyperParams, z: complex, k_max: int) -> list[list]:
    """Per-k approximate and true relative errors of direct vs recurrence evaluation."""
    truth = complex(oracle_pFq(params, z))
    cols = []
    for direct, cursor, step in (
        (drummond_direct, drummond_cursor, drummond_step),
        (weniger_direct, weniger_cursor, weniger_step),
    ):
        cols.extend(_errors(_direct_sequence(direct, params, z, k_max), truth))
        cols.extend(_errors(_stable_sequence(cursor(params, z), step, k_max), truth))
    return [[k] + [c[k] for c in cols] for k in range(k_max + 1)]


def cmd_unstable_demo(args) -> int:
    from . import plotting

    params = parse_params(args.alpha, args.beta)
    z = parse_complex(args.z)
    if args.kmax < 1:
        raise UsageError("--kmax must be >= 1")
    rows = unstable_table(params, z, args.kmax)
    _emit(rows, UNSTABLE_COLUMNS)
    out = _out_dir(args.out)
    if out is not None:
        _write_rows(out / "unstable.csv", UNSTABLE_COLUMNS, rows)
        if not args.no_figures:
            plotting.unstable_figure(out / "unstable.csv", out / "unstable.png")
    return EXIT_OK


# ---------------------------------------------------------------- bench


def time_iteration(params: HyperParams, z, method: Kind, k: int, repeat: int = 10) -> float:
    """Median over ``repeat`` runs of the time to iterate a fresh cursor to order ``k``."""
    make, advance = (drummond_cursor, drummond_iterate) if method is Kind.DRUMMOND else (weniger_cursor, weniger_iterate)
    advance(make(params, z), 3)  # warm the compiled kernels
    times = []
    for _ in range(repeat):
        cur = make(params, z)
        t0 = time.perf_counter()
        advance(cur, k)
        times.append(time.perf_counter() - t0)
        if cur.k != k:
            raise ArithmeticError(f"{method.value} stopped at k={cur.k} ({cur.status.value})")
    return statistics.median(times)


def bench_table(params, z, methods, ks, repeat=10) -> list[list]:
    rows = []
    for method in methods:
        prev = {}
        for k in ks:
            t = time_iteration(params, z, method, k, repeat)
            prev[k] = t
            half = prev.get(k // 2)
            ratio = t / half if half and k % 2 == 0 else None
            rows.append([method.value, k, t, ratio, t / k if k else None])
    return rows


def cmd_bench(args) -> int:
    from . import plotting

    params = parse_params(args.alpha, args.beta)
    z = parse_complex(args.z)
    try:
        ks = [int(k) for k in args.ks.split(",")]
    except ValueError:
        raise UsageError("--ks must be a comma list of integers") from None
    if min(ks) < 0:
        raise UsageError("--ks must be nonnegative")
    try:
        rows = bench_table(params, z, _methods(args.methods), ks, args.repeat)
    except ArithmeticError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NUMERIC
    _emit(rows, BENCH_COLUMNS)
    out = _out_dir(args.out)
    if out is not None:
        _write_rows(out / "bench.csv", BENCH_COLUMNS, rows)
        if not args.no_figures:
            plotting.bench_figure(out / "bench.csv", out / "bench.png")
    return EXIT_OK


# ---------------------------------------------------------------- parser


def _add_eval_flags(p, method=True, k_max=DEFAULT_K_MAX):
    p.add_argument("--alpha", required=True, help="upper parameters, comma separated (may be empty)")
    p.add_argument("--beta", required=True, help="lower parameters, comma separated (may be empty)")
    if method:
        p.add_argument("--method", default="weniger", help="drummond or weniger")
    p.add_argument("--omega", default="a_np1", help="a_n, a_np1, n_gamma_an or aitken")
    p.add_argument("--gamma", default="2")
    p.add_argument("--tol", type=float, default=None, help="default 8 eps")
    p.add_argument("--kmax", type=int, default=k_max)
    p.add_argument("--n", type=int, default=0)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hyperratak", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate pFq at one point")
    _add_eval_flags(p)
    p.add_argument("--z", required=True, help="re,im")
    p.add_argument("--oracle", default="none", choices=["none", "auto", "maclaurin", "stable_weniger"])
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("grid", help="evaluate on a rectangular grid")
    _add_eval_flags(p, method=False, k_max=GRID_K_MAX)
    p.add_argument("--methods", default="weniger", help="comma list of drummond,weniger")
    p.add_argument("--rect", default="-5,5,-5,5", help="re_min,re_max,im_min,im_max")
    p.add_argument("--res", default="101,101", help="n_re,n_im")
    p.add_argument("--oracle", default="auto", choices=["none", "auto", "maclaurin", "stable_weniger"])
    p.add_argument("--repeat", type=int, default=1, help="timing runs per cell (median)")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None, help="directory for CSV, PPM and PNG output")
    p.add_argument("--no-ppm", action="store_true")
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("poles", help="reciprocal poles of the 0F0/1F0 denominators")
    p.add_argument("--case", required=True, help="drummond0f0, drummond1f0, delta0f0 or delta1f0")
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--alpha", default=None)
    p.add_argument("--cross-check", action="store_true", help="compare with independent root sets")
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_poles)

    p = sub.add_parser("pade-exp", help="diagonal Pade approximant of exp(z)")
    p.add_argument("--z", required=True, help="re,im")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--kmax", type=int, default=None)
    p.set_defaults(func=cmd_pade_exp)

    p = sub.add_parser("unstable-demo", help="direct formulas vs recurrences, per order k")
    p.add_argument("--alpha", default="1,1")
    p.add_argument("--beta", default="")
    p.add_argument("--z", default="-2,0")
    p.add_argument("--kmax", type=int, default=200)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_unstable_demo)

    p = sub.add_parser("bench", help="time cursor iteration against k")
    p.add_argument("--alpha", default="5/4")
    p.add_argument("--beta", default="3/2")
    p.add_argument("--z", default="-3,1")
    p.add_argument("--methods", default="drummond,weniger")
    p.add_argument("--ks", default="250,500,1000,2000")
    p.add_argument("--repeat", type=int, default=10)
    p.add_argument("--out", default=None)
    p.add_argument("--no-figures", action="store_true")
    p.set_defaults(func=cmd_bench)
    return ap


_NUMERIC = re.compile(r"^-[0-9.]")


def _join_negative_values(argv: list[str]) -> list[str]:
    """``--z -2,0`` becomes ``--z=-2,0`` (argparse would read ``-2,0`` as a flag)."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok.startswith("--") and "=" not in tok and i + 1 < len(argv) and _NUMERIC.match(argv[i + 1]):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = ap.parse_args(_join_negative_values(argv))
    except SystemExit as exc:
        # argparse uses 2 for bad usage; 2 is reserved for k_max here
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
