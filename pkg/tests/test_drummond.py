import random
from fractions import Fraction as F
from math import comb

import mpmath
import numpy as np
import pytest

from hyperratak.drummond import (
    Status,
    TransformCursor,
    _make_rows,
    coeff_row,
    coeff_step,
    drummond_cursor,
    drummond_init,
    drummond_iterate,
    drummond_run,
    drummond_step,
    series_start,
)
from hyperratak.hyperterm import HyperParams, OmegaKind, recurrence_polys, remainder_estimates
from hyperratak.poly import Poly
from hyperratak.reference import drummond_direct

H2F0 = HyperParams((1, 1), ())
TARGET = 0.461455316241865234


class TestInit:
    def test_partial_sum_and_mu(self):
        cur = drummond_cursor(H2F0, -2)
        assert cur.k == 0 and cur.value == 1 and cur.mu[0] == -2

    def test_exponential_mu(self):
        cur = drummond_cursor(HyperParams(), 1)
        assert cur.mu[0] == 1

    def test_nonzero_n_starts_at_partial_sum(self):
        cur = drummond_cursor(H2F0, F(-2), n=3, prec="exact")
        assert cur.value == 1 - 2 + 8 - 48

    def test_vanishing_omega_rejected(self):
        with pytest.raises(ZeroDivisionError):
            drummond_cursor(HyperParams(), 0)

    def test_requires_u_equal_p(self):
        rp = recurrence_polys(H2F0, -2)
        bad = type(rp)(rp.p, rp.q, rp.q, rp.v, rp.w, rp.omega, r_star=rp.r_star)
        with pytest.raises(ValueError):
            drummond_init(rp=bad, sums=(1, -2))


class TestCoeffRows:
    def test_linear_row(self):
        assert coeff_row(Poly((2, 1)), 0, 2) == [4, 2]

    def test_quadratic_row(self):
        q = Poly.from_roots([2, F(5, 2)])
        # q(1) = 21/2 and q(0) = 5, so the difference is 11/2
        assert coeff_row(q, 0, 1) == [F(21, 2), F(11, 2)]

    def test_constant_row(self):
        for k in range(6):
            assert coeff_row(Poly((F(7),)), 0, k) == [7]

    @pytest.mark.parametrize("n", [0, 2])
    def test_step_matches_definition_exactly(self, n):
        rp = recurrence_polys(HyperParams((F(5, 4), F(-1, 3)), (F(3, 2),)), F(2, 7), prec="exact")
        polys = [rp.p, rp.q, rp.u, rp.v]
        rows = _make_rows(polys, rp.w, n, rp.drummond_length + 1, F(0))
        for k in range(1, 21):
            coeff_step(rows)
            for i, pl in enumerate(polys):
                assert rows.row(i) == coeff_row(pl, n, k)

    def test_kernel_rows_match_definition(self):
        cur = drummond_cursor(H2F0, F(-2), prec="exact")
        rp = recurrence_polys(H2F0, F(-2), prec="exact")
        for k in range(1, 8):
            drummond_step(cur)
            assert cur.rows.row(0) == coeff_row(rp.p, 0, k)
            assert cur.rows.row(1) == coeff_row(rp.q, 0, k)


class TestStep:
    def test_first_step(self):
        cur = drummond_cursor(H2F0, F(-2), prec="exact")
        drummond_step(cur)
        assert cur.value == F(3, 5)

    def test_mu_is_denominator_ratio(self):
        z = F(-2)
        om = remainder_estimates(H2F0, z, OmegaKind.A_NP1, 20, prec="exact")

        def D(k):
            return sum((-1) ** (k - j) * comb(k, j) / om[j] for j in range(k + 1))

        cur = drummond_cursor(H2F0, z, prec="exact")
        for k in range(1, 12):
            drummond_step(cur)
            assert cur.mu[0] == D(k - 1) / D(k)

    def test_converges_to_target(self):
        cur = drummond_cursor(H2F0, -2)
        drummond_run(cur)
        assert cur.status is Status.CONVERGED
        assert abs(cur.value - TARGET) / TARGET <= 1e-13
        assert 100 <= cur.k <= 200

    def test_window_constant(self):
        cur = drummond_cursor(HyperParams((F(1, 2), 2), (F(3, 2),)), 0.3)
        shapes = (cur.mu.shape, cur.T.shape, cur.rows.rows.shape)
        drummond_iterate(cur, 50)
        assert (cur.mu.shape, cur.T.shape, cur.rows.rows.shape) == shapes

    def test_overflow_status(self):
        cur = drummond_cursor(H2F0, 1e305)
        drummond_iterate(cur, 200)
        assert cur.status is Status.OVERFLOW
        assert np.isfinite(complex(cur.value))

    def test_zero_denominator_status(self):
        cur = drummond_cursor(HyperParams((-3,), ()), 0.5)
        drummond_iterate(cur, 10)
        assert cur.status is Status.ZERO_DENOMINATOR

    def test_step_after_stop_rejected(self):
        cur = drummond_cursor(H2F0, -2)
        drummond_run(cur)
        with pytest.raises(RuntimeError):
            drummond_step(cur)

    def test_compiled_and_interpreted_agree(self):
        a = drummond_cursor(H2F0, -1.5 + 0.5j)
        b = drummond_cursor(H2F0, -1.5 + 0.5j)
        a.mu = a.mu.astype(object)
        a.T = a.T.astype(object)
        for name in ("polys", "rows", "prev", "inh"):
            setattr(a.rows, name, getattr(a.rows, name).astype(object))
        a.aux = a.aux.astype(object)
        assert not a.compiled and b.compiled
        drummond_iterate(a, 30)
        drummond_iterate(b, 30)
        assert abs(complex(a.value) - b.value) <= 1e-14 * abs(b.value)


def _random_case(rng):
    def par():
        return F(rng.randint(1, 30), rng.randint(1, 8)) * rng.choice([1, 1, -1])

    p, q = rng.randint(0, 2), rng.randint(0, 2)
    alpha = tuple(par() for _ in range(p))
    beta = tuple(abs(par()) for _ in range(q))
    z = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
    return HyperParams(alpha, beta), z


@pytest.mark.parametrize("seed", range(8))
def test_matches_direct_formula_extended(seed):
    rng = random.Random(seed)
    h, z = _random_case(rng)
    omega = rng.choice([OmegaKind.A_N, OmegaKind.A_NP1, OmegaKind.N_GAMMA_AN])
    try:
        cur = drummond_cursor(h, z, omega, prec=113, gamma=2)
    except (ZeroDivisionError, ValueError):
        pytest.skip("degenerate remainder estimate")
    with mpmath.workprec(113):
        for k in range(1, 9):
            drummond_step(cur)
            if cur.status is not Status.RUNNING:
                break
            ref = drummond_direct(h, z, 0, k, omega, prec=113, gamma=2)
            assert abs(cur.value - ref) <= 1e-10 * abs(ref)


def test_series_start():
    s, om = series_start(H2F0, F(-2), OmegaKind.A_NP1, 2, prec="exact")
    assert (s, om) == (7, -48)


def test_cursor_type():
    assert isinstance(drummond_cursor(H2F0, -2), TransformCursor)
