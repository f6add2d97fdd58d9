from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperratak.poly import DOUBLE_EPS, EXTENDED_PREC, Poly, delta, eps_for, gen_binom, gen_binom_inv, poch, poly_eval

small = st.floats(-5, 5, allow_nan=False)
cx = st.builds(complex, small, small)


def n_poly(*coeffs):
    return Poly(tuple(F(c) for c in coeffs))


class TestPoch:
    def test_empty_product(self):
        assert poch(3 + 4j, 0) == 1
        assert poch(F(-7, 3), 0) == 1

    def test_integer_and_half_integer(self):
        assert poch(1, 4) == 24
        assert poch(F(3, 2), 2) == F(15, 4)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            poch(1, -1)

    @given(cx, st.integers(0, 20))
    def test_step(self, x, m):
        assert abs(poch(x, m + 1) - poch(x, m) * (x + m)) <= 1e-12 * max(1, abs(poch(x, m + 1)))


class TestDelta:
    def test_constant_and_linear(self):
        assert delta(n_poly(7)).is_zero()
        assert delta(n_poly(0, 1)) == n_poly(1)

    def test_square(self):
        assert delta(n_poly(0, 0, 1)) == n_poly(1, 2)

    def test_matches_pointwise_difference(self):
        p = n_poly(3, -2, 5, 1)
        d = delta(p)
        for n in range(6):
            assert poly_eval(d, n) == poly_eval(p, n + 1) - poly_eval(p, n)

    @given(st.lists(st.integers(-20, 20), min_size=2, max_size=9).filter(lambda c: c[-1] != 0))
    def test_degree_law(self, coeffs):
        p = n_poly(*coeffs)
        assert delta(p).degree == p.degree - 1
        for _ in range(p.degree + 1):
            p = delta(p)
        assert p.is_zero()


class TestEval:
    def test_values(self):
        assert poly_eval(Poly(()), 12.5) == 0
        assert poly_eval(n_poly(2, 1), 3) == 5
        z = -2
        p = Poly.from_roots([2, 2], lead=z)
        assert poly_eval(p, 1) == -18
        assert p(1) == -18


class TestGenBinom:
    def test_unit_vector(self):
        assert gen_binom([1, 0, 0, 0, 0], F(3, 2)) == [1, 1, 1, 1, 1]

    @given(st.lists(cx, min_size=1, max_size=8), st.sampled_from([0.5, 1.5, 2.0]))
    def test_first_entry(self, a, c):
        assert gen_binom(a, c)[0] == a[0]

    @pytest.mark.parametrize("c", [0.5, 1.5, 2.0])
    def test_round_trip(self, c):
        rng = np.random.default_rng(7)
        for length in (8, 12):
            a = list(rng.normal(size=length) + 1j * rng.normal(size=length))
            back = gen_binom_inv(gen_binom(a, c), c)
            scale = max(abs(x) for x in a)
            assert max(abs(x - y) for x, y in zip(back, a)) <= 1e-12 * scale

    def test_round_trip_exact(self):
        a = [F(1), F(-2, 3), F(5), F(0), F(7, 11)]
        assert gen_binom_inv(gen_binom(a, F(3, 2)), F(3, 2)) == a

    def test_inverse_rejects_pole(self):
        with pytest.raises(ValueError):
            gen_binom_inv([1, 2, 3], -1)


def test_precision_tiers():
    assert eps_for(None) == DOUBLE_EPS
    assert float(eps_for(EXTENDED_PREC)) == 2.0**-112
