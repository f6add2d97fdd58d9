import numpy as np
import pytest

from hyperratak.hyperterm import HyperParams
from hyperratak.poles import (
    PencilCase,
    build_pencil,
    check_report,
    cross_check,
    denominator_poly,
    drummond_b_inverse,
    reciprocal_poles,
    standard_matrix,
    terminating_identity_check,
)
from fractions import Fraction as F

D0, D1, L0, L1 = PencilCase.DRUMMOND_0F0, PencilCase.DRUMMOND_1F0, PencilCase.DELTA_0F0, PencilCase.DELTA_1F0


class TestPencils:
    def test_one_by_one(self):
        p = build_pencil(D0, 0, 1)
        assert p.A.tolist() == [[1]] and p.B.tolist() == [[2]]
        assert np.allclose(reciprocal_poles(p), [0.5])

    def test_drummond1f0_shift_diagonal(self):
        alpha, k = 0.3, 6
        p = build_pencil(D1, 0, k, alpha)
        shifted = p.A - p.B  # eta = zeta - 1
        assert np.allclose(np.diag(shifted), [alpha - 1 + j for j in range(k)])

    def test_delta0f0_trace_k1(self):
        assert np.trace(standard_matrix(build_pencil(L0, 0, 1))) == pytest.approx(0.5)

    @pytest.mark.parametrize("n,k", [(0, 4), (2, 9), (1, 15)])
    def test_closed_form_b_inverse(self, n, k):
        p = build_pencil(D0, n, k)
        assert np.allclose(drummond_b_inverse(n, k) @ p.B, np.eye(k), atol=1e-12)

    def test_case_parsing(self):
        assert PencilCase.parse("Delta1F0") is L1
        with pytest.raises(ValueError):
            PencilCase.parse("bogus")

    def test_sorted_by_modulus(self):
        z = reciprocal_poles(build_pencil(D0, 1, 12))
        assert np.all(np.diff(np.abs(z)) <= 1e-15)
        assert len(z) == 12


class TestReports:
    def test_k1_bounds_tight(self):
        r = check_report(build_pencil(D0, 0, 1))
        assert r.passed
        margins = dict((name, m) for name, _, m in r.checks)
        assert abs(margins["lower_bound"]) < 1e-15 and abs(margins["upper_bound"]) < 1e-15

    def test_trace_identity(self):
        p = build_pencil(D0, 2, 10)
        assert np.trace(standard_matrix(p)) == pytest.approx(10 / 13, abs=1e-12)

    def test_delta1f0_alpha09(self):
        p = build_pencil(L1, 0, 20, 0.9)
        r = check_report(p)
        assert r.passed and len(r.reciprocal_poles) == 20
        assert cross_check(p)["jacobi"] <= 1e-8

    def test_delta1f0_jacobi_k3(self):
        z = np.sort(reciprocal_poles(build_pencil(L1, 0, 3, 0.5)).real)
        assert np.all((0 < z) & (z < 1))
        assert cross_check(build_pencil(L1, 0, 3, 0.5))["jacobi"] <= 1e-12

    def test_delta0f0_k5_range(self):
        rho = np.max(np.abs(reciprocal_poles(build_pencil(L0, 0, 5))))
        assert 1 / 10 <= rho <= 1 / 6

    def test_out_of_range_disables_checks(self):
        r = check_report(build_pencil(D1, 0, 5, 1.5))
        assert r.checks == []
        r = check_report(build_pencil(L1, 0, 5, 1.5))
        assert r.checks == []

    @pytest.mark.parametrize("n", [0, 1, 2])
    @pytest.mark.parametrize("k", [5, 10, 20])
    def test_theorem_grid(self, n, k):
        for case, alphas in ((D0, [None]), (L0, [None]), (D1, [0.5]), (L1, [-0.5, 0.5, 0.9])):
            for a in alphas:
                p = build_pencil(case, n, k, a)
                r = check_report(p)
                assert r.passed, (case, a, r.checks)
                assert all(v <= 1e-8 for v in cross_check(p, r.reciprocal_poles).values())


class TestDenominators:
    def test_recurrence_degree(self):
        c = denominator_poly(D0, 0, 6)
        assert len(c) == 7 and c[0] == (-1) ** 6

    @pytest.mark.parametrize("kind", ["drummond", "weniger"])
    @pytest.mark.parametrize(
        "params", [HyperParams((1, 1), ()), HyperParams((F(5, 4),), (F(3, 2),))]
    )
    def test_terminating_identity(self, kind, params):
        zs = [-2, -1, 0.5 + 0.5j]
        worst = max(terminating_identity_check(kind, params, 0, k, zs) for k in range(11))
        assert worst <= 1e-12

    def test_examples(self):
        h = HyperParams((1, 1), ())
        assert terminating_identity_check("drummond", h, 0, 3, [-2]) <= 1e-12
        assert terminating_identity_check("weniger", h, 0, 4, [-2]) <= 1e-12
        assert terminating_identity_check("drummond", h, 2, 0, [-2, 3]) <= 1e-30

    def test_zero_excluded(self):
        with pytest.raises(ValueError):
            terminating_identity_check("drummond", HyperParams((1, 1), ()), 0, 2, [0])
