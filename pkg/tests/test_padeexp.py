import cmath
import math
import time

import pytest
from hypothesis import given, strategies as st

from hyperratak.drummond import Status
from hyperratak.padeexp import PadeExpCursor, classical_pade_exp, pade_exp, unitarity_defect
from hyperratak.poly import DOUBLE_EPS

REFERENCE_1E9 = complex(0.8378871813609, 0.5458434494543802)


def test_zero():
    cur = PadeExpCursor(0j)
    for _ in range(10):
        cur.step()
        assert cur.R == 1
    assert pade_exp(0).value == 1


def test_first_order():
    cur = PadeExpCursor(1j).step()
    assert abs(cur.R - (0.6 + 0.8j)) < 1e-15


@pytest.mark.parametrize("z", [0.3, -0.7 + 0.2j, 0.5j, 1.0])
def test_classical_pade(z):
    cur = PadeExpCursor(z)
    for k in range(1, 6):
        cur.step()
        ref = classical_pade_exp(z, k)
        assert abs(cur.R - ref) <= 1e-13 * abs(ref)


@pytest.mark.parametrize("t", [1, 10, 1e3, 1e6])
def test_matches_exp(t):
    r = pade_exp(1j * t)
    assert r.status is Status.CONVERGED
    assert abs(r.value - cmath.exp(1j * t)) <= 1e-12


def test_unitarity_defect_values():
    assert unitarity_defect(1) == 0
    assert unitarity_defect(0.6 + 0.8j) < 1e-16
    assert unitarity_defect(2) == 1


def test_million():
    t0 = time.perf_counter()
    r = pade_exp(1e6j)
    elapsed = time.perf_counter() - t0
    assert abs(r.value - complex(math.cos(1e6), math.sin(1e6))) <= 1e-12
    assert unitarity_defect(r.value) <= 1e-11
    assert elapsed < 0.1


@given(st.floats(0.1, 2000.0))
def test_unitarity_statistical(t):
    cur = PadeExpCursor(1j * t)
    worst = 0.0
    for _ in range(int(t) + 20):
        cur.step()
        worst = max(worst, unitarity_defect(cur.R) / max(1, math.sqrt(cur.k)))
    assert worst <= 50 * DOUBLE_EPS


def test_real_axis_converges():
    r = pade_exp(5.0)
    assert abs(r.value - math.exp(5)) <= 1e-13 * math.exp(5)


def test_k_max():
    r = pade_exp(1e4j, k_max=100)
    assert r.status is Status.K_MAX_REACHED and not r.converged
    with pytest.raises(ValueError):
        pade_exp(1j, k_max=1)


@pytest.mark.slow
def test_billion():
    """Published digits, order window and unitarity at t = 1e9."""
    t0 = time.perf_counter()
    r = pade_exp(1e9j)
    elapsed = time.perf_counter() - t0
    assert abs(r.value - REFERENCE_1E9) <= 1e-11
    assert abs(r.k - 500_004_886) <= 5_000_049
    assert elapsed < 30
    # fails in double: measured 6.08e-12 (see README)
    assert unitarity_defect(r.value) <= 5e-12
