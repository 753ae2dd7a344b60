import numpy as np
import pytest

from hardyshift import (BudgetExceeded, build_sigma, apply_matrix, shift_pow,
                        t_m_apply, t_m_invert, taylor, vector,
                        check_shift_diagram)
from hardyshift.series import allclose, sub, zero

from conftest import random_vector

CAP = 128


def test_lift_basic_interleave():
    F = vector([taylor([1], CAP), taylor([1], CAP)])
    assert allclose(t_m_apply(F), taylor([1, 1], CAP))


def test_lift_hand_example():
    # (a + b z, c) with a=1, b=4, c=7 interleaves to 1 + 7z + 4z^2
    F = vector([taylor([1, 4], CAP), taylor([7], CAP)])
    assert allclose(t_m_apply(F), taylor([1, 7, 4], CAP))


def test_lift_m3_monomials():
    F = vector([taylor([1], CAP), taylor([0, 1], CAP), taylor([0, 1], CAP)])
    out = t_m_apply(F)
    expected = np.zeros(6)
    expected[0] = 1
    expected[4] = 1
    expected[5] = 1
    assert allclose(out, taylor(expected, CAP))


def test_invert_examples():
    back = t_m_invert(taylor([1, 1], CAP), 2)
    assert allclose(back.components[0], taylor([1], CAP))
    assert allclose(back.components[1], taylor([1], CAP))

    back = t_m_invert(taylor([1, 7, 4], CAP), 2)
    assert allclose(back.components[0], taylor([1, 4], CAP))
    assert allclose(back.components[1], taylor([7], CAP))

    back = t_m_invert(taylor([0, 0, 0, 0, 0, 1], CAP), 3)
    assert back.components[0].is_zero()
    assert back.components[1].is_zero()
    assert allclose(back.components[2], taylor([0, 1], CAP))


def test_roundtrip_exact(rng):
    for m in (2, 3, 5):
        F = random_vector(rng, m, 17, CAP)
        G = t_m_invert(t_m_apply(F), m)
        for a, b in zip(F.components, G.components):
            assert allclose(a, b)
        f = t_m_apply(F)
        assert allclose(t_m_apply(t_m_invert(f, m)), f)


def test_isometry(rng):
    for m in (2, 3, 5):
        F = random_vector(rng, m, 20, CAP)
        assert t_m_apply(F).norm() == pytest.approx(F.norm(), rel=1e-14)


def test_shift_diagram_residual_zero(rng):
    assert check_shift_diagram(vector([taylor([1], CAP), taylor([1], CAP)]), 2) == 0.0
    F = random_vector(rng, 3, 15, CAP)
    assert check_shift_diagram(F, 3) < 1e-14
    F = vector([taylor([0, 1], CAP), zero(CAP), taylor([1], CAP)])
    assert check_shift_diagram(F, 3) == 0.0


def test_budget_guard():
    # index of component 1 at degree 2 is 2*2 + 1 = 5 > cap 4
    small = vector([taylor([0], 4), taylor([0, 0, 1], 4)])
    with pytest.raises(BudgetExceeded):
        t_m_apply(small)
    # degree 2 in component 0 lands exactly on the cap
    ok = vector([taylor([0, 0, 1], 4), taylor([0], 4)])
    assert t_m_apply(ok).deg() == 4


def test_multiplication_correspondence(rng):
    # lift(Sigma F) equals the (k*m + gamma)-fold shift of lift(F)
    for m, gamma, k in ((2, 1, 1), (3, 2, 1), (5, 3, 2)):
        F = random_vector(rng, m, 10, CAP)
        sigma = build_sigma(m, gamma, k)
        lhs = t_m_apply(apply_matrix(sigma, F))
        rhs = shift_pow(t_m_apply(F), k * m + gamma)
        assert sub(lhs, rhs).norm() < 1e-12
