import numpy as np
import pytest

from hardyshift import (DimensionMismatch, NotAnalytic, ParamOutOfRange,
                        adjoint_on_circle, apply_matrix, build_sigma,
                        diag_polys, from_poly_grid, identity, is_analytic,
                        is_inner, matmul, taylor, vector)
from hardyshift.laurent import LaurentMatrix, allclose, eval_at
from hardyshift.series import allclose as poly_close


def sampled_fourier(A, n_points=256):
    """Independent oracle: trapezoid Fourier coefficients from dense circle
    samples.  Returns a dict power -> coefficient matrix."""
    ts = 2 * np.pi * np.arange(n_points) / n_points
    zs = np.exp(1j * ts)
    samples = np.stack([eval_at(A, z) for z in zs])  # (n, rows, cols)
    out = {}
    half = n_points // 2
    for p in range(-half + 1, half):
        phases = np.exp(-1j * p * ts)
        out[p] = (samples * phases[:, None, None]).mean(axis=0)
    return out


def max_negative_mass_sampled(A):
    coeffs = sampled_fourier(A)
    return max(np.max(np.abs(mat)) for p, mat in coeffs.items() if p < 0)


def test_build_sigma_2_1_1_exact():
    sigma = build_sigma(2, 1, 1)
    expected = from_poly_grid([[[0], [0, 0, 1]], [[0, 1], [0]]])
    assert allclose(sigma, expected)


def test_build_sigma_3_1_1():
    sigma = build_sigma(3, 1, 1)
    expected = from_poly_grid([
        [[0], [0], [0, 0, 1]],
        [[0, 1], [0], [0]],
        [[0], [0, 1], [0]],
    ])
    assert allclose(sigma, expected)


def test_build_sigma_k2():
    sigma = build_sigma(2, 1, 2)
    expected = from_poly_grid([[[0], [0, 0, 0, 1]], [[0, 0, 1], [0]]])
    assert allclose(sigma, expected)


def test_build_sigma_param_validation():
    for bad in ((1, 1, 1), (3, 0, 1), (3, 3, 1), (3, 1, 0)):
        with pytest.raises(ParamOutOfRange):
            build_sigma(*bad)


def test_adjoint_involution_and_antihomomorphism(rng):
    def rand_matrix(rows, cols, band=4):
        tab = rng.standard_normal((rows, cols, 2 * band + 1)) \
            + 1j * rng.standard_normal((rows, cols, 2 * band + 1))
        return LaurentMatrix(rows, cols, -band, tab)

    A = rand_matrix(2, 3)
    B = rand_matrix(3, 2)
    assert allclose(adjoint_on_circle(adjoint_on_circle(A)), A, 1e-14)
    lhs = adjoint_on_circle(matmul(A, B))
    rhs = matmul(adjoint_on_circle(B), adjoint_on_circle(A))
    assert allclose(lhs, rhs, 1e-12)


def test_adjoint_examples():
    z = from_poly_grid([[[0, 1]]])
    adj = adjoint_on_circle(z)
    assert adj.min_pow == -1 and adj.table[0, 0, 0] == 1
    sig_adj = adjoint_on_circle(build_sigma(2, 1, 1))
    expected = LaurentMatrix(2, 2, -2, np.array(
        [[[0, 0], [0, 1]], [[1, 0], [0, 0]]], dtype=complex))
    assert allclose(sig_adj, expected)


def test_matmul_sigma_isometry():
    sigma = build_sigma(2, 1, 1)
    assert allclose(matmul(adjoint_on_circle(sigma), sigma), identity(2), 1e-15)


def test_matmul_identity(rng):
    tab = rng.standard_normal((2, 2, 5)) + 1j * rng.standard_normal((2, 2, 5))
    A = LaurentMatrix(2, 2, -2, tab)
    assert allclose(matmul(A, identity(2)), A, 1e-14)


def test_matmul_dimension_check():
    with pytest.raises(DimensionMismatch):
        matmul(identity(2), identity(3))


def test_theta_column_isometry():
    # (z, z)^T / sqrt(2): Theta* Theta = [1]
    theta = from_poly_grid([[[0, 2 ** -0.5]], [[0, 2 ** -0.5]]])
    prod = matmul(adjoint_on_circle(theta), theta)
    assert allclose(prod, identity(1), 1e-15)
    assert is_inner(theta, 1e-14)


def test_is_inner_rejects_non_isometry():
    theta = from_poly_grid([[[1]], [[1]]])
    assert not is_inner(theta, 1e-12)
    assert is_inner(from_poly_grid([[[0, 0, 1]], [[0]]]), 1e-14)
    # (1, 2)^T / sqrt(5)
    theta = from_poly_grid([[[5 ** -0.5]], [[2 * 5 ** -0.5]]])
    assert is_inner(theta, 1e-14)


def test_is_inner_requires_analytic():
    bad = LaurentMatrix(1, 1, -1, np.array([[[1.0, 0.0]]], dtype=complex))
    with pytest.raises(NotAnalytic):
        is_inner(bad, 1e-12)


def test_is_analytic_reports_witness():
    bad = LaurentMatrix(1, 1, -1, np.array([[[1.0, 0.0]]], dtype=complex))
    chk = is_analytic(bad, 1e-10)
    assert not chk.ok
    assert chk.witness == pytest.approx(1.0)
    assert chk.location == (0, 0, -1)


def test_analyticity_agrees_with_sampling_oracle():
    sigma = build_sigma(2, 1, 1)
    theta = from_poly_grid([[[0, 2 ** -0.5]], [[0, 2 ** -0.5]]])
    prod = matmul(matmul(adjoint_on_circle(theta), sigma), theta)
    # exact check says analytic with witness 0, product (z + z^2)/2
    chk = is_analytic(prod, 1e-10)
    assert chk.ok
    assert max_negative_mass_sampled(prod) < 1e-8
    expected = from_poly_grid([[[0, 0.5, 0.5]]])
    assert allclose(prod, expected, 1e-15)

    # a genuinely non-analytic product is caught by both routes
    theta_bad = diag_polys([[0, 0, 0, 0, 1], [0, 1]])  # diag(z^4, z): j-k = 3
    prod_bad = matmul(matmul(adjoint_on_circle(theta_bad), sigma), theta_bad)
    chk_bad = is_analytic(prod_bad, 1e-10)
    assert not chk_bad.ok
    assert max_negative_mass_sampled(prod_bad) > 0.5


def test_apply_matrix_examples():
    sigma = build_sigma(2, 1, 1)
    F = vector([taylor([1], 16), taylor([0], 16)])
    out = apply_matrix(sigma, F)
    assert out.components[0].is_zero()
    assert poly_close(out.components[1], taylor([0, 1], 16))

    F = vector([taylor([1], 16), taylor([1], 16), taylor([1], 16)])
    out = apply_matrix(build_sigma(3, 1, 1), F)
    assert poly_close(out.components[0], taylor([0, 0, 1], 16))
    assert poly_close(out.components[1], taylor([0, 1], 16))
    assert poly_close(out.components[2], taylor([0, 1], 16))


def test_apply_matrix_identity_and_isometry(rng):
    from conftest import random_vector

    F = random_vector(rng, 2, 6, 32)
    out = apply_matrix(identity(2), F)
    for a, b in zip(out.components, F.components):
        assert poly_close(a, b)
    out = apply_matrix(build_sigma(2, 1, 2), F)
    assert out.norm() == pytest.approx(F.norm(), rel=1e-14)


def test_apply_matrix_rejects_nonanalytic():
    bad = LaurentMatrix(1, 1, -1, np.array([[[1.0, 0.0]]], dtype=complex))
    with pytest.raises(NotAnalytic):
        apply_matrix(bad, vector([taylor([1], 8)]))


def test_sigma_is_inner_for_all_small_parameters():
    for m in range(2, 7):
        for gamma in range(1, m):
            for k in range(1, 4):
                assert is_inner(build_sigma(m, gamma, k), 1e-14)
