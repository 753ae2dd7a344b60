import numpy as np
import pytest

from hardyshift import (NoConvergence, NotAMember, build_j_map, certify_theta,
                        extract_kernels, from_poly_grid, hitt_decompose,
                        identity, monomial, orthonormalize, taylor)
from hardyshift.series import allclose, shift_pow, sub
from hardyshift.subspaces import flatten_element
from hardyshift.veclift import vec_inner, vector

CAP = 48

SQRT2 = np.sqrt(2.0)
SQRT5 = np.sqrt(5.0)
SQRT6 = np.sqrt(6.0)
SQRT30 = np.sqrt(30.0)


def span(*coeff_lists, label=""):
    return orthonormalize([taylor(c, CAP) for c in coeff_lists], label=label)


def close_up_to_phase(f, g, tol=1e-10):
    return min(sub(f, g).norm(), sub(f, (-1) * g).norm()) < tol


def test_extract_kernels_degenerate_second_entry():
    M = span([1, 1], [0, 0, 1, 1])
    E = extract_kernels(M, 2)
    assert E.degenerate == (False, True)
    assert allclose(E.entries[0], taylor(np.array([1, 1]) / SQRT2, CAP), 1e-12)
    assert E.entries[1].is_zero()


def test_extract_kernels_two_entries():
    M = span([1, 1, 1], [0, 1, 2])
    E = extract_kernels(M, 2)
    assert E.degenerate == (False, False)
    assert allclose(E.entries[0], taylor(np.array([5, 2, -1]) / SQRT30, CAP), 1e-12)
    assert allclose(E.entries[1], taylor(np.array([0, 1, 2]) / SQRT5, CAP), 1e-12)


def brute_force_kernel_oracle(gen_rows, m=2, cap=CAP):
    """Plain numpy re-derivation: project monomials onto
    M ⊖ (M ∩ z^m H^2), then classical Gram-Schmidt, no package calls."""
    G = np.zeros((len(gen_rows), cap + 1), dtype=complex)
    for i, row in enumerate(gen_rows):
        G[i, : len(row)] = row
    # orthonormal frame of the span
    q, r = np.linalg.qr(G.conj().T)
    rank = np.sum(np.abs(np.diag(r)) > 1e-10)
    frame = q[:, :rank]
    # intersection with z^m H^2: combinations with first m coefficients zero
    head = frame[:m, :]
    _, s, vh = np.linalg.svd(head)
    null = vh[np.sum(s > 1e-10):].conj().T
    inner_frame = frame @ null
    # complement within the span
    proj = frame @ frame.conj().T - inner_frame @ inner_frame.conj().T
    entries = []
    kept = []
    for i in range(m):
        e = np.zeros(cap + 1, dtype=complex)
        e[i] = 1
        w = proj @ e
        for u in kept:
            w = w - np.vdot(u, w) * u
        n = np.linalg.norm(w)
        if n < 1e-9:
            entries.append(np.zeros(cap + 1, dtype=complex))
        else:
            w = w / n
            lead = w[np.flatnonzero(np.abs(w) > 1e-12)[0]]
            w = w * np.conj(lead) / abs(lead)
            kept.append(w)
            entries.append(w)
    return entries


def test_extract_kernels_matches_brute_force_oracle():
    gens = ([1, 1], [0, 1, 1], [0, 0, 0, 1, 1])
    E = extract_kernels(orthonormalize([taylor(g, CAP) for g in gens]), 2)
    oracle = brute_force_kernel_oracle(gens)
    # first entry also matches the closed form (2 - z)(1 + z)/sqrt(6)
    assert allclose(E.entries[0], taylor(np.array([2, 1, -1]) / SQRT6, CAP), 1e-12)
    for got, want in zip(E.entries, oracle):
        assert np.max(np.abs(got.padded(CAP + 1) - want)) < 1e-10
    # the oracle value is z(1 + z)/sqrt(2); the commonly quoted value
    # z(1 + 2z)/sqrt(2) is not even normalized, so flag the difference
    quoted = taylor(np.array([0, 1, 2]) / SQRT2, CAP)
    assert abs(quoted.norm() - 1.0) > 0.5
    assert sub(E.entries[1], quoted).norm() > 0.5
    assert allclose(E.entries[1], taylor(np.array([0, 1, 1]) / SQRT2, CAP), 1e-10)


def test_extract_kernels_all_zero_column():
    M = span([0, 0, 1, 1])  # inside z^2 H^2
    E = extract_kernels(M, 2)
    assert E.degenerate == (True, True)


def test_hitt_decompose_two_rows():
    M = span([1, 1], [0, 0, 1, 1])
    E = extract_kernels(M, 2)
    f = taylor([1, 1, 1, 1], CAP)  # (1+z)(1+z^2)
    dec = hitt_decompose(f, M, E, 2)
    assert dec.iterations == 2
    assert np.allclose(dec.rows[:, 0], [SQRT2, SQRT2])
    assert np.allclose(dec.rows[:, 1], 0)
    assert allclose(dec.phi.components[0], taylor([SQRT2, SQRT2], CAP), 1e-12)
    assert dec.reconstruction_error < 1e-12
    assert dec.parseval_gap < 1e-12


def test_hitt_decompose_kernel_entry_is_one_step():
    M = span([1, 1, 1], [0, 1, 2])
    E = extract_kernels(M, 2)
    dec = hitt_decompose(E.entries[0], M, E, 2)
    assert dec.iterations == 1
    assert np.allclose(dec.rows, [[1, 0]])


def test_hitt_decompose_agrees_with_linear_solve_oracle(rng):
    M = span([1, 1], [0, 0, 1, 1])
    E = extract_kernels(M, 2)
    f = M.member_from_coords([0.3 - 1j, 2.2 + 0.5j])
    dec = hitt_decompose(f, M, E, 2)
    # oracle: least-squares solve of f = sum_l z^(2l) A(l).E in coefficients
    cols = []
    keys = []
    for l in range((CAP // 2) + 1):
        for i in E.active_indices:
            if E.entries[i].deg() + 2 * l > CAP:
                continue
            cols.append(flatten_element(shift_pow(E.entries[i], 2 * l), CAP))
            keys.append((l, i))
    A = np.column_stack(cols)
    sol, *_ = np.linalg.lstsq(A, flatten_element(f, CAP), rcond=None)
    recon = A @ sol
    assert np.linalg.norm(recon - flatten_element(f, CAP)) < 1e-10
    for (l, i), c in zip(keys, sol):
        got = dec.rows[l, i] if l < dec.rows.shape[0] else 0.0
        assert abs(got - c) < 1e-8


def test_hitt_decompose_rejects_non_members():
    M = span([1, 1])
    E = extract_kernels(M, 2)
    with pytest.raises(NotAMember):
        hitt_decompose(monomial(5, CAP), M, E, 2)


def test_hitt_decompose_flags_uncaptured_mass():
    # span{z^2(1+z)} is not nearly co-invariant at arity 2: the peeled
    # remainder 1+z cannot be absorbed by an all-zero kernel column
    M = span([0, 0, 1, 1])
    E = extract_kernels(M, 2)
    with pytest.raises(NoConvergence):
        hitt_decompose(M.frame[0], M, E, 2)


def test_build_j_map_constants():
    M = span([1, 1, 1], [0, 1, 2])
    res = build_j_map(M, 2)
    assert res.space.dim == 2
    assert res.isometry_gap < 1e-12
    assert res.costable.passed
    # the coordinates of a 2-dim decomposable span are the constants in C^2
    for w in res.space.frame:
        assert all(c.deg() <= 0 for c in w.components)


def test_build_j_map_monomial_coordinates():
    M = span([1, 1], [0, 0, 1, 1])
    res = build_j_map(M, 2)
    assert res.space.dim == 2
    # frame coordinates span {(a + b z, 0)}
    want0 = vector([taylor([1], CAP), taylor([0], CAP)])
    want1 = vector([taylor([0, 1], CAP), taylor([0], CAP)])
    got = res.space.frame
    gram = np.array([[vec_inner(a, b) for b in (want0, want1)] for a in got])
    u, s, vh = np.linalg.svd(gram)
    assert np.all(s > 1 - 1e-10)


def test_build_j_map_isometry_on_three_generators():
    M = span([1, 1], [0, 1, 1], [0, 0, 0, 1, 1])
    res = build_j_map(M, 2)
    assert res.space.dim == 3
    assert res.isometry_gap < 1e-10
    assert res.costable.passed


def test_certify_theta_degenerate_kernel():
    M = span([1, 1], [0, 0, 1, 1])
    theta = from_poly_grid([[[0, 0, 1]], [[0]]])  # (z^2, 0)^T
    rep = certify_theta(M, 2, 1, 1, theta)
    assert rep.passed
    # the conjugated product is identically zero
    assert not np.any(rep.product.table)


def test_certify_theta_two_entry_kernel():
    M = span([1, 1, 1], [0, 1, 2])
    theta = from_poly_grid([[[0, 1 / SQRT2]], [[0, 1 / SQRT2]]])
    rep = certify_theta(M, 2, 1, 1, theta)
    assert rep.passed
    assert rep.product.min_pow == 1
    assert np.allclose(rep.product.table[0, 0], [0.5, 0.5])


def test_certify_theta_fails_for_full_identity():
    # identity matrix leaves a zero model space; a nonzero span cannot sit in it
    M = span([1, 1, 1], [0, 1, 2])
    rep = certify_theta(M, 2, 1, 1, identity(2))
    assert not rep.passed
    assert rep.stage("coords_in_model_space").verdict == "FAIL"
    assert rep.stage("theta_inner").verdict == "PASS"
