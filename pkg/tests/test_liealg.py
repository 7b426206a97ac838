import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gospace.liealg import (
    FAMILIES,
    AlgebraElement,
    build_algebra,
    bracket,
    expected_dim,
    inner,
    invariance_residual,
    jacobi_residual,
    mat_exp,
    nullspace_in_subspace,
    quat_left,
    realify,
)

# (family, n) pairs whose ambient size stays at or below 30
SMALL = [("so", n) for n in range(2, 8)] + [("su", n) for n in range(2, 6)] \
    + [("u", n) for n in range(1, 5)] + [("sp", n) for n in range(1, 4)]


@pytest.mark.parametrize("family,n", SMALL)
def test_dimension_and_frame(family, n):
    g = build_algebra(family, n)
    assert g.dim == expected_dim(family, n)
    assert g.gram_residual() < 1e-12
    assert g.closure_residual() < 1e-12
    # basis matrices are exactly skew
    assert np.max(np.abs(g.basis + np.swapaxes(g.basis, 1, 2))) == 0.0


def test_expected_dims():
    assert [expected_dim("so", n) for n in (3, 5)] == [3, 10]
    assert expected_dim("su", 3) == 8
    assert expected_dim("u", 2) == 4
    assert expected_dim("sp", 2) == 10


def test_so3_commutator_oracle():
    # L_x = E_32 - E_23 etc. satisfy [L_x, L_y] = L_z
    g = build_algebra("so", 3)
    Lx = np.array([[0, 0, 0], [0, 0, -1], [0, 1, 0]], float)
    Ly = np.array([[0, 0, 1], [0, 0, 0], [-1, 0, 0]], float)
    Lz = np.array([[0, -1, 0], [1, 0, 0], [0, 0, 0]], float)
    z = g.bracket(g.coeffs(Lx), g.coeffs(Ly))
    np.testing.assert_allclose(g.matrix(z), Lz, atol=1e-15)
    assert g.inner(g.coeffs(Lx), g.coeffs(Lx)) == pytest.approx(2.0)


def test_realify_is_a_homomorphism(rng):
    A = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    B = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
    np.testing.assert_allclose(realify(A @ B), realify(A) @ realify(B), atol=1e-12)


def test_quaternion_units():
    one, i, j, k = (quat_left(*e) for e in np.eye(4))
    np.testing.assert_array_equal(i @ j, k)
    np.testing.assert_array_equal(i @ i, -one)
    np.testing.assert_array_equal(j @ k, i)


@pytest.mark.parametrize("family,n", [("so", 5), ("su", 3), ("sp", 2), ("u", 3)])
def test_axioms_random(family, n, rng):
    g = build_algebra(family, n)
    for _ in range(5):
        x, y, z = g.random(rng, 3)
        assert jacobi_residual(g, x, y, z) < 1e-10
        assert invariance_residual(g, x, y, z) < 1e-10


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(SMALL), st.integers(0, 2**31 - 1))
def test_axioms_property(fn, seed):
    g = build_algebra(*fn)
    x, y, z = g.random(np.random.default_rng(seed), 3)
    assert jacobi_residual(g, x, y, z) < 1e-10
    assert invariance_residual(g, x, y, z) < 1e-10
    # antisymmetry
    assert np.max(np.abs(g.bracket(x, y) + g.bracket(y, x))) < 1e-12


def test_membership_residual(rng):
    g = build_algebra("su", 3)
    assert g.membership_residual(g.matrix(g.random(rng))) < 1e-12
    # identity is not skew
    assert g.membership_residual(np.eye(6)) > 0.5


def test_unsupported():
    with pytest.raises(ValueError):
        build_algebra("g", 2)
    with pytest.raises(ValueError):
        build_algebra("so", 1)
    assert "so" in FAMILIES


def test_owner_mismatch(rng):
    a = build_algebra("so", 4)
    b = build_algebra("su", 2)
    X = a.element(a.random(rng))
    Y = b.element(b.random(rng))
    with pytest.raises(ValueError):
        bracket(X, Y)
    with pytest.raises(ValueError):
        inner(X, Y)


def test_element_api(rng):
    g = build_algebra("so", 3)
    X = g.element(g.random(rng))
    Y = g.element(g.random(rng))
    assert isinstance(bracket(X, Y), AlgebraElement)
    assert inner(X, Y) == pytest.approx(float(g.inner(X.coeffs, Y.coeffs)))


def test_nullspace_sp2_generic(rng):
    # centralizer of a generic element is a maximal torus
    g = build_algebra("sp", 2)
    X = g.element(g.random(rng))
    ker = nullspace_in_subspace(X, np.eye(g.dim))
    assert ker.shape[0] == 2


def test_nullspace_so4_torus():
    g = build_algebra("so", 4)
    M = np.zeros((4, 4))
    M[0, 1], M[1, 0] = -1.0, 1.0
    M[2, 3], M[3, 2] = -2.0, 2.0
    X = g.element(g.coeffs(M))
    assert nullspace_in_subspace(X, np.eye(g.dim)).shape[0] == 2


def test_nullspace_rejects_dependent_rows(rng):
    g = build_algebra("so", 3)
    X = g.element(g.random(rng))
    with pytest.raises(ValueError):
        nullspace_in_subspace(X, np.array([[1.0, 0, 0], [2.0, 0, 0]]))


def test_mat_exp_orthogonal(rng):
    g = build_algebra("sp", 2)
    M = g.matrix(g.random(rng))
    E = mat_exp(M, 3.7)
    np.testing.assert_allclose(E.T @ E, np.eye(E.shape[0]), atol=1e-12)
    assert np.linalg.det(E) == pytest.approx(1.0)
    np.testing.assert_allclose(mat_exp(M, 1.0) @ mat_exp(M, 2.0), mat_exp(M, 3.0), atol=1e-12)


def test_mat_exp_rotation():
    J = np.array([[0.0, -1.0], [1.0, 0.0]])
    t = 0.3
    expected = np.array([[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]])
    np.testing.assert_allclose(mat_exp(J, t), expected, atol=1e-15)


def test_mat_exp_bound():
    with pytest.raises(ValueError):
        mat_exp(np.array([[0.0, -1.0], [1.0, 0.0]]), 1e6)
