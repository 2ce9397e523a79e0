import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mconvex.errors import DimensionMismatch, NonHermitianInput, NotCommuting
from mconvex.linalg import (
    OperatorTuple,
    commutant_dimension,
    constant_diagonal_form,
    direct_sum,
    herm_part,
    numerical_radius,
    op_norm,
    random_hermitian,
    random_isometry,
    simdiag_hermitian,
    skew_part,
    words_equivalent,
)

X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
Z = np.diag([1.0, -1.0]).astype(complex)


def test_herm_skew_decomposition():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h, s = herm_part(m), skew_part(m)
    np.testing.assert_allclose(h, h.conj().T)
    np.testing.assert_allclose(s, s.conj().T)
    np.testing.assert_allclose(h + 1j * s, m)


def test_numerical_radius_nilpotent():
    s = np.array([[0.0, 2.0], [0.0, 0.0]], dtype=complex)
    assert numerical_radius(s) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("c", [0.5, 1.0, 3.0, 1 + 1j])
def test_numerical_radius_rank_one(c):
    m = np.array([[0.0, c], [0.0, 0.0]], dtype=complex)
    assert numerical_radius(m) == pytest.approx(abs(c) / 2.0, abs=1e-9)


def test_numerical_radius_hermitian_is_norm():
    rng = np.random.default_rng(1)
    m = random_hermitian(5, rng)
    assert numerical_radius(m) == pytest.approx(op_norm(m), abs=1e-8)


def test_operator_tuple_validation():
    with pytest.raises(NonHermitianInput):
        OperatorTuple((np.array([[0.0, 1.0], [0.0, 0.0]]),), hermitian=True)
    with pytest.raises(DimensionMismatch):
        OperatorTuple((X, np.eye(3, dtype=complex)), hermitian=True)


def test_operator_tuple_scaled_shifted():
    t = OperatorTuple((X, Z), hermitian=True)
    assert op_norm(t.scaled(0.5).mats[0] - X / 2) < 1e-15
    shifted = t.shifted([1.0, -1.0])
    np.testing.assert_allclose(shifted.mats[0], X - np.eye(2))
    np.testing.assert_allclose(shifted.mats[1], Z + np.eye(2))


def test_direct_sum_shapes():
    t = direct_sum(
        OperatorTuple((X, Z), hermitian=True),
        OperatorTuple((Z, X), hermitian=True),
    )
    assert t.n == 4 and t.d == 2
    np.testing.assert_allclose(t.mats[0][:2, :2], X)
    np.testing.assert_allclose(t.mats[0][2:, 2:], Z)


def test_commutant_dimensions():
    assert commutant_dimension(OperatorTuple((X, Z), hermitian=True)) == 1
    assert commutant_dimension(OperatorTuple((np.eye(2, dtype=complex),), hermitian=True)) == 4
    assert commutant_dimension(OperatorTuple((Z,), hermitian=True)) == 2
    doubled = OperatorTuple(
        (np.kron(np.eye(2), X), np.kron(np.eye(2), Z)), hermitian=True
    )
    assert commutant_dimension(doubled) == 4


def test_words_equivalent_hadamard():
    h = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2)
    t1 = OperatorTuple((X, Z), hermitian=True)
    t2 = OperatorTuple((h @ X @ h.conj().T, h @ Z @ h.conj().T), hermitian=True)
    assert words_equivalent(t1, t2)
    assert not words_equivalent(t1, OperatorTuple((X, X), hermitian=True))


def test_simdiag_planted():
    rng = np.random.default_rng(7)
    g = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    u, _ = np.linalg.qr(g)
    d1 = np.array([0.0, 0.0, 1.0, 1.0, 2.0, 3.0])
    d2 = np.array([0.0, 1.0, 0.0, 1.0, 2.0, 2.0])
    mats = [u @ np.diag(d) @ u.conj().T for d in (d1, d2)]
    q, vals = simdiag_hermitian(mats)
    for m, col in zip(mats, vals.T):
        np.testing.assert_allclose(
            q.conj().T @ m @ q, np.diag(col), atol=1e-10
        )
    got = sorted(map(tuple, np.round(vals, 8).tolist()))
    assert got == sorted(zip(d1, d2))


def test_simdiag_rejects_noncommuting():
    with pytest.raises(NotCommuting):
        simdiag_hermitian([X, np.diag([1.0, 2.0]).astype(complex)])


def test_constant_diagonal_form():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b, cert = constant_diagonal_form(m)
    assert cert.residual < 1e-10
    assert abs(b[0, 0] - np.trace(m) / 2) < 1e-10
    u = cert.u
    np.testing.assert_allclose(u.conj().T @ u, np.eye(2), atol=1e-12)
    np.testing.assert_allclose(u.conj().T @ m @ u, b, atol=1e-12)


def test_random_isometry_columns():
    rng = np.random.default_rng(5)
    v = random_isometry(6, 3, rng)
    np.testing.assert_allclose(v.conj().T @ v, np.eye(3), atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=6), st.integers(min_value=0, max_value=10**6))
def test_numerical_radius_unitary_invariance(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    u, _ = np.linalg.qr(g)
    w1 = numerical_radius(m, tol=1e-9)
    w2 = numerical_radius(u.conj().T @ m @ u, tol=1e-9)
    assert w1 == pytest.approx(w2, rel=1e-7, abs=1e-8)
