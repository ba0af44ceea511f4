"""
Tests for the dense matrix kernel.
"""
import math

import numpy as np
import pytest

from src.models.exceptions import DimensionError, DomainError, PositivityError, SingularMatrixError, SolverError
from src.services.matcore import (
    as_cmatrix,
    expm,
    gramian_integral,
    gramian_integral_quadrature,
    hermitian_sqrt,
    is_positive_definite,
    lambda_min,
    matrix_power,
    operator_norm,
    propagator_and_gramian,
    solve_linear,
    spectrum,
)


def test_as_cmatrix_promotes_scalars():
    M = as_cmatrix(2.5)
    assert M.shape == (1, 1)
    assert M.dtype == complex


@pytest.mark.parametrize("bad", [np.ones(3), [[np.nan]], [[np.inf, 0.0]]])
def test_as_cmatrix_rejects(bad):
    with pytest.raises(DimensionError):
        as_cmatrix(bad)


def test_expm_diagonal():
    M = np.diag([1j, -2.0])
    np.testing.assert_allclose(expm(M), np.diag([np.exp(1j), np.exp(-2.0)]), atol=1e-14)


def test_expm_overflow_is_solver_error():
    with pytest.raises(SolverError):
        expm(np.array([[1000.0]]))


def test_spectrum_of_empty_matrix():
    spec = spectrum(np.zeros((0, 0)))
    assert spec.order == 0
    assert spec.min_imag() == math.inf
    assert spec.distance_to(1j) == math.inf


def test_spectrum_contains():
    spec = spectrum(np.diag([1j, 2.0]))
    assert spec.contains(1j, 1e-12)
    assert not spec.contains(-1j, 1e-12)
    assert spec.min_imag() == pytest.approx(0.0)
    assert spec.max_imag() == pytest.approx(1.0)


def test_positive_definite_check():
    assert is_positive_definite(np.array([[2.0, 1.0], [1.0, 2.0]]))
    check = is_positive_definite(np.array([[1.0, 2.0], [2.0, 1.0]]))
    assert not check
    assert check.reason == "non_positive_pivot"
    assert is_positive_definite(np.array([[1.0, 1.0], [0.0, 1.0]])).reason == "not_hermitian"
    assert is_positive_definite(np.zeros((0, 0))).reason == "empty"


def test_solve_linear_singular():
    with pytest.raises(SingularMatrixError):
        solve_linear(np.array([[1.0, 1.0], [1.0, 1.0]]), np.eye(2))


def test_solve_linear_vector_rhs():
    x = solve_linear(np.diag([2.0, 4.0]), np.array([2.0, 2.0]))
    np.testing.assert_allclose(x, [1.0, 0.5])


def test_hermitian_sqrt_roundtrip():
    H = np.array([[4.0, 1j], [-1j, 3.0]])
    root = hermitian_sqrt(H)
    np.testing.assert_allclose(root @ root, H, atol=1e-12)
    np.testing.assert_allclose(hermitian_sqrt(H, inverse=True) @ root, np.eye(2), atol=1e-12)
    with pytest.raises(PositivityError):
        hermitian_sqrt(-np.eye(2))


def test_matrix_power_negative():
    M = np.array([[2.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(matrix_power(M, -2) @ matrix_power(M, 2), np.eye(2), atol=1e-12)


def test_gramian_matches_quadrature():
    A = np.array([[-0.5 + 1j, 0.3], [0.0, -1.0 - 0.5j]])
    b = np.array([[1.0], [2.0 - 1j]])
    Q = b @ b.conj().T
    fast = gramian_integral(A, Q, 3.0)
    slow = gramian_integral_quadrature(A, Q, 3.0, samples=4001)
    assert operator_norm(fast - slow) <= 1e-9 * operator_norm(slow)


def test_gramian_scalar_closed_form():
    # int_0^x e^{2at} dt = (e^{2ax} - 1) / 2a
    a, x = 0.7, 2.0
    G = gramian_integral(np.array([[a]]), np.array([[1.0]]), x)
    assert G[0, 0].real == pytest.approx((math.exp(2 * a * x) - 1) / (2 * a), rel=1e-12)


def test_gramian_doubling_keeps_propagator():
    A = np.array([[0.0, 3.0], [-3.0, 0.0]])
    E, G = propagator_and_gramian(A, np.eye(2), 5.0)
    np.testing.assert_allclose(E, expm(5.0 * A), atol=1e-10)
    assert lambda_min(G) > 0


def test_gramian_negative_x():
    with pytest.raises(DomainError):
        gramian_integral(np.eye(1), np.eye(1), -1.0)
