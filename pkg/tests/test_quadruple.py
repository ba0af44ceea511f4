"""
Tests for admissible quadruples and the two constructions from realizations.
"""
import numpy as np
import pytest

from src.models.exceptions import DimensionError, PositivityError
from src.services.quadruple import (
    AdmissibleQuadruple,
    check_admissible,
    empty_quadruple,
    from_continuous,
    from_discrete,
    identity_residual,
    normalize_s0,
    quadruple_distance,
    signature_matrix,
)

SQRT3 = np.sqrt(3.0)


def test_signature_matrix():
    np.testing.assert_array_equal(signature_matrix(2, 1), np.diag([1, 1, -1]))


def test_sech_quadruple(sech_realization):
    q = from_continuous(sech_realization.A, sech_realization.B, sech_realization.C, np.eye(1))
    expected = AdmissibleQuadruple.create([[1j]], [[1.0]], [[1.0]], [[1.0]])
    assert quadruple_distance(q, expected) == pytest.approx(0.0, abs=1e-15)
    assert q.strongly_admissible


def test_sqrt3_quadruple(sqrt3_realization):
    r = sqrt3_realization
    q = from_discrete(r.A, r.B, r.C, np.eye(1))
    assert q.alpha[0, 0] == pytest.approx(2j)
    assert q.theta1[0, 0] == pytest.approx(SQRT3)
    assert q.theta2[0, 0] == pytest.approx(1j)


def test_admissibility_report(two_by_two_quadruple):
    report = check_admissible(two_by_two_quadruple)
    assert report.admissible
    assert report.strongly_admissible
    assert report.spectrum_in_upper_half_plane
    assert report.identity_residual == pytest.approx(0.0, abs=1e-14)
    assert not report.spectrum.contains_i


def test_broken_identity_is_reported():
    q = AdmissibleQuadruple.create([[1j]], [[1.0]], [[1.0]], [[0.5]])
    report = check_admissible(q)
    assert not report.admissible
    assert report.identity_residual == pytest.approx(0.75)


def test_shape_validation():
    with pytest.raises(DimensionError):
        AdmissibleQuadruple.create(np.eye(2), np.eye(2), np.ones((3, 1)), np.ones((2, 1)))


def test_from_continuous_needs_positive_x(sech_realization):
    r = sech_realization
    with pytest.raises(PositivityError):
        from_continuous(r.A, r.B, r.C, -np.eye(1))


def test_normalize_s0_preserves_identity(two_by_two_quadruple):
    T = np.array([[2.0, 0.5j], [0.0, 1.0]])
    S0 = T @ T.conj().T
    root = np.linalg.cholesky(S0)
    # Congruence by a square root of S0 keeps admissibility.
    q = AdmissibleQuadruple.create(
        root @ two_by_two_quadruple.alpha @ np.linalg.inv(root),
        S0,
        root @ two_by_two_quadruple.theta1,
        root @ two_by_two_quadruple.theta2,
    )
    assert identity_residual(q) < 1e-12
    normalized = normalize_s0(q)
    np.testing.assert_allclose(normalized.S0, np.eye(2))
    assert identity_residual(normalized) < 1e-12


def test_empty_quadruple():
    q = empty_quadruple(1, 2)
    assert (q.n, q.m1, q.m2) == (0, 1, 2)
    assert check_admissible(q).admissible


def test_distance_dimension_mismatch(two_by_two_quadruple):
    with pytest.raises(DimensionError):
        quadruple_distance(two_by_two_quadruple, empty_quadruple(1, 1))
