"""
Tests for state-space realizations: minimality, reduction, evaluation, similarity.
"""
import numpy as np
import pytest

from src.models.exceptions import DimensionError, PoleProximityError
from src.models.schemas import Convention
from src.services.matcore import operator_norm
from src.services.realization import (
    Realization,
    evaluate,
    is_controllable,
    is_minimal,
    is_observable,
    mcmillan_degree,
    minimal_realization,
    probe_points,
    similarity,
)
from src.utils.random_systems import random_minimal_realization, random_similarity


def test_block_sizes_follow_convention():
    r = Realization(np.zeros((2, 2)), np.ones((2, 1)), np.ones((3, 2)), Convention.CONTINUOUS)
    assert (r.m1, r.m2) == (1, 3)
    d = Realization(np.zeros((2, 2)), np.ones((2, 1)), np.ones((3, 2)), Convention.DISCRETE)
    assert (d.m1, d.m2) == (3, 1)


def test_nonconformable_blocks():
    with pytest.raises(DimensionError):
        Realization(np.eye(2), np.ones((3, 1)), np.ones((1, 2)))


def test_controllability_rank():
    A = np.diag([0.0, 5.0])
    report = is_controllable(A, np.array([[1.0], [0.0]]))
    assert not report
    assert report.rank == 1
    assert is_controllable(A, np.array([[1.0], [1.0]]))
    assert is_observable(np.array([[1.0, 1.0]]), A)


def test_minimal_realization_drops_hidden_mode():
    r = Realization(np.diag([0.0, 5.0]), [[1.0], [0.0]], [[1j, 0.0]])
    assert not is_minimal(r)
    reduced = minimal_realization(r)
    assert reduced.n == 1
    assert mcmillan_degree(r) == 1
    for z in (1j, 2.0 + 3j):
        np.testing.assert_allclose(evaluate(reduced, z), evaluate(r, z), atol=1e-12)


def test_evaluate_sech_realization(sech_realization):
    assert evaluate(sech_realization, 2j)[0, 0] == pytest.approx(0.5)


def test_evaluate_at_pole(sech_realization):
    with pytest.raises(PoleProximityError):
        evaluate(sech_realization, 0.0)


def test_empty_realization_is_zero():
    r = Realization(np.zeros((0, 0)), np.zeros((0, 2)), np.zeros((1, 0)))
    assert evaluate(r, 1j).shape == (1, 2)
    assert not np.any(evaluate(r, 1j))


def test_similarity_preserves_transfer_function(rng):
    r = random_minimal_realization(3, 1, 2, Convention.CONTINUOUS, rng)
    T = random_similarity(3, rng, cond_max=50.0)
    other = similarity(r, T)
    for z in probe_points(operator_norm(r.A), count=6):
        np.testing.assert_allclose(evaluate(other, z), evaluate(r, z), rtol=1e-8, atol=1e-10)


def test_probe_points_avoid_spectrum(two_by_two_continuous):
    scale = operator_norm(two_by_two_continuous.A)
    points = probe_points(scale)
    assert np.min(np.abs(points)) >= 2.0 * (1.0 + scale) - 1e-12
