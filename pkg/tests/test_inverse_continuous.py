"""
Tests for the continuous inverse pipeline.
"""
import math

import numpy as np
import pytest

from src.models.exceptions import DomainError, NonMinimalError, PositivityError, SchemaError
from src.models.schemas import Convention
from src.services.inverse_continuous import (
    balanced_r_at,
    decay_profile,
    lambda_at,
    monotonicity_profile,
    node_identity_residual,
    potential_at,
    r_at,
    r_increment,
    s_at,
    sample_potential,
    solve_inverse_continuous,
    theta_matrix,
    verify_pipeline,
    weyl_continuous,
    x_cap,
    zero_potential,
)
from src.services.matcore import expm, operator_norm
from src.services.quadruple import AdmissibleQuadruple
from src.services.realization import Realization, evaluate
from src.utils.random_systems import random_minimal_realization


def test_sech_closed_form(sech_realization):
    p = solve_inverse_continuous(sech_realization)
    xs = np.linspace(0.0, 5.0, 101)
    values = p.sample(xs)[:, 0, 0]
    np.testing.assert_allclose(values, 2.0 / np.cosh(2.0 * xs), rtol=0, atol=1e-9)
    assert p.bound == pytest.approx(2.0, rel=1e-9)
    assert p.x_max == pytest.approx(10.0)


def test_sech_r_closed_form(sech_realization):
    q = solve_inverse_continuous(sech_realization).quadruple
    for x in (0.0, 0.3, 1.7):
        assert r_at(q, x)[0, 0].real == pytest.approx((1 + math.exp(4 * x)) / 2, rel=1e-12)


@pytest.mark.parametrize("form", ["balanced", "resolvent", "node"])
def test_forms_agree(two_by_two_quadruple, form):
    for x in (0.0, 0.25, 1.5):
        np.testing.assert_allclose(
            potential_at(two_by_two_quadruple, x, form),
            potential_at(two_by_two_quadruple, x, "balanced"),
            atol=1e-10,
        )


def test_unbalanced_forms_capped(two_by_two_quadruple):
    beyond = 2.0 * x_cap(two_by_two_quadruple)
    with pytest.raises(DomainError):
        potential_at(two_by_two_quadruple, beyond, "resolvent")
    # the balanced form has no cap
    assert np.all(np.isfinite(potential_at(two_by_two_quadruple, beyond)))


def test_balanced_matrix_conjugates_r(two_by_two_quadruple):
    q = two_by_two_quadruple
    x = 0.8
    Rb, E = balanced_r_at(q, x)
    np.testing.assert_allclose(E, expm(2j * x * q.alpha), atol=1e-12)
    np.testing.assert_allclose(Rb, E @ r_at(q, x) @ E.conj().T, atol=1e-10)


def test_uniform_and_scattered_grids_agree(two_by_two_quadruple):
    uniform = np.linspace(0.0, 4.0, 41)
    scattered = np.array([0.0, 0.3, 1.1, 2.9, 4.0])
    a = sample_potential(two_by_two_quadruple, uniform)
    b = sample_potential(two_by_two_quadruple, scattered)
    np.testing.assert_allclose(a[[0, 40]], b[[0, 4]], atol=1e-10)


def test_negative_x():
    q = AdmissibleQuadruple.create([[1j]], [[1.0]], [[1.0]], [[1.0]])
    with pytest.raises(DomainError):
        potential_at(q, -0.1)


def test_weyl_function_matches_realization(two_by_two_continuous):
    p = solve_inverse_continuous(two_by_two_continuous)
    for z in (3j, 1.0 + 4j, -2.0 + 5j):
        np.testing.assert_allclose(
            weyl_continuous(p.quadruple, z), evaluate(two_by_two_continuous, z), rtol=1e-9, atol=1e-12
        )


def test_theta_is_the_input_state_matrix(two_by_two_continuous):
    p = solve_inverse_continuous(two_by_two_continuous)
    np.testing.assert_allclose(theta_matrix(p.quadruple), two_by_two_continuous.A, atol=1e-9)


def test_random_roundtrip(rng):
    r = random_minimal_realization(3, 2, 1, Convention.CONTINUOUS, rng)
    report = verify_pipeline(solve_inverse_continuous(r))
    assert report.weyl_agreement <= 1e-8
    assert report.admissibility.admissible
    assert report.admissibility.spectrum_in_upper_half_plane


def test_verify_pipeline_passes(two_by_two_continuous):
    report = verify_pipeline(solve_inverse_continuous(two_by_two_continuous))
    assert report.passed, report.findings
    assert report.node_identity_max <= 1e-9
    assert report.decay.decays
    assert report.monotonicity.increments_psd


def test_monotone_r(two_by_two_quadruple):
    report = monotonicity_profile(two_by_two_quadruple, x_max=3.0, samples=20)
    assert report.strictly_increasing
    assert report.growth_ok
    inc = r_increment(two_by_two_quadruple, 0.5, 1.0)
    np.testing.assert_allclose(inc, r_at(two_by_two_quadruple, 1.0) - r_at(two_by_two_quadruple, 0.5), atol=1e-9)


def test_node_identity(two_by_two_quadruple):
    assert node_identity_residual(two_by_two_quadruple, 1.2) <= 1e-12


@pytest.mark.parametrize("x", [0.0, 0.4, 1.2])
def test_node_identity_in_s_coordinates(two_by_two_quadruple, x):
    q = two_by_two_quadruple
    S = s_at(q, x)
    L = lambda_at(q, x)
    lhs = q.alpha @ S - S @ q.alpha.conj().T - 1j * L @ L.conj().T
    assert operator_norm(lhs) <= 1e-10 * (operator_norm(q.alpha) * operator_norm(S) + operator_norm(L) ** 2)
    # conjugation by e^{ix alpha} carries S(x) to Rb(x) and Lambda(x) to [theta1, e^{2ix alpha} theta2]
    E = expm(1j * x * q.alpha)
    np.testing.assert_allclose(E @ S @ E.conj().T, balanced_r_at(q, x)[0], atol=1e-9)
    np.testing.assert_allclose((E @ L)[:, :1], q.theta1, atol=1e-12)


def test_decay_profile(sech_realization):
    profile = decay_profile(solve_inverse_continuous(sech_realization))
    assert profile.decays
    assert profile.peak_norm == pytest.approx(profile.initial_norm)
    assert profile.final_norm / profile.initial_norm < 1e-3
    assert profile.resolvent_tail_decreasing


def test_decay_when_v_vanishes_at_zero(two_by_two_continuous):
    # theta1* theta2 = 0, so v(0) = 0 while v is nonzero further out
    profile = decay_profile(solve_inverse_continuous(two_by_two_continuous))
    assert profile.initial_norm <= 1e-9
    assert profile.peak_norm > 0.1
    assert profile.final_norm / profile.peak_norm < 1e-3
    assert profile.decays


def test_non_minimal_input():
    r = Realization(np.diag([0.0, 5.0]), [[1.0], [0.0]], [[1j, 0.0]])
    with pytest.raises(NonMinimalError):
        solve_inverse_continuous(r)
    p = solve_inverse_continuous(r, reduce=True)
    assert p.reduced_from == 2
    assert p.quadruple.n == 1
    assert operator_norm(p(0.0)) == pytest.approx(2.0, rel=1e-9)


def test_wrong_convention(sqrt3_realization):
    with pytest.raises(SchemaError):
        solve_inverse_continuous(sqrt3_realization)


def test_zero_potential():
    p = zero_potential(1, 2)
    assert p.bound == 0.0
    assert p(3.0).shape == (1, 2)
    assert weyl_continuous(p.quadruple, 1j).shape == (2, 1)


def test_verify_pipeline_where_s_is_ill_conditioned():
    # S(x) of this realization loses positivity in floating point for x around 3 to 9
    r = random_minimal_realization(4, 1, 1, Convention.CONTINUOUS, np.random.default_rng(2))
    p = solve_inverse_continuous(r)
    report = verify_pipeline(p)
    assert report.node_identity_max <= 1e-9
    assert report.weyl_agreement <= 1e-8
    assert max(node_identity_residual(p.quadruple, x) for x in (3.0, 5.59, 9.0)) <= 1e-9


def test_failing_check_becomes_a_finding(two_by_two_continuous, monkeypatch):
    def lost_positivity(*args, **kwargs):
        raise PositivityError("S(5.6) is not positive definite")

    monkeypatch.setattr("src.services.inverse_continuous.decay_profile", lost_positivity)
    report = verify_pipeline(solve_inverse_continuous(two_by_two_continuous))
    assert report.decay is None
    assert not report.passed
    assert report.findings == ["decay check failed: PositivityError: S(5.6) is not positive definite"]


def random_continuous_realization(index: int) -> Realization:
    n = 1 + index % 5
    m1 = 1 + (index // 5) % 2
    m2 = 1 + (index // 10) % 2
    return random_minimal_realization(n, m1, m2, Convention.CONTINUOUS, np.random.default_rng([1913, index]))


@pytest.mark.parametrize("index", range(50))
def test_random_roundtrips(index):
    report = verify_pipeline(solve_inverse_continuous(random_continuous_realization(index)))
    assert report.weyl_agreement <= 1e-8
    assert report.node_identity_max <= 1e-9
    assert report.admissibility.spectrum_in_upper_half_plane
