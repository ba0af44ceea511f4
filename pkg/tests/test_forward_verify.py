"""
Tests for the forward solvers and the finite-horizon Weyl checks.
"""
import math

import numpy as np
import pytest

from src.models.exceptions import DomainError
from src.models.schemas import Verdict
from src.services.forward_verify import (
    free_solution,
    integrate_dirac,
    propagate_discrete,
    richardson_ratio,
    safe_horizon,
    weyl_defect_continuous,
    weyl_defect_discrete,
)
from src.services.inverse_continuous import solve_inverse_continuous, weyl_continuous, zero_potential
from src.services.inverse_discrete import c_k_sequence, solve_inverse_discrete, weyl_discrete
from src.services.matcore import operator_norm
from src.services.quadruple import empty_quadruple


def test_free_solution_matches_integrator():
    fs = integrate_dirac(zero_potential(1, 2), 1.0 + 2j, L=1.5, h=0.01)
    np.testing.assert_allclose(fs.Y[-1], free_solution(1, 2, 1.0 + 2j, fs.length), atol=1e-6)
    assert fs.steps % 16 == 0


def test_fourth_order_convergence():
    ratio = richardson_ratio(1, 1, 2j, L=2.0, h=2.0 / 64)
    assert 14.0 < ratio < 18.0


def test_fundamental_solution_lookup(sech_realization):
    p = solve_inverse_continuous(sech_realization)
    fs = integrate_dirac(p, 3j, L=1.0, h=1.0 / 64)
    np.testing.assert_allclose(fs(0.0), np.eye(2))
    with pytest.raises(DomainError):
        fs(2.0)


def test_bad_horizon():
    with pytest.raises(DomainError):
        integrate_dirac(zero_potential(1, 1), 2j, L=-1.0)
    with pytest.raises(DomainError):
        integrate_dirac(zero_potential(1, 1), -2j)


def test_sech_weyl_function_passes(sech_realization):
    p = solve_inverse_continuous(sech_realization)
    report = weyl_defect_continuous(p, lambda z: weyl_continuous(p.quadruple, z), 4j)
    assert report.z_in_half_plane
    assert report.verdict == Verdict.PASS
    assert report.tail_ratio < 1e-2
    assert len(report.partial_values) == 8


def test_wrong_phi_fails(sech_realization):
    p = solve_inverse_continuous(sech_realization)
    report = weyl_defect_continuous(p, lambda z: weyl_continuous(p.quadruple, z) + 0.5, 4j)
    assert report.verdict == Verdict.FAIL


def test_two_by_two_continuous_passes(two_by_two_continuous):
    p = solve_inverse_continuous(two_by_two_continuous)
    for z in (4j, 6j):
        assert weyl_defect_continuous(p, lambda w: weyl_continuous(p.quadruple, w), z).verdict == Verdict.PASS


def test_discrete_propagation_of_trivial_potential():
    p = c_k_sequence(empty_quadruple(1, 1), 5)
    w = propagate_discrete(p, 2j)
    np.testing.assert_allclose(w[5], np.diag([1.5 ** 5, 0.5 ** 5]), atol=1e-12)
    with pytest.raises(DomainError):
        propagate_discrete(p, 0.0)
    with pytest.raises(DomainError):
        propagate_discrete(p, 2j, K=6)


def test_safe_horizon():
    assert safe_horizon(2j) == 27
    assert safe_horizon(-2j) is None


def test_sqrt3_discrete_passes(sqrt3_realization):
    p = solve_inverse_discrete(sqrt3_realization)
    good = weyl_defect_discrete(p, lambda z: weyl_discrete(p.quadruple, z), 2j)
    assert good.verdict == Verdict.PASS
    assert good.horizon == 27.0
    bad = weyl_defect_discrete(p, lambda z: weyl_discrete(p.quadruple, z) + 0.5, 2j)
    assert bad.verdict == Verdict.FAIL


def test_two_by_two_discrete_passes(two_by_two_discrete):
    p = solve_inverse_discrete(two_by_two_discrete)
    for z in (2j, 3j, 4j):
        report = weyl_defect_discrete(p, lambda w: weyl_discrete(p.quadruple, w), z)
        assert report.verdict == Verdict.PASS


def test_short_horizon_is_inconclusive(sqrt3_realization):
    p = solve_inverse_discrete(sqrt3_realization, K=1)
    report = weyl_defect_discrete(p, lambda z: weyl_discrete(p.quadruple, z), 2j)
    assert report.verdict == Verdict.INCONCLUSIVE
    assert math.isnan(report.tail_ratio)


def test_bound_uses_sup_norm(sqrt3_realization):
    p = solve_inverse_discrete(sqrt3_realization, K=10)
    report = weyl_defect_discrete(p, lambda z: weyl_discrete(p.quadruple, z), 2j)
    assert report.bound_M == pytest.approx(max(operator_norm(C) for C in p.C) + 1.0)
