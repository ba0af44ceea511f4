"""
Tests for perturbations, trend sweeps and the uniqueness experiment.
"""
import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.models.exceptions import DomainError
from src.models.schemas import Convention, PerturbationLevel, Verdict
from src.models.sweep import DeltaStats, SweepConfig, SweepResult
from src.services.matcore import operator_norm
from src.services.quadruple import check_admissible
from src.services.serialization import realization_to_document
from src.services.stability_harness import (
    empirical_lipschitz,
    perturb_quadruple,
    perturb_realization,
    run_sweep,
    uniqueness_experiment,
)


def sweep_config(r, deltas, trials=5, **kwargs) -> SweepConfig:
    return SweepConfig(
        mode=r.convention, realization=realization_to_document(r), deltas=deltas, trials=trials, seed=11, **kwargs
    )


def test_perturbation_budget(two_by_two_continuous):
    r = two_by_two_continuous
    p = perturb_realization(r, 0.2, seed=3)
    spent = operator_norm(p.A - r.A) + operator_norm(p.B - r.B) + operator_norm(p.C - r.C)
    assert spent == pytest.approx(0.1, rel=1e-12)
    assert p.convention == r.convention


def test_perturbation_is_seeded(sech_realization):
    a = perturb_realization(sech_realization, 1e-3, seed=9)
    b = perturb_realization(sech_realization, 1e-3, seed=9)
    np.testing.assert_array_equal(a.C, b.C)


def test_negative_delta(sech_realization, balanced_quadruple):
    with pytest.raises(DomainError):
        perturb_realization(sech_realization, -1.0, seed=0)
    with pytest.raises(DomainError):
        perturb_quadruple(balanced_quadruple, -1.0, seed=0)


def test_perturbed_quadruple_stays_admissible(two_by_two_quadruple):
    q = perturb_quadruple(two_by_two_quadruple, 1e-3, seed=5)
    assert check_admissible(q).admissible
    assert perturb_quadruple(two_by_two_quadruple, 0.0, seed=5) is two_by_two_quadruple


def test_triple_sweep_passes(sech_realization):
    result = run_sweep(sweep_config(sech_realization, [1e-2, 1e-3, 1e-4]))
    assert result.verdict == Verdict.PASS
    assert result.monotone and result.ratio_ok
    assert result.skip_fraction == 0.0
    assert len(result.records) == 15
    assert [row.delta for row in result.rows] == [1e-2, 1e-3, 1e-4]


def test_quadruple_level_sweep_with_control_row(sqrt3_realization):
    cfg = sweep_config(sqrt3_realization, [1e-2, 1e-4, 0.0], trials=3, level=PerturbationLevel.QUADRUPLE, K=20)
    result = run_sweep(cfg)
    assert result.verdict == Verdict.PASS
    assert "equal weights" in result.message
    control = result.rows[-1]
    assert control.median_potential_dev == 0.0
    assert control.lipschitz_estimate is None


def test_threaded_sweep_matches_serial(sech_realization):
    cfg = sweep_config(sech_realization, [1e-2, 1e-3], trials=3)
    serial = run_sweep(cfg, workers=1)
    threaded = run_sweep(cfg, workers=2)
    assert [r.potential_dev for r in threaded.records] == [r.potential_dev for r in serial.records]


def test_empirical_lipschitz(sech_realization):
    result = run_sweep(sweep_config(sech_realization, [1e-2, 1e-3], trials=3))
    expected = max(row.lipschitz_estimate for row in result.rows)
    assert empirical_lipschitz(result) == expected
    assert math.isfinite(expected)

    empty = SweepResult(
        mode=Convention.CONTINUOUS,
        level=PerturbationLevel.TRIPLE,
        seed=0,
        rows=[DeltaStats(delta=1e-2, trials=1, skipped=1)],
        monotone=False,
        ratio_ok=False,
        skip_fraction=1.0,
        verdict=Verdict.INCONCLUSIVE,
    )
    assert math.isnan(empirical_lipschitz(empty))


@pytest.mark.parametrize("deltas", [[1e-3, 1e-2], [1e-2, 0.0, 1e-3], [], [-1e-2]])
def test_sweep_config_rejects_bad_deltas(sech_realization, deltas):
    with pytest.raises(ValidationError):
        sweep_config(sech_realization, deltas)


def test_sweep_config_rejects_bad_trials_and_mode(sech_realization):
    with pytest.raises(ValidationError):
        sweep_config(sech_realization, [1e-2], trials=0)
    with pytest.raises(ValidationError):
        SweepConfig(mode=Convention.DISCRETE, realization=realization_to_document(sech_realization), deltas=[1e-2])


@pytest.mark.parametrize("name", ["two_by_two_continuous", "two_by_two_discrete"])
def test_uniqueness_under_similarity(request, name):
    r = request.getfixturevalue(name)
    report = uniqueness_experiment(r, trials=5, seed=3, K=20)
    assert report.passed
    assert report.trials == 5
    assert len(report.deviations) == len(report.conditions) == 5
    assert all(c >= 1.0 - 1e-9 for c in report.conditions)
