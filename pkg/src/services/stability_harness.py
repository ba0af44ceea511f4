"""
Stability and uniqueness experiments for both inverse pipelines.

Stability is measured as a trend: the deviation of the recovered quadruple
and potential must shrink as the perturbation of the input shrinks.
"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Union
import math

import numpy as np
import structlog

from src.config.settings import settings
from src.models.exceptions import DomainError, PipelineError, PositivityError
from src.models.reports import UniquenessReport
from src.models.schemas import Convention, PerturbationLevel, Verdict
from src.models.sweep import DeltaStats, SweepConfig, SweepResult, TrialRecord
from src.services.inverse_continuous import sample_potential, solve_inverse_continuous
from src.services.inverse_discrete import c_k_sequence, default_K, solve_inverse_discrete
from src.services.matcore import condition_number, hermitian_part, is_positive_definite, operator_norm, solve_linear
from src.services.quadruple import AdmissibleQuadruple, quadruple_distance
from src.services.realization import Realization, is_minimal, similarity
from src.services.serialization import realization_from_document
from src.utils.random_systems import perturbation_rng, random_direction, random_similarity

logger = structlog.get_logger()

# Median comparisons along the delta list tolerate this absolute slack.
TREND_SLACK = 1e-14


def _as_rng(seed: Union[int, np.random.Generator]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(np.random.SeedSequence(int(seed)))


def perturb_realization(r: Realization, delta: float, seed: Union[int, np.random.Generator]) -> Realization:
    """
    (A + dA, B + dB, C + dC) with ||dA|| + ||dB|| + ||dC|| = delta / 2.

    Raises:
        DomainError: delta < 0
    """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    dA, dB, dC = random_direction([r.A.shape, r.B.shape, r.C.shape], 0.5 * delta, _as_rng(seed))
    return Realization(r.A + dA, r.B + dB, r.C + dC, r.convention)


def perturb_quadruple(
    q: AdmissibleQuadruple, delta: float, seed: Union[int, np.random.Generator]
) -> AdmissibleQuadruple:
    """
    Admissible quadruple near q.

    alpha = (H + (i/2)(theta1 theta1* + theta2 theta2*)) S0^{-1} with H Hermitian,
    so H, S0, theta1 and theta2 are moved (equal weights, total delta / 2) and
    alpha is rebuilt from them.

    Raises:
        DomainError: delta < 0
        PositivityError: the perturbed S0 is not positive definite
    """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    if delta == 0:
        return q
    n = q.n
    H = hermitian_part(q.alpha @ q.S0)
    dH, dS, d1, d2 = random_direction([(n, n), (n, n), q.theta1.shape, q.theta2.shape], 0.5 * delta, _as_rng(seed))
    # Hermitian parts keep the operator-norm budget (||(M + M*)/2|| <= ||M||).
    H = H + hermitian_part(dH)
    S0 = hermitian_part(q.S0 + hermitian_part(dS))
    theta1 = q.theta1 + d1
    theta2 = q.theta2 + d2
    check = is_positive_definite(S0)
    if not check:
        raise PositivityError(f"perturbed S0 is not positive definite ({check.reason})")
    gram = theta1 @ theta1.conj().T + theta2 @ theta2.conj().T
    numerator = H + 0.5j * gram
    alpha = solve_linear(S0, numerator.conj().T, "S0").conj().T
    return AdmissibleQuadruple.create(alpha, S0, theta1, theta2)


@dataclass(frozen=True)
class _Baseline:
    quadruple: AdmissibleQuadruple
    potential: Callable[[AdmissibleQuadruple], np.ndarray]
    values: np.ndarray


def _baseline(cfg: SweepConfig, r: Realization) -> _Baseline:
    if cfg.mode == Convention.CONTINUOUS:
        p = solve_inverse_continuous(r)
        samples = cfg.grid_samples or settings.grid_samples
        xs = np.linspace(0.0, cfg.x_max or p.x_max, samples)

        def potential(q: AdmissibleQuadruple) -> np.ndarray:
            return sample_potential(q, xs)
    else:
        K = cfg.K if cfg.K is not None else default_K(r.n)
        p = solve_inverse_discrete(r, K=K)

        def potential(q: AdmissibleQuadruple) -> np.ndarray:
            return c_k_sequence(q, K).C

    return _Baseline(p.quadruple, potential, potential(p.quadruple))


def _recover(cfg: SweepConfig, r: Realization) -> AdmissibleQuadruple:
    if cfg.mode == Convention.CONTINUOUS:
        return solve_inverse_continuous(r).quadruple
    return solve_inverse_discrete(r, K=0).quadruple


def _sup_deviation(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape[0] == 0:
        return 0.0
    return max(operator_norm(x - y) for x, y in zip(a, b))


def _run_trial(cfg: SweepConfig, r: Realization, base: _Baseline, seed: int, row: int, trial: int) -> TrialRecord:
    delta = cfg.deltas[row]
    rng = perturbation_rng(seed, trial, row)
    try:
        if cfg.level == PerturbationLevel.TRIPLE:
            perturbed = perturb_realization(r, delta, rng)
            if not is_minimal(perturbed):
                return TrialRecord(delta=delta, trial=trial, skipped=True, reason="perturbation lost minimality")
            q = _recover(cfg, perturbed)
        else:
            q = perturb_quadruple(base.quadruple, delta, rng)
        if q.n != base.quadruple.n:
            return TrialRecord(delta=delta, trial=trial, skipped=True, reason="recovered order changed")
        return TrialRecord(
            delta=delta,
            trial=trial,
            quad_distance=quadruple_distance(base.quadruple, q),
            potential_dev=_sup_deviation(base.values, base.potential(q)),
        )
    except PipelineError as e:
        logger.debug("sweep_trial_skipped", delta=delta, trial=trial, error=str(e))
        return TrialRecord(delta=delta, trial=trial, skipped=True, reason=f"{type(e).__name__}: {e}")


def _row_stats(delta: float, records: List[TrialRecord]) -> DeltaStats:
    kept = [rec for rec in records if not rec.skipped]
    quad = [rec.quad_distance for rec in kept]
    pot = [rec.potential_dev for rec in kept]
    median_pot = float(np.median(pot)) if pot else None
    return DeltaStats(
        delta=delta,
        trials=len(records),
        skipped=len(records) - len(kept),
        median_quad_distance=float(np.median(quad)) if quad else None,
        max_quad_distance=max(quad) if quad else None,
        median_potential_dev=median_pot,
        max_potential_dev=max(pot) if pot else None,
        lipschitz_estimate=median_pot / delta if median_pot is not None and delta > 0 else None,
    )


def _trend(rows: List[DeltaStats]):
    """(monotone, ratio_ok) over the positive-delta rows."""
    active = [row for row in rows if row.delta > 0]
    monotone, ratio_ok = True, True
    for attr in ("median_quad_distance", "median_potential_dev"):
        medians = [getattr(row, attr) for row in active]
        if any(m is None for m in medians):
            return False, False
        monotone &= all(later <= earlier + TREND_SLACK for earlier, later in zip(medians, medians[1:]))
        if len(medians) > 1:
            ratio_ok &= medians[-1] < medians[0] / 10.0
    return monotone, ratio_ok


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    """
    Perturb, re-solve and measure for every (delta, trial).

    Pass when the medians of both deviations are non-increasing down the delta
    list and the smallest-delta median is below a tenth of the largest-delta
    median. More than skip_fraction_limit skipped trials makes the run inconclusive.
    """
    seed = settings.seed if cfg.seed is None else cfg.seed
    workers = settings.sweep_workers if workers is None else workers
    r = realization_from_document(cfg.realization)
    logger.info("sweep_started", mode=cfg.mode.value, level=cfg.level.value, deltas=cfg.deltas,
                trials=cfg.trials, seed=seed)
    try:
        base = _baseline(cfg, r)
        tasks = [(row, trial) for row in range(len(cfg.deltas)) for trial in range(cfg.trials)]
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                records = list(pool.map(lambda t: _run_trial(cfg, r, base, seed, *t), tasks))
        else:
            records = [_run_trial(cfg, r, base, seed, row, trial) for row, trial in tasks]
    except Exception as e:
        logger.error("sweep_failed", error=str(e))
        raise

    rows = [
        _row_stats(delta, [rec for rec, (row, _) in zip(records, tasks) if row == idx])
        for idx, delta in enumerate(cfg.deltas)
    ]
    monotone, ratio_ok = _trend(rows)
    skip_fraction = sum(rec.skipped for rec in records) / len(records)

    message = None
    if skip_fraction > settings.skip_fraction_limit:
        verdict = Verdict.INCONCLUSIVE
        message = f"{skip_fraction:.0%} of trials skipped"
    elif monotone and ratio_ok:
        verdict = Verdict.PASS
    else:
        verdict = Verdict.FAIL
        message = "deviation does not shrink with delta"
    if cfg.level == PerturbationLevel.QUADRUPLE:
        note = "quadruple blocks perturbed with equal weights"
        message = note if message is None else f"{message}; {note}"

    logger.info("sweep_completed", verdict=verdict.value, monotone=monotone, ratio_ok=ratio_ok,
                skip_fraction=skip_fraction)
    return SweepResult(
        mode=cfg.mode,
        level=cfg.level,
        seed=seed,
        rows=rows,
        records=records,
        monotone=monotone,
        ratio_ok=ratio_ok,
        skip_fraction=skip_fraction,
        verdict=verdict,
        message=message,
    )


def uniqueness_experiment(
    r: Realization,
    trials: int = 20,
    seed: Optional[int] = None,
    cond_max: float = 100.0,
    K: Optional[int] = None,
) -> UniquenessReport:
    """
    Recover the potential from similarity(r, T) for random T and compare with
    the recovery from r; each deviation must stay within 1e-8 (1 + cond(T)).
    """
    seed = settings.seed if seed is None else seed
    mode = r.convention
    if mode == Convention.CONTINUOUS:
        base = solve_inverse_continuous(r)
        xs = base.default_grid()
        reference = base.sample(xs)

        def recover(other: Realization) -> np.ndarray:
            return solve_inverse_continuous(other).sample(xs)
    else:
        K = default_K(r.n) if K is None else K
        reference = solve_inverse_discrete(r, K=K).C

        def recover(other: Realization) -> np.ndarray:
            return solve_inverse_discrete(other, K=K).C

    deviations, conditions = [], []
    passed = True
    for trial in range(trials):
        T = random_similarity(r.n, perturbation_rng(seed, trial), cond_max)
        cond = condition_number(T) if r.n else 1.0
        deviation = _sup_deviation(reference, recover(similarity(r, T) if r.n else r))
        deviations.append(deviation)
        conditions.append(cond)
        passed &= deviation <= 1e-8 * (1.0 + cond)

    max_deviation = max(deviations) if deviations else 0.0
    logger.info("uniqueness_experiment_completed", mode=mode.value, trials=trials, max_deviation=max_deviation,
                passed=passed)
    return UniquenessReport(
        mode=mode,
        trials=trials,
        deviations=deviations,
        conditions=conditions,
        max_deviation=max_deviation,
        passed=bool(passed),
    )


def empirical_lipschitz(result: SweepResult) -> float:
    """Largest median potential deviation per unit delta over the sweep."""
    estimates = [row.lipschitz_estimate for row in result.rows if row.lipschitz_estimate is not None]
    return max(estimates) if estimates else math.nan
