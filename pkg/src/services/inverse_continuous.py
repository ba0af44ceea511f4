"""
Continuous inverse problem: pseudo-exponential potentials.

Given an admissible quadruple, the potential on the semi-axis is
    v(x) = 2 theta1* e^{2ix alpha*} R(x)^{-1} theta2,
    R(x) = S0 + 2 int_0^x e^{-2it alpha} theta1 theta1* e^{2it alpha*} dt.
R(x) grows exponentially, so evaluation goes through the balanced matrix
    Rb(x) = e^{2ix alpha} R(x) e^{2ix alpha}*
          = e^{2ix alpha} S0 e^{2ix alpha}* + int_0^x e^{2it alpha} (2 theta1 theta1*) e^{2it alpha}* dt,
which stays bounded when sigma(alpha) lies in the upper half-plane, giving
    v(x) = 2 theta1* Rb(x)^{-1} e^{2ix alpha} theta2.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple, TypeVar
import math

import numpy as np
import structlog

from src.config.settings import settings
from src.models.exceptions import (
    DomainError,
    NonMinimalError,
    PipelineError,
    PoleProximityError,
    PositivityError,
    SchemaError,
)
from src.models.reports import DecayProfile, MonotonicityReport, VerificationReport
from src.models.schemas import Convention
from src.services.matcore import (
    expm,
    gramian_integral,
    hermitian_part,
    is_positive_definite,
    lambda_max,
    lambda_min,
    operator_norm,
    propagator_and_gramian,
    solve_linear,
    spectrum,
)
from src.services.quadruple import AdmissibleQuadruple, check_admissible, empty_quadruple, from_continuous
from src.services.realization import (
    Realization,
    evaluate,
    is_minimal,
    max_relative_deviation,
    minimal_realization,
    probe_points,
)
from src.services.riccati import RiccatiProblem, RiccatiSolution, solve_max_positive

logger = structlog.get_logger()

T = TypeVar("T")

FORMS = ("balanced", "resolvent", "node")


@dataclass(frozen=True)
class ContinuousPotential:
    """Potential generated by a quadruple, with its default sampling range and bound."""

    quadruple: AdmissibleQuadruple
    x_max: float
    bound: float
    riccati: Optional[RiccatiSolution] = None
    realization: Optional[Realization] = None
    reduced_from: Optional[int] = None

    @property
    def m1(self) -> int:
        return self.quadruple.m1

    @property
    def m2(self) -> int:
        return self.quadruple.m2

    def __call__(self, x: float) -> np.ndarray:
        return potential_at(self.quadruple, x)

    def sample(self, xs) -> np.ndarray:
        return sample_potential(self.quadruple, xs)

    def default_grid(self, samples: Optional[int] = None) -> np.ndarray:
        samples = settings.grid_samples if samples is None else samples
        return np.linspace(0.0, self.x_max, samples)


def default_x_max(q: AdmissibleQuadruple) -> float:
    """decay_horizon / min Im sigma(alpha); decay_horizon when the spectrum gives no scale."""
    if q.n == 0:
        return settings.decay_horizon
    low = spectrum(q.alpha).min_imag()
    if not math.isfinite(low) or low <= 0:
        return settings.decay_horizon
    return settings.decay_horizon / low


def x_cap(q: AdmissibleQuadruple) -> float:
    """Largest x at which the unbalanced forms stay inside double range."""
    if q.n == 0:
        return math.inf
    high = spectrum(q.alpha).max_imag()
    return math.inf if high <= 0 else settings.exp_cap / (2.0 * high)


def theta_matrix(q: AdmissibleQuadruple) -> np.ndarray:
    """theta = alpha - i theta1 theta1* S0^{-1}."""
    t1t1 = q.theta1 @ q.theta1.conj().T
    return q.alpha - 1j * solve_linear(q.S0, t1t1.conj().T, "S0").conj().T


def _require_nonnegative(x: float) -> None:
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x}")


def lambda_at(q: AdmissibleQuadruple, x: float) -> np.ndarray:
    """Lambda(x) = [e^{-ix alpha} theta1, e^{ix alpha} theta2]."""
    return np.hstack([expm(-1j * x * q.alpha) @ q.theta1, expm(1j * x * q.alpha) @ q.theta2])


def r_at(q: AdmissibleQuadruple, x: float) -> np.ndarray:
    """R(x) = S0 + gramian_integral(-2i alpha, 2 theta1 theta1*, x)."""
    _require_nonnegative(x)
    G = gramian_integral(-2j * q.alpha, 2.0 * q.theta1 @ q.theta1.conj().T, x)
    return hermitian_part(q.S0 + G)


def r_increment(q: AdmissibleQuadruple, x1: float, x2: float) -> np.ndarray:
    """R(x2) - R(x1) formed directly as e^{-2ix1 alpha} R-gramian(x2 - x1) e^{-2ix1 alpha}*."""
    _require_nonnegative(x1)
    if x2 < x1:
        raise DomainError(f"increment needs x2 >= x1, got {x1} > {x2}")
    E = expm(-2j * x1 * q.alpha)
    G = gramian_integral(-2j * q.alpha, 2.0 * q.theta1 @ q.theta1.conj().T, x2 - x1)
    return hermitian_part(E @ G @ E.conj().T)


def balanced_r_at(q: AdmissibleQuadruple, x: float) -> Tuple[np.ndarray, np.ndarray]:
    """Return (Rb(x), e^{2ix alpha})."""
    _require_nonnegative(x)
    E, G = propagator_and_gramian(2j * q.alpha, 2.0 * q.theta1 @ q.theta1.conj().T, x)
    return hermitian_part(E @ q.S0 @ E.conj().T + G), E


def s_at(q: AdmissibleQuadruple, x: float) -> np.ndarray:
    """
    S(x) = e^{ix alpha} R(x) e^{ix alpha}*.

    Raises:
        PositivityError: S(x) not positive definite
    """
    E = expm(1j * x * q.alpha)
    S = hermitian_part(E @ r_at(q, x) @ E.conj().T)
    check = is_positive_definite(S)
    if not check:
        logger.error("s_matrix_not_positive", x=x, reason=check.reason)
        raise PositivityError(f"S({x}) is not positive definite ({check.reason})")
    return S


def _check_cap(q: AdmissibleQuadruple, x: float, form: str) -> None:
    cap = x_cap(q)
    if x > cap:
        raise DomainError(f"x={x} exceeds x_cap={cap:.4g} for the {form} form; use the balanced form")


def potential_at(q: AdmissibleQuadruple, x: float, form: str = "balanced") -> np.ndarray:
    """
    Potential v(x) (m1 x m2).

    Args:
        q: Admissible quadruple
        x: Point on the semi-axis (>= 0)
        form: "balanced" (default), "resolvent" (R(x) form) or "node" (S(x) form)
    """
    _require_nonnegative(x)
    if q.n == 0:
        return np.zeros((q.m1, q.m2), dtype=complex)
    if form == "balanced":
        Rb, E = balanced_r_at(q, x)
        return 2.0 * q.theta1.conj().T @ solve_linear(Rb, E @ q.theta2, "Rb(x)")
    if form == "resolvent":
        _check_cap(q, x, form)
        left = q.theta1.conj().T @ expm(2j * x * q.alpha.conj().T)
        return 2.0 * left @ solve_linear(r_at(q, x), q.theta2, "R(x)")
    if form == "node":
        _check_cap(q, x, form)
        left = q.theta1.conj().T @ expm(1j * x * q.alpha.conj().T)
        right = expm(1j * x * q.alpha) @ q.theta2
        return 2.0 * left @ solve_linear(s_at(q, x), right, "S(x)")
    raise DomainError(f"unknown potential form '{form}', expected one of {FORMS}")


def _balanced_sweep(q: AdmissibleQuadruple, xs) -> Tuple[np.ndarray, np.ndarray]:
    """
    Sample v(x) and theta1* Rb(x)^{-1} e^{2ix alpha} along xs.

    Uniform grids propagate Rb(x + h) = E_h Rb(x) E_h* + G(h).
    """
    xs = np.asarray(xs, dtype=float)
    count = xs.shape[0]
    values = np.zeros((count, q.m1, q.m2), dtype=complex)
    rows = np.zeros((count, q.m1, q.n), dtype=complex)
    if count == 0 or q.n == 0:
        return values, rows
    if np.any(xs < 0):
        raise DomainError("sample points must be >= 0")

    steps = np.diff(xs)
    uniform = count > 2 and steps[0] > 0 and np.allclose(steps, steps[0], rtol=1e-9, atol=0.0)
    A = 2j * q.alpha
    Q = 2.0 * q.theta1 @ q.theta1.conj().T
    if uniform:
        E_h, G_h = propagator_and_gramian(A, Q, float(steps[0]))

    Rb, E = balanced_r_at(q, float(xs[0]))
    for idx in range(count):
        if idx > 0:
            if uniform:
                Rb = hermitian_part(E_h @ Rb @ E_h.conj().T + G_h)
                E = E_h @ E
            else:
                Rb, E = balanced_r_at(q, float(xs[idx]))
        row = q.theta1.conj().T @ solve_linear(Rb, E, "Rb(x)")
        rows[idx] = row
        values[idx] = 2.0 * row @ q.theta2
    return values, rows


def sample_potential(q: AdmissibleQuadruple, xs) -> np.ndarray:
    """v on a grid, shape (len(xs), m1, m2)."""
    return _balanced_sweep(q, xs)[0]


def weyl_continuous(q: AdmissibleQuadruple, z: complex) -> np.ndarray:
    """
    Weyl function phi(z) = i theta2* S0^{-1} (zI - theta)^{-1} theta1.

    Raises:
        PoleProximityError: z near sigma(theta)
    """
    if q.n == 0:
        return np.zeros((q.m2, q.m1), dtype=complex)
    theta = theta_matrix(q)
    distance = spectrum(theta).distance_to(z)
    if distance <= settings.pole_tol * (1.0 + operator_norm(theta)):
        raise PoleProximityError(f"z={z} is at a pole of the Weyl function", distance=distance)
    left = solve_linear(q.S0, q.theta2, "S0").conj().T
    return 1j * left @ solve_linear(z * np.eye(q.n) - theta, q.theta1, "zI - theta")


def node_identity_residual(q: AdmissibleQuadruple, x: float) -> float:
    """
    Scaled ||alpha S(x) - S(x) alpha* - i Lambda(x) Lambda(x)*||.

    Evaluated after conjugation by e^{ix alpha}, which commutes with alpha:
    alpha Rb - Rb alpha* = i Lb Lb* with Rb = Rb(x), Lb = [theta1, e^{2ix alpha} theta2].
    Both sides stay bounded in x, so no positivity of S(x) is needed.
    """
    if q.n == 0:
        return 0.0
    Rb, E = balanced_r_at(q, x)
    L = np.hstack([q.theta1, E @ q.theta2])
    lhs = q.alpha @ Rb - Rb @ q.alpha.conj().T - 1j * L @ L.conj().T
    scale = operator_norm(q.alpha) * operator_norm(Rb) + operator_norm(L) ** 2
    return operator_norm(lhs) / scale


def potential_bound(q: AdmissibleQuadruple, xs) -> float:
    values = sample_potential(q, xs)
    if values.size == 0:
        return 0.0
    return max(operator_norm(v) for v in values)


def build_potential(
    q: AdmissibleQuadruple,
    riccati: Optional[RiccatiSolution] = None,
    realization: Optional[Realization] = None,
    reduced_from: Optional[int] = None,
) -> ContinuousPotential:
    """Wrap a quadruple with its default range and sup-norm bound."""
    x_max = default_x_max(q)
    bound = potential_bound(q, np.linspace(0.0, x_max, settings.grid_samples))
    return ContinuousPotential(q, x_max, bound, riccati, realization, reduced_from)


def zero_potential(m1: int, m2: int) -> ContinuousPotential:
    return build_potential(empty_quadruple(m1, m2))


def solve_inverse_continuous(
    r: Realization,
    reduce: bool = False,
    method: str = "hamiltonian",
) -> ContinuousPotential:
    """
    Recover the potential from a realization of its Weyl function.

    Pipeline: Riccati positive solution -> quadruple -> potential.

    Args:
        r: Continuous-convention realization
        reduce: Replace a non-minimal realization by a minimal one
        method: Riccati solver path

    Raises:
        SchemaError: discrete-convention input
        NonMinimalError: non-minimal input without reduce
    """
    if r.convention != Convention.CONTINUOUS:
        raise SchemaError("solve_inverse_continuous needs a continuous-convention realization")

    logger.info("inverse_continuous_started", n=r.n, m1=r.m1, m2=r.m2)
    reduced_from = None
    try:
        if not is_minimal(r):
            if not reduce:
                raise NonMinimalError(f"realization of order {r.n} is not minimal", order=r.n)
            reduced_from = r.n
            r = minimal_realization(r)

        solution = solve_max_positive(RiccatiProblem.from_realization(r), method=method, check_minimality=False)
        q = from_continuous(r.A, r.B, r.C, solution.X)
        report = check_admissible(q)
        if not report.admissible:
            logger.warning("quadruple_not_admissible", relative_residual=report.relative_residual)
        potential = build_potential(q, solution, r, reduced_from)
    except Exception as e:
        logger.error("inverse_continuous_failed", error=str(e))
        raise

    logger.info("inverse_continuous_completed", n=q.n, x_max=potential.x_max, bound=potential.bound,
                riccati_residual=solution.residual_norm)
    return potential


def decay_profile(p: ContinuousPotential, x_max: Optional[float] = None, samples: Optional[int] = None) -> DecayProfile:
    """
    Sampled ||v(x)|| and ||theta1* e^{2ix alpha*} R(x)^{-1}|| on [0, x_max].

    Raises:
        DomainError: x_max <= 0
    """
    x_max = p.x_max if x_max is None else x_max
    samples = settings.grid_samples if samples is None else samples
    if x_max <= 0:
        raise DomainError(f"x_max must be > 0, got {x_max}")
    xs = np.linspace(0.0, x_max, samples)
    values, rows = _balanced_sweep(p.quadruple, xs)
    potential_norms = [operator_norm(v) for v in values]
    resolvent_norms = [operator_norm(r) for r in rows]

    initial, final = potential_norms[0], potential_norms[-1]
    # v(0) = 2 theta1* S0^{-1} theta2 can vanish; measure against the peak
    peak = max(potential_norms)
    decays = final < 1e-3 * peak if peak > 0 else True
    tail = np.asarray(resolvent_norms[len(resolvent_norms) // 2:])
    tail_decreasing = bool(np.all(np.diff(tail) <= 1e-9 * tail[:-1])) if tail.size > 1 else True

    return DecayProfile(
        xs=xs.tolist(),
        potential_norms=potential_norms,
        resolvent_norms=resolvent_norms,
        x_max=x_max,
        initial_norm=initial,
        peak_norm=peak,
        final_norm=final,
        decays=decays,
        resolvent_tail_decreasing=tail_decreasing,
    )


def monotonicity_profile(q: AdmissibleQuadruple, x_max: Optional[float] = None, samples: int = 50) -> MonotonicityReport:
    """
    lambda_min(R(x)) along a grid and PSD-ness of the increments R(x_{k+1}) - R(x_k).

    The grid is clipped to x_cap / 2 so R(2 x_max) stays representable.
    """
    x_max = default_x_max(q) if x_max is None else x_max
    x_max = min(x_max, 0.5 * x_cap(q))
    xs = np.linspace(0.0, x_max, samples)
    if q.n == 0:
        return MonotonicityReport(xs=xs.tolist(), lambda_min=[], min_increment_eigenvalue=0.0,
                                  increments_psd=True, strictly_increasing=True, growth_ok=True)

    lmins = [lambda_min(r_at(q, float(x))) for x in xs]
    worst = math.inf
    for x1, x2 in zip(xs[:-1], xs[1:]):
        increment = r_increment(q, float(x1), float(x2))
        size = operator_norm(increment)
        if size > 0:
            worst = min(worst, lambda_min(increment) / size)
    growth = lambda_min(r_at(q, 2.0 * x_max)) >= 2.0 * lmins[-1] - lambda_max(q.S0)
    if not growth:
        logger.warning("r_growth_flag", x_max=x_max)

    return MonotonicityReport(
        xs=xs.tolist(),
        lambda_min=lmins,
        min_increment_eigenvalue=0.0 if worst == math.inf else worst,
        increments_psd=worst >= -1e-10,
        strictly_increasing=bool(np.all(np.diff(lmins) > 0)),
        growth_ok=growth,
    )


def _run_check(findings: List[str], name: str, check: Callable[[], T]) -> Optional[T]:
    """Run one verification check; a pipeline failure inside it becomes a finding."""
    try:
        return check()
    except PipelineError as e:
        logger.warning("verification_check_failed", check=name, error=str(e))
        findings.append(f"{name} check failed: {type(e).__name__}: {e}")
        return None


def verify_pipeline(p: ContinuousPotential) -> VerificationReport:
    """Aggregate the invariant checks of one continuous run."""
    q = p.quadruple
    admissibility = check_admissible(q)
    findings: List[str] = []

    agreement = 0.0
    if p.realization is not None and q.n > 0:
        scale = max(operator_norm(p.realization.A), operator_norm(theta_matrix(q)))
        measured = _run_check(findings, "weyl agreement", lambda: max_relative_deviation(
            lambda z: weyl_continuous(q, z), lambda z: evaluate(p.realization, z), probe_points(scale)
        ))
        agreement = math.inf if measured is None else measured
        if measured is not None and agreement > 1e-8:
            findings.append(f"weyl function deviates from input realization ({agreement:.2e})")

    node_points = np.linspace(0.0, p.x_max, 11)
    node_max = _run_check(
        findings, "node identity", lambda: max(node_identity_residual(q, float(x)) for x in node_points)
    )
    if node_max is not None and node_max > 1e-9:
        findings.append(f"node identity residual {node_max:.2e}")

    decay = _run_check(findings, "decay", lambda: decay_profile(p))
    monotonicity = _run_check(findings, "monotonicity", lambda: monotonicity_profile(q))
    if not admissibility.admissible:
        findings.append("quadruple is not admissible")
    if admissibility.spectrum_in_upper_half_plane is False:
        findings.append("sigma(alpha) not in the upper half-plane")
    if decay is not None and not decay.decays:
        findings.append("potential does not decay over the sampled range")
    if decay is not None and not decay.resolvent_tail_decreasing:
        findings.append("resolvent norm not decreasing over the final half")
    if monotonicity is not None and not monotonicity.increments_psd:
        findings.append("R(x) increments are not PSD")
    if monotonicity is not None and not monotonicity.strictly_increasing:
        findings.append("lambda_min(R(x)) not strictly increasing")

    riccati = p.riccati
    return VerificationReport(
        convention=Convention.CONTINUOUS,
        n=q.n,
        m1=q.m1,
        m2=q.m2,
        reduced_from=p.reduced_from,
        riccati_residual=riccati.residual_norm if riccati else 0.0,
        riccati_method=riccati.method if riccati else "none",
        riccati_iterations=riccati.iterations if riccati else 0,
        admissibility=admissibility,
        weyl_agreement=agreement,
        node_identity_max=node_max,
        bound_M=p.bound + 1.0,
        decay=decay,
        monotonicity=monotonicity,
        findings=findings,
        passed=not findings,
    )
