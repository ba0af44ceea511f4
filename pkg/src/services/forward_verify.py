"""
Forward solvers and finite-horizon Weyl checks.

Continuous:  Y'(x, z) = (i z j + j V(x)) Y(x, z),  Y(0, z) = I,  V = [[0, v], [v*, 0]].
Discrete:    w_{k+1}(z) = (I + (i/z) C_k) w_k(z),    w_0(z) = I.

phi is a Weyl function when the column Y [I; phi] is square integrable
(respectively w_k [phi; I] square summable). A finite run can only look at how
fast the partial integrals settle; the verdict compares the second half of the
horizon with the first.
"""
from dataclasses import dataclass
from typing import Callable, List, Optional
import math

import numpy as np
import structlog
from scipy.integrate import simpson

from src.config.settings import settings
from src.models.exceptions import DomainError, SolverError
from src.models.reports import WeylDefectReport
from src.models.schemas import Convention, Verdict
from src.services.inverse_continuous import ContinuousPotential, zero_potential
from src.services.inverse_discrete import DiscretePotential
from src.services.matcore import operator_norm
from src.services.quadruple import signature_matrix

logger = structlog.get_logger()

CHECKPOINTS = 8
MAX_STEPS = 10_000_000
INTEGRAND_SAMPLES = 64


@dataclass(frozen=True)
class FundamentalSolutionContinuous:
    """Y(x, z) on the uniform grid xs = 0, h, ..., L."""

    z: complex
    xs: np.ndarray
    Y: np.ndarray
    step: float
    length: float

    @property
    def steps(self) -> int:
        return int(self.xs.shape[0]) - 1

    def __call__(self, x: float) -> np.ndarray:
        """Y at the grid point nearest to x."""
        if x < 0 or x > self.length * (1.0 + 1e-12):
            raise DomainError(f"x={x} outside [0, {self.length}]")
        return self.Y[int(round(x / self.step))]


def _step_count(L: float, h: float) -> int:
    # Multiple of 16 so every eighth of [0, L] holds an even number of Simpson panels.
    count = int(math.ceil(L / h / 16.0 - 1e-9)) * 16
    count = max(count, 16)
    if count > MAX_STEPS:
        raise DomainError(f"step count {count} exceeds {MAX_STEPS}")
    return count


def _default_horizon(z: complex, L: Optional[float], h: Optional[float]):
    if L is None:
        if z.imag <= 0:
            raise DomainError(f"default horizon needs Im z > 0, got z={z}")
        L = settings.verify_length_factor / z.imag
    if h is None:
        h = L / settings.verify_steps
    if L <= 0 or h <= 0:
        raise DomainError(f"need L > 0 and h > 0, got L={L}, h={h}")
    return float(L), float(h)


def _coefficients(potential: ContinuousPotential, z: complex, xs: np.ndarray) -> np.ndarray:
    """i z j + j V(x) at every x in xs."""
    m1, m2 = potential.m1, potential.m2
    j = signature_matrix(m1, m2)
    values = potential.sample(xs)
    if not np.all(np.isfinite(values)):
        raise SolverError("potential sample is not finite")
    M = np.broadcast_to(1j * z * j, (xs.shape[0], m1 + m2, m1 + m2)).copy()
    M[:, :m1, m1:] += values
    M[:, m1:, :m1] -= np.conj(np.transpose(values, (0, 2, 1)))
    return M


def integrate_dirac(
    potential: ContinuousPotential,
    z: complex,
    L: Optional[float] = None,
    h: Optional[float] = None,
) -> FundamentalSolutionContinuous:
    """
    Classical fourth-order Runge-Kutta on a fixed grid; V is sampled at the
    half steps the scheme needs.

    Args:
        potential: Potential v with m1, m2 and sample()
        z: Spectral parameter
        L: Horizon (default verify_length_factor / Im z)
        h: Step (default L / verify_steps, rounded to a multiple-of-16 grid)
    """
    z = complex(z)
    L, h = _default_horizon(z, L, h)
    steps = _step_count(L, h)
    h = L / steps
    half_points = np.linspace(0.0, L, 2 * steps + 1)
    M = _coefficients(potential, z, half_points)

    m = potential.m1 + potential.m2
    Y = np.empty((steps + 1, m, m), dtype=complex)
    Y[0] = np.eye(m)
    current = Y[0].copy()
    for k in range(steps):
        M0, Mh, M1 = M[2 * k], M[2 * k + 1], M[2 * k + 2]
        k1 = M0 @ current
        k2 = Mh @ (current + 0.5 * h * k1)
        k3 = Mh @ (current + 0.5 * h * k2)
        k4 = M1 @ (current + h * k3)
        current = current + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        Y[k + 1] = current
    if not np.all(np.isfinite(current)):
        raise SolverError(f"fundamental solution overflowed at z={z}, L={L}")

    return FundamentalSolutionContinuous(z=z, xs=half_points[::2], Y=Y, step=h, length=L)


def free_solution(m1: int, m2: int, z: complex, x: float) -> np.ndarray:
    """Y(x, z) for V = 0: diag(e^{izx} I_m1, e^{-izx} I_m2)."""
    return np.diag(np.concatenate([np.full(m1, np.exp(1j * z * x)), np.full(m2, np.exp(-1j * z * x))]))


def richardson_ratio(m1: int, m2: int, z: complex, L: float, h: float) -> float:
    """
    Error reduction when h is halved, measured at x = L against the V = 0
    closed form. Fourth order gives about 16.
    """
    potential = zero_potential(m1, m2)
    exact = free_solution(m1, m2, complex(z), L)
    coarse = integrate_dirac(potential, z, L, h)
    fine = integrate_dirac(potential, z, L, h / 2.0)
    error_coarse = operator_norm(coarse.Y[-1] - exact)
    error_fine = operator_norm(fine.Y[-1] - exact)
    return math.inf if error_fine == 0 else error_coarse / error_fine


def _verdict(ratio: float) -> Verdict:
    if not math.isfinite(ratio) or ratio >= 1.0:
        return Verdict.FAIL
    if ratio <= settings.verify_tail_ratio:
        return Verdict.PASS
    return Verdict.INCONCLUSIVE


def _thin(values: np.ndarray) -> List[float]:
    stride = max(1, values.shape[0] // INTEGRAND_SAMPLES)
    return [float(v) for v in values[::stride]]


def weyl_defect_continuous(
    potential: ContinuousPotential,
    phi_eval: Callable[[complex], np.ndarray],
    z: complex,
    L: Optional[float] = None,
    h: Optional[float] = None,
) -> WeylDefectReport:
    """
    Partial integrals of ||Y(x, z) [I; phi(z)]||_F^2 over [0, L].

    Pass when the increment over [L/2, L] is at most verify_tail_ratio times
    the increment over [0, L/2].
    """
    z = complex(z)
    bound = potential.bound + 1.0
    in_half_plane = z.imag > bound
    if not in_half_plane:
        logger.warning("weyl_check_outside_half_plane", z=str(z), bound_M=bound)

    fs = integrate_dirac(potential, z, L, h)
    column = np.vstack([np.eye(potential.m1), np.asarray(phi_eval(z), dtype=complex)])
    integrand = np.sum(np.abs(fs.Y @ column) ** 2, axis=(1, 2))

    panel = fs.steps // CHECKPOINTS
    pieces = [
        simpson(integrand[c * panel:(c + 1) * panel + 1], x=fs.xs[c * panel:(c + 1) * panel + 1])
        for c in range(CHECKPOINTS)
    ]
    partial = np.cumsum(pieces)
    head = float(partial[CHECKPOINTS // 2 - 1])
    tail = float(partial[-1] - partial[CHECKPOINTS // 2 - 1])
    ratio = tail / head if head > 0 else math.inf
    verdict = _verdict(ratio)
    logger.info("weyl_defect_continuous", z=str(z), tail_ratio=ratio, verdict=verdict.value)

    return WeylDefectReport(
        mode=Convention.CONTINUOUS,
        z=[z.real, z.imag],
        bound_M=bound,
        z_in_half_plane=in_half_plane,
        horizon=fs.length,
        step=fs.step,
        checkpoints=[float(fs.xs[(c + 1) * panel]) for c in range(CHECKPOINTS)],
        partial_values=[float(v) for v in partial],
        integrand_samples=_thin(integrand),
        head=head,
        tail=tail,
        tail_ratio=ratio,
        verdict=verdict,
    )


def propagate_discrete(p: DiscretePotential, z: complex, K: Optional[int] = None) -> List[np.ndarray]:
    """
    w_0 .. w_K for the discrete system.

    Raises:
        DomainError: z = 0 or K beyond the computed prefix
    """
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    K = p.K if K is None else K
    if K < 0 or K > p.K:
        raise DomainError(f"K must lie in [0, {p.K}], got {K}")
    identity = np.eye(p.quadruple.m, dtype=complex)
    w = [identity]
    for k in range(K):
        w.append((identity + (1j / z) * p.C[k]) @ w[-1])
    return w


def safe_horizon(z: complex) -> Optional[int]:
    """Steps before the growing mode seeded by rounding reaches 1e-3 of the decaying one."""
    z = complex(z)
    rho = abs(1.0 + 1j / z) / abs(1.0 - 1j / z)
    if rho <= 1.0:
        return None
    return int(math.floor(13.0 * math.log(10.0) / math.log(rho)))


def weyl_defect_discrete(
    p: DiscretePotential,
    phi_eval: Callable[[complex], np.ndarray],
    z: complex,
    K: Optional[int] = None,
) -> WeylDefectReport:
    """Partial sums of ||w_k(z) [phi(z); I]||_F^2 with the same tail criterion."""
    z = complex(z)
    if z == 0:
        raise DomainError("z must be nonzero")
    bound = max((operator_norm(C) for C in p.C), default=1.0) + 1.0
    in_half_plane = z.imag > bound
    if not in_half_plane:
        logger.warning("weyl_check_outside_half_plane", z=str(z), bound_M=bound)

    if K is None:
        K = p.K
        limit = safe_horizon(z)
        if limit is not None:
            K = min(K, limit)
    w = propagate_discrete(p, z, K)[:K]
    column = np.vstack([np.asarray(phi_eval(z), dtype=complex), np.eye(p.m2)])
    summands = np.array([np.sum(np.abs(wk @ column) ** 2) for wk in w], dtype=float)
    partial = np.cumsum(summands)

    if K < 2:
        head = float(partial[-1]) if K else 0.0
        tail, ratio, verdict = 0.0, math.nan, Verdict.INCONCLUSIVE
        checkpoints: List[float] = []
        partial_values: List[float] = [float(v) for v in partial]
    else:
        half = K // 2
        head = float(partial[half - 1])
        tail = float(partial[-1] - partial[half - 1])
        ratio = tail / head if head > 0 else math.inf
        verdict = _verdict(ratio)
        marks = sorted({max(1, round(K * (c + 1) / CHECKPOINTS)) for c in range(CHECKPOINTS)})
        checkpoints = [float(k) for k in marks]
        partial_values = [float(partial[k - 1]) for k in marks]
    logger.info("weyl_defect_discrete", z=str(z), K=K, tail_ratio=ratio, verdict=verdict.value)

    return WeylDefectReport(
        mode=Convention.DISCRETE,
        z=[z.real, z.imag],
        bound_M=bound,
        z_in_half_plane=in_half_plane,
        horizon=float(K),
        checkpoints=checkpoints,
        partial_values=partial_values,
        integrand_samples=_thin(summands) if summands.size else [],
        head=head,
        tail=tail,
        tail_ratio=ratio,
        verdict=verdict,
    )
