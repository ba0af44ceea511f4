"""
Algebraic Riccati equations of the two inverse procedures.

continuous:  X C*C X + i(AX - XA*) - BB* = 0
discrete:    X C*C X - i(AX - XA*) - BB* = 0

Both are rewritten in the standard form G*X + XG - XKX + Q = 0 with
G = +-i A*, K = C*C, Q = BB*; the wanted positive solution is the
stabilizing one (G - KX stable).
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
from concurrent.futures import ThreadPoolExecutor
import math

import numpy as np
import scipy.linalg as sla
import structlog

from src.config.settings import settings
from src.models.exceptions import (
    ConvergenceError,
    DomainError,
    NonMinimalError,
    PositivityError,
    SingularMatrixError,
    SolverError,
)
from src.models.reports import SensitivityStats
from src.models.schemas import Convention
from src.services.matcore import (
    condition_number,
    hermitian_part,
    is_positive_definite,
    operator_norm,
    solve_linear,
)
from src.services.realization import Realization, is_controllable, is_observable
from src.utils.random_systems import perturbation_rng, random_direction

logger = structlog.get_logger()


@dataclass(frozen=True)
class RiccatiProblem:
    """Riccati data taken from a realization; variant follows its convention."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    variant: Convention = Convention.CONTINUOUS

    @classmethod
    def from_realization(cls, r: Realization) -> "RiccatiProblem":
        return cls(r.A, r.B, r.C, r.convention)

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def sign(self) -> float:
        """Sign of the i(AX - XA*) term."""
        return 1.0 if self.variant == Convention.CONTINUOUS else -1.0

    def scale(self, X: np.ndarray) -> float:
        return (
            operator_norm(X) ** 2 * operator_norm(self.C) ** 2
            + operator_norm(self.A) * operator_norm(X)
            + operator_norm(self.B) ** 2
        )


@dataclass(frozen=True)
class RiccatiSolution:
    """Positive solution with its certificate."""

    X: np.ndarray
    residual_norm: float
    iterations: int
    method: str
    history: List[float] = field(default_factory=list)


def _standard_form(p: RiccatiProblem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    G = p.sign * 1j * p.A.conj().T
    K = p.C.conj().T @ p.C
    Q = p.B @ p.B.conj().T
    return G, K, Q


def residual(p: RiccatiProblem, X: np.ndarray) -> float:
    """Operator norm of the left-hand side at X."""
    A, B, C = p.A, p.B, p.C
    lhs = X @ C.conj().T @ C @ X + p.sign * 1j * (A @ X - X @ A.conj().T) - B @ B.conj().T
    return operator_norm(lhs)


def _hamiltonian_solution(G: np.ndarray, K: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Stabilizing solution from the stable invariant subspace of the Hamiltonian."""
    n = G.shape[0]
    H = np.block([[G, -K], [-Q, -G.conj().T]])
    _, Z, sdim = sla.schur(H, output="complex", sort="lhp")
    if sdim != n:
        raise SolverError(f"Hamiltonian has {sdim} stable eigenvalues, expected {n}")
    U11 = Z[:n, :n]
    U21 = Z[n:, :n]
    condition = condition_number(U11)
    if condition > 1e12:
        raise SingularMatrixError("stable subspace is not a graph", condition=condition)
    # X = U21 U11^{-1}
    X = solve_linear(U11.conj().T, U21.conj().T, "U11*").conj().T
    return hermitian_part(X)


def _lyapunov_step(G: np.ndarray, K: np.ndarray, Q: np.ndarray, X: np.ndarray) -> np.ndarray:
    """One Newton-Kleinman step: A_k* X+ + X+ A_k = -Q - X K X with A_k = G - K X."""
    Ak = G - K @ X
    rhs = -(Q + X @ K @ X)
    X_next = sla.solve_continuous_lyapunov(Ak.conj().T, rhs)
    return hermitian_part(X_next)


def _bass_initial_guess(G: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Stabilizing start X0 = Z^{-1}, (G + bI) Z + Z (G + bI)* = 2K, b > ||G||."""
    n = G.shape[0]
    beta = 1.0 + operator_norm(G)
    Z = sla.solve_continuous_lyapunov(G + beta * np.eye(n), 2.0 * K)
    return hermitian_part(solve_linear(hermitian_part(Z), np.eye(n, dtype=complex), "Bass gramian"))


def _newton_kleinman(
    p: RiccatiProblem,
    X0: np.ndarray,
    max_iter: int,
    tol: float,
    strict: bool = True,
) -> Tuple[np.ndarray, int, List[float]]:
    """
    Newton-Kleinman iteration from a stabilizing X0.

    Stops at relative residual <= tol, or after 3 steps that fail to lower
    the residual below its lowest value since it first fell; the early rise
    from a Bass start is not counted. Returns the best iterate, X0 included.
    With strict=False an exhausted budget also returns the best iterate
    instead of raising.
    """
    G, K, Q = _standard_form(p)
    X = X0
    start = (residual(p, X) / max(p.scale(X), 1e-300), X, 0)
    history = [start[0]]
    best: Optional[Tuple[float, np.ndarray, int]] = None
    floor: Optional[float] = None
    stagnant = 0
    converged = False
    for iteration in range(1, max_iter + 1):
        try:
            X = _lyapunov_step(G, K, Q, X)
        except (ValueError, sla.LinAlgError) as e:
            raise ConvergenceError(f"Lyapunov step failed: {e}", residual=history[-1], iterations=iteration)
        relative = residual(p, X) / max(p.scale(X), 1e-300)
        if not math.isfinite(relative):
            raise ConvergenceError("Newton-Kleinman diverged", residual=relative, iterations=iteration)
        if floor is None and relative < history[-1]:
            floor = relative
        elif floor is not None and relative < floor:
            floor, stagnant = relative, 0
        elif floor is not None:
            stagnant += 1
        history.append(relative)
        if best is None or relative < best[0]:
            best = (relative, X, iteration)
        if relative <= tol or stagnant >= 3:
            converged = True
            break
    if not converged and strict:
        reached = start[0] if best is None else min(start[0], best[0])
        raise ConvergenceError("Newton-Kleinman did not converge", residual=reached, iterations=max_iter)
    chosen = start if best is None or start[0] < best[0] else best
    return chosen[1], chosen[2], history


def check_minimal(p: RiccatiProblem, tol: Optional[float] = None) -> None:
    """Raise NonMinimalError unless {A,B} controllable and {C,A} observable."""
    ctrb = is_controllable(p.A, p.B, tol)
    obsv = is_observable(p.C, p.A, tol)
    if not (ctrb and obsv):
        raise NonMinimalError(
            f"realization is not minimal (controllable rank {ctrb.rank}, observable rank {obsv.rank}, n={p.n})",
            controllable_rank=ctrb.rank,
            observable_rank=obsv.rank,
            order=p.n,
        )


def solve_max_positive(
    p: RiccatiProblem,
    method: str = "hamiltonian",
    max_iter: Optional[int] = None,
    check_minimality: bool = True,
) -> RiccatiSolution:
    """
    Unique positive solution of the continuous or discrete Riccati equation.

    Args:
        p: Riccati problem
        method: "hamiltonian" (Schur subspace + Newton refinement, falls back to
            Newton-Kleinman) or "newton" (Newton-Kleinman from a Bass start)
        max_iter: Newton-Kleinman iteration cap
        check_minimality: Refuse non-minimal data

    Returns:
        RiccatiSolution with Hermitian positive X

    Raises:
        NonMinimalError: data not minimal
        ConvergenceError: residual above tolerance
        PositivityError: solution not positive definite
    """
    max_iter = settings.riccati_max_iter if max_iter is None else max_iter
    tol = settings.riccati_residual_tol
    n = p.n

    if check_minimality:
        check_minimal(p)
    if n == 0:
        return RiccatiSolution(np.zeros((0, 0), dtype=complex), 0.0, 0, method)
    if method not in ("hamiltonian", "newton"):
        raise DomainError(f"unknown Riccati method '{method}'")

    G, K, Q = _standard_form(p)
    used = method
    try:
        if method == "hamiltonian":
            try:
                X0 = _hamiltonian_solution(G, K, Q)
                X, iterations, history = _newton_kleinman(
                    p, X0, settings.riccati_refine_steps, 1e-15, strict=False
                )
            except SolverError as e:
                logger.warning("riccati_hamiltonian_fallback", error=str(e), n=n)
                used = "newton"
                X, iterations, history = _newton_kleinman(p, _bass_initial_guess(G, K), max_iter, 1e-12)
        else:
            X, iterations, history = _newton_kleinman(p, _bass_initial_guess(G, K), max_iter, 1e-12)
    except SolverError as e:
        logger.error("riccati_failed", error=str(e), n=n, method=used)
        raise

    res = residual(p, X)
    scale = p.scale(X)
    if res > tol * scale:
        logger.error("riccati_residual_too_large", residual=res, scale=scale)
        raise ConvergenceError("Riccati residual above tolerance", residual=res, iterations=iterations)
    if not is_positive_definite(X):
        raise PositivityError("Riccati solution is not positive definite")

    logger.debug("riccati_solved", n=n, variant=p.variant.value, method=used, residual=res, iterations=iterations)
    return RiccatiSolution(X=X, residual_norm=res, iterations=iterations, method=used, history=history)


def perturb_problem(p: RiccatiProblem, delta: float, rng: np.random.Generator) -> RiccatiProblem:
    """(A, B, C) moved by complex Gaussian directions of total norm delta / 2."""
    dA, dB, dC = random_direction([p.A.shape, p.B.shape, p.C.shape], 0.5 * delta, rng)
    return RiccatiProblem(p.A + dA, p.B + dB, p.C + dC, p.variant)


def sensitivity_probe(
    p: RiccatiProblem,
    delta: float,
    trials: int,
    seed: int,
    workers: Optional[int] = None,
) -> SensitivityStats:
    """
    Deviation ||X - X~|| over random perturbations with ||dA||+||dB||+||dC|| < delta.

    Trials whose perturbed data lose minimality are skipped and counted.
    Each trial draws from its own sub-seed (seed, trial).
    """
    if delta < 0:
        raise DomainError(f"delta must be >= 0, got {delta}")
    workers = settings.sweep_workers if workers is None else workers
    base = solve_max_positive(p)

    def run_trial(trial: int) -> Optional[float]:
        if delta == 0:
            return 0.0
        perturbed = perturb_problem(p, delta, perturbation_rng(seed, trial))
        try:
            solution = solve_max_positive(perturbed)
        except (NonMinimalError, SolverError) as e:
            logger.debug("sensitivity_trial_skipped", trial=trial, error=str(e))
            return None
        return operator_norm(solution.X - base.X)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run_trial, range(trials)))
    else:
        outcomes = [run_trial(t) for t in range(trials)]

    deviations = [d for d in outcomes if d is not None]
    skipped = len(outcomes) - len(deviations)
    stats = SensitivityStats(
        delta=delta,
        trials=trials,
        skipped=skipped,
        max_deviation=max(deviations) if deviations else math.nan,
        mean_deviation=float(np.mean(deviations)) if deviations else math.nan,
        median_deviation=float(np.median(deviations)) if deviations else math.nan,
        deviations=deviations,
    )
    logger.info("sensitivity_probe_completed", delta=delta, trials=trials, skipped=skipped,
                max_deviation=stats.max_deviation)
    return stats
