"""
Dense complex matrix kernel.

Validated wrappers over numpy/scipy for the handful of operations every other
service needs: exponentials, spectra, positivity tests, Gramian integrals,
norms and linear solves. Orders here are small (n <= ~12), so nothing is
optimized for size.
"""
from dataclasses import dataclass
from typing import Optional, Tuple
import math
import warnings

import numpy as np
import scipy.linalg as sla
from scipy.integrate import simpson
import structlog

from src.config.settings import settings
from src.models.exceptions import (
    ConvergenceError,
    DimensionError,
    DomainError,
    PositivityError,
    SingularMatrixError,
    SolverError,
)

logger = structlog.get_logger()

# Largest condition estimate accepted by solve_linear.
MAX_CONDITION = 1.0 / np.finfo(float).eps


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues (with multiplicity) of a square matrix."""

    eigenvalues: np.ndarray
    trace: complex

    @property
    def order(self) -> int:
        return int(self.eigenvalues.shape[0])

    def min_imag(self) -> float:
        return float(np.min(self.eigenvalues.imag)) if self.order else math.inf

    def max_imag(self) -> float:
        return float(np.max(self.eigenvalues.imag)) if self.order else -math.inf

    def distance_to(self, value: complex) -> float:
        if not self.order:
            return math.inf
        return float(np.min(np.abs(self.eigenvalues - value)))

    def contains(self, value: complex, tol: float) -> bool:
        return self.distance_to(value) <= tol


@dataclass(frozen=True)
class PositiveDefiniteCheck:
    """Outcome of is_positive_definite."""

    is_positive: bool
    factor: Optional[np.ndarray]
    reason: str

    def __bool__(self) -> bool:
        return self.is_positive


def as_cmatrix(data, name: str = "matrix") -> np.ndarray:
    """
    Convert input to a finite 2-D complex array (copy).

    Scalars become 1x1 matrices.

    Raises:
        DimensionError: input is not 2-D or has NaN/Inf entries
    """
    arr = np.array(data, dtype=complex)
    if arr.ndim == 0:
        arr = arr.reshape(1, 1)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DimensionError(f"{name} has non-finite entries")
    return arr


def require_square(M: np.ndarray, name: str = "matrix") -> int:
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {M.shape}")
    return int(M.shape[0])


def hermitian_part(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.conj().T)


def operator_norm(M: np.ndarray) -> float:
    """Largest singular value (0 for empty matrices)."""
    M = np.asarray(M)
    if M.size == 0:
        return 0.0
    return float(sla.svdvals(M)[0])


def condition_number(M: np.ndarray) -> float:
    if M.size == 0:
        return 1.0
    return float(np.linalg.cond(M))


def expm(M: np.ndarray) -> np.ndarray:
    """
    Matrix exponential (scaling-and-squaring Padé, via scipy).

    Raises:
        DimensionError: M not square
        SolverError: result overflows double range
    """
    n = require_square(M, "expm argument")
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        result = sla.expm(np.asarray(M, dtype=complex))
    if not np.all(np.isfinite(result)):
        logger.error("expm_overflow", norm=operator_norm(M))
        raise SolverError(f"matrix exponential overflow (norm {operator_norm(M):.3e})")
    return result


def spectrum(M: np.ndarray) -> Spectrum:
    """
    Eigenvalues of a square matrix.

    Raises:
        DimensionError: M not square
        ConvergenceError: the QR iteration failed
    """
    n = require_square(M, "spectrum argument")
    if n == 0:
        return Spectrum(eigenvalues=np.zeros(0, dtype=complex), trace=0j)
    try:
        eigenvalues = sla.eigvals(M)
    except sla.LinAlgError as e:
        logger.error("spectrum_failed", error=str(e), n=n)
        raise ConvergenceError("eigenvalue iteration did not converge", residual=math.nan, iterations=0)
    if not np.all(np.isfinite(eigenvalues)):
        raise ConvergenceError("eigenvalue iteration returned non-finite values", residual=math.nan, iterations=0)
    return Spectrum(eigenvalues=eigenvalues.astype(complex), trace=complex(np.trace(M)))


def is_positive_definite(H: np.ndarray, tol: Optional[float] = None) -> PositiveDefiniteCheck:
    """
    Hermitian positive-definiteness test.

    The Hermitian part is factored after a Hermiticity check at tol * ||H||,
    so small drift from recursions is absorbed.

    Args:
        H: Candidate matrix
        tol: Relative Hermiticity tolerance (settings.hermitian_tol by default)

    Returns:
        PositiveDefiniteCheck with the lower Cholesky factor when positive
    """
    tol = settings.hermitian_tol if tol is None else tol
    H = np.asarray(H, dtype=complex)
    if H.ndim != 2 or H.shape[0] != H.shape[1]:
        return PositiveDefiniteCheck(False, None, "not_square")
    if H.shape[0] == 0:
        return PositiveDefiniteCheck(True, np.zeros((0, 0), dtype=complex), "empty")
    if not np.all(np.isfinite(H)):
        return PositiveDefiniteCheck(False, None, "non_finite")

    scale = operator_norm(H)
    if operator_norm(H - H.conj().T) > tol * scale:
        return PositiveDefiniteCheck(False, None, "not_hermitian")
    try:
        factor = sla.cholesky(hermitian_part(H), lower=True)
    except sla.LinAlgError:
        return PositiveDefiniteCheck(False, None, "non_positive_pivot")
    return PositiveDefiniteCheck(True, factor, "ok")


def lambda_min(H: np.ndarray) -> float:
    """Smallest eigenvalue of the Hermitian part."""
    if H.size == 0:
        return math.inf
    return float(sla.eigvalsh(hermitian_part(H))[0])


def lambda_max(H: np.ndarray) -> float:
    if H.size == 0:
        return -math.inf
    return float(sla.eigvalsh(hermitian_part(H))[-1])


def solve_linear(M: np.ndarray, rhs: np.ndarray, name: str = "matrix") -> np.ndarray:
    """
    Solve M X = rhs by pivoted LU.

    Raises:
        DimensionError: shapes not conformable
        SingularMatrixError: M singular to working precision
    """
    n = require_square(M, name)
    rhs = np.asarray(rhs, dtype=complex)
    vector = rhs.ndim == 1
    if vector:
        rhs = rhs.reshape(-1, 1)
    if rhs.shape[0] != n:
        raise DimensionError(f"right-hand side has {rhs.shape[0]} rows, {name} has order {n}")
    if n == 0:
        out = np.zeros((0, rhs.shape[1]), dtype=complex)
        return out.ravel() if vector else out

    condition = condition_number(M)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularMatrixError(f"{name} is singular to working precision", condition=condition)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            X = sla.solve(M, rhs)
    except sla.LinAlgError:
        raise SingularMatrixError(f"{name} is singular", condition=condition)
    return X.ravel() if vector else X


def hermitian_sqrt(H: np.ndarray, inverse: bool = False) -> np.ndarray:
    """
    Square root (or inverse square root) of a Hermitian positive matrix by eigendecomposition.

    Raises:
        PositivityError: H has a non-positive eigenvalue
    """
    n = require_square(H, "hermitian_sqrt argument")
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    w, V = sla.eigh(hermitian_part(H))
    if w[0] <= 0:
        raise PositivityError(f"matrix is not positive definite (lambda_min {w[0]:.3e})")
    root = np.sqrt(w)
    if inverse:
        root = 1.0 / root
    return hermitian_part((V * root) @ V.conj().T)


def matrix_power(M: np.ndarray, k: int) -> np.ndarray:
    """Integer power; negative k uses the inverse."""
    n = require_square(M, "matrix_power argument")
    if k >= 0:
        return np.linalg.matrix_power(M, k) if n else np.zeros((0, 0), dtype=complex)
    return np.linalg.matrix_power(solve_linear(M, np.eye(n, dtype=complex)), -k)


def _van_loan_step(A: np.ndarray, Q: np.ndarray, x: float) -> Tuple[np.ndarray, np.ndarray]:
    n = A.shape[0]
    block = np.zeros((2 * n, 2 * n), dtype=complex)
    block[:n, :n] = A
    block[:n, n:] = Q
    block[n:, n:] = -A.conj().T
    F = expm(x * block)
    E = F[:n, :n]
    return E, hermitian_part(F[:n, n:] @ E.conj().T)


def propagator_and_gramian(A: np.ndarray, Q: np.ndarray, x: float) -> Tuple[np.ndarray, np.ndarray]:
    """
    Return (e^{xA}, integral_0^x e^{tA} Q e^{tA*} dt).

    The block exponential [[A, Q], [0, -A*]] is taken on x / 2^p with
    ||A|| x / 2^p <= 1/2, then doubled p times via
    G(2c) = E(c) G(c) E(c)* + G(c). Both terms are PSD, so doubling
    loses no relative accuracy.

    Raises:
        DomainError: x < 0
    """
    if x < 0:
        raise DomainError(f"gramian integral needs x >= 0, got {x}")
    n = require_square(A, "gramian generator")
    if Q.shape != (n, n):
        raise DimensionError(f"gramian weight must be {n}x{n}, got {Q.shape}")
    if n == 0:
        empty = np.zeros((0, 0), dtype=complex)
        return empty, empty

    spread = x * operator_norm(A)
    doublings = max(0, int(math.ceil(math.log2(spread / 0.5)))) if spread > 0.5 else 0
    E, G = _van_loan_step(A, Q, x / 2 ** doublings)
    for _ in range(doublings):
        G = hermitian_part(E @ G @ E.conj().T + G)
        E = E @ E
    if not (np.all(np.isfinite(E)) and np.all(np.isfinite(G))):
        raise SolverError(f"gramian integral overflow at x={x}")
    return E, G


def gramian_integral(A: np.ndarray, Q: np.ndarray, x: float) -> np.ndarray:
    """
    Compute integral_0^x e^{tA} Q e^{tA*} dt via the Van Loan block exponential.

    Args:
        A: n x n generator
        Q: n x n PSD weight
        x: Upper limit (>= 0)

    Returns:
        Hermitian PSD n x n matrix
    """
    return propagator_and_gramian(A, Q, x)[1]


def gramian_integral_quadrature(A: np.ndarray, Q: np.ndarray, x: float, samples: int = 2001) -> np.ndarray:
    """Composite-Simpson oracle for gramian_integral."""
    if x < 0:
        raise DomainError(f"gramian integral needs x >= 0, got {x}")
    n = require_square(A, "gramian generator")
    if n == 0 or x == 0:
        return np.zeros((n, n), dtype=complex)
    if samples % 2 == 0:
        samples += 1
    ts = np.linspace(0.0, x, samples)
    values = np.empty((samples, n, n), dtype=complex)
    for idx, t in enumerate(ts):
        E = expm(t * A)
        values[idx] = E @ Q @ E.conj().T
    return hermitian_part(simpson(values, x=ts, axis=0))
