"""
State-space realizations of strictly proper rational matrix functions.

phi(z) = C (zI - A)^{-1} B, with the block sizes fixed by the convention:
continuous systems take B: n x m1, C: m2 x n; discrete systems take
B: n x m2, C: m1 x n.
"""
from dataclasses import dataclass
from typing import Optional, Tuple
import math

import numpy as np
import scipy.linalg as sla
import structlog

from src.config.settings import settings
from src.models.exceptions import DimensionError, PoleProximityError, SingularMatrixError
from src.models.schemas import Convention
from src.services.matcore import (
    as_cmatrix,
    condition_number,
    operator_norm,
    solve_linear,
    spectrum,
    MAX_CONDITION,
)

logger = structlog.get_logger()


@dataclass(frozen=True)
class Realization:
    """Triple (A, B, C) with its convention tag."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    convention: Convention = Convention.CONTINUOUS

    def __post_init__(self):
        A = as_cmatrix(self.A, "A")
        B = as_cmatrix(self.B, "B")
        C = as_cmatrix(self.C, "C")
        n = A.shape[0]
        if A.shape != (n, n):
            raise DimensionError(f"A must be square, got {A.shape}")
        if B.shape[0] != n or C.shape[1] != n:
            raise DimensionError(f"B {B.shape} and C {C.shape} do not conform with A {A.shape}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "convention", Convention(self.convention))

    @property
    def n(self) -> int:
        return int(self.A.shape[0])

    @property
    def m1(self) -> int:
        return int(self.B.shape[1] if self.convention == Convention.CONTINUOUS else self.C.shape[0])

    @property
    def m2(self) -> int:
        return int(self.C.shape[0] if self.convention == Convention.CONTINUOUS else self.B.shape[1])

    def __call__(self, z: complex) -> np.ndarray:
        return evaluate(self, z)


@dataclass(frozen=True)
class RankReport:
    """Krylov rank decision."""

    full: bool
    rank: int
    order: int

    def __bool__(self) -> bool:
        return self.full


def krylov_matrix(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """[B, AB, ..., A^{n-1}B]."""
    n = A.shape[0]
    blocks = []
    current = B
    for _ in range(n):
        blocks.append(current)
        current = A @ current
    if not blocks:
        return np.zeros((0, B.shape[1]), dtype=complex)
    return np.hstack(blocks)


def _pivoted_rank(K: np.ndarray, tol: float) -> Tuple[int, np.ndarray]:
    """Rank of K by column-pivoted QR and the full unitary Q factor."""
    n = K.shape[0]
    if n == 0:
        return 0, np.zeros((0, 0), dtype=complex)
    if K.shape[1] == 0:
        return 0, np.eye(n, dtype=complex)
    Q, R, _ = sla.qr(K, pivoting=True, mode="full")
    diag = np.abs(np.diag(R))
    largest = float(np.max(np.linalg.norm(K, axis=0)))
    if largest == 0.0:
        return 0, Q
    rank = int(np.sum(diag > tol * largest))
    return rank, Q


def krylov_basis(A: np.ndarray, B: np.ndarray, tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Orthonormal bases of the Krylov image span{A^k B} and of its complement.

    Returns:
        (V, W) with V: n x r spanning the image, W: n x (n - r); [V W] is unitary
    """
    tol = settings.rank_tol if tol is None else tol
    rank, Q = _pivoted_rank(krylov_matrix(A, B), tol)
    return Q[:, :rank], Q[:, rank:]


def is_controllable(A: np.ndarray, B: np.ndarray, tol: Optional[float] = None) -> RankReport:
    """
    Kalman rank test for the pair {A, B}.

    Args:
        A: n x n matrix
        B: n x p matrix
        tol: Rank tolerance relative to the largest Krylov column norm

    Returns:
        RankReport (truthy iff rank = n)
    """
    tol = settings.rank_tol if tol is None else tol
    A = as_cmatrix(A, "A")
    B = as_cmatrix(B, "B")
    if B.shape[0] != A.shape[0]:
        raise DimensionError(f"B has {B.shape[0]} rows, A has order {A.shape[0]}")
    n = A.shape[0]
    rank, _ = _pivoted_rank(krylov_matrix(A, B), tol)
    return RankReport(full=rank == n, rank=rank, order=n)


def is_observable(C: np.ndarray, A: np.ndarray, tol: Optional[float] = None) -> RankReport:
    """Dual of is_controllable via (A*, C*)."""
    C = as_cmatrix(C, "C")
    A = as_cmatrix(A, "A")
    return is_controllable(A.conj().T, C.conj().T, tol)


def is_minimal(r: Realization, tol: Optional[float] = None) -> bool:
    return bool(is_controllable(r.A, r.B, tol)) and bool(is_observable(r.C, r.A, tol))


def minimal_realization(r: Realization, tol: Optional[float] = None) -> Realization:
    """
    Two-stage Kalman reduction.

    First restrict to the controllable subspace (A-invariant, contains Im B),
    then to the orthogonal complement of the unobservable subspace.
    """
    V, _ = krylov_basis(r.A, r.B, tol)
    A1 = V.conj().T @ r.A @ V
    B1 = V.conj().T @ r.B
    C1 = r.C @ V

    U, _ = krylov_basis(A1.conj().T, C1.conj().T, tol)
    A2 = U.conj().T @ A1 @ U
    B2 = U.conj().T @ B1
    C2 = C1 @ U

    reduced = Realization(A2, B2, C2, r.convention)
    if reduced.n != r.n:
        logger.info("realization_reduced", original_n=r.n, reduced_n=reduced.n)
    return reduced


def mcmillan_degree(r: Realization, tol: Optional[float] = None) -> int:
    return minimal_realization(r, tol).n


def evaluate(r: Realization, z: complex) -> np.ndarray:
    """
    Evaluate phi(z) = C (zI - A)^{-1} B by a linear solve.

    Raises:
        PoleProximityError: z within pole_tol * (1 + ||A||) of an eigenvalue of A
    """
    n = r.n
    if n == 0:
        return np.zeros((r.C.shape[0], r.B.shape[1]), dtype=complex)
    distance = spectrum(r.A).distance_to(z)
    if distance <= settings.pole_tol * (1.0 + operator_norm(r.A)):
        raise PoleProximityError(f"z={z} is at a pole of the realization", distance=distance)
    return r.C @ solve_linear(z * np.eye(n) - r.A, r.B, "zI - A")


def similarity(r: Realization, T: np.ndarray) -> Realization:
    """
    Change of state basis: (T^{-1} A T, T^{-1} B, C T).

    Raises:
        SingularMatrixError: T singular to working precision
    """
    T = as_cmatrix(T, "T")
    if T.shape != (r.n, r.n):
        raise DimensionError(f"similarity must be {r.n}x{r.n}, got {T.shape}")
    condition = condition_number(T)
    if not np.isfinite(condition) or condition > MAX_CONDITION:
        raise SingularMatrixError("similarity transform is singular", condition=condition)
    logger.debug("similarity_applied", n=r.n, condition=condition)
    return Realization(
        solve_linear(T, r.A @ T, "T"),
        solve_linear(T, r.B, "T"),
        r.C @ T,
        r.convention,
    )


def probe_points(scale: float, count: Optional[int] = None) -> np.ndarray:
    """
    Points on the circle |z - 3ir| = r with r = 1 + scale.

    Every point has |z| >= 2r, so it avoids every spectrum of norm <= scale.
    """
    count = settings.probe_count if count is None else count
    radius = 1.0 + scale
    k = np.arange(count)
    return radius * np.exp(2j * math.pi * k / count) + 3j * radius


def max_relative_deviation(f, g, points) -> float:
    """max_z ||f(z) - g(z)|| / max(||g(z)||, tiny) over the probe points."""
    worst = 0.0
    for z in points:
        reference = g(z)
        denominator = max(operator_norm(reference), 1e-300)
        worst = max(worst, operator_norm(f(z) - reference) / denominator)
    return worst
