"""
Admissible quadruples {alpha, S0, theta1, theta2}.

A quadruple is admissible when S0 > 0 and
    alpha S0 - S0 alpha* = i (theta1 theta1* + theta2 theta2*).
It is strongly admissible when both {alpha, theta1} and {alpha, theta2}
are controllable.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np
import structlog

from src.config.settings import settings
from src.models.exceptions import DimensionError, PositivityError
from src.models.reports import AdmissibilityReport, SpectrumSummary
from src.services.matcore import (
    as_cmatrix,
    hermitian_sqrt,
    is_positive_definite,
    operator_norm,
    solve_linear,
    spectrum,
)
from src.services.realization import is_controllable

logger = structlog.get_logger()

# Spectral points are "in" sigma(alpha) within this multiple of (1 + ||alpha||).
SPECTRUM_TOL = 1e-10


@dataclass(frozen=True)
class AdmissibleQuadruple:
    """Quadruple with stored controllability flags."""

    alpha: np.ndarray
    S0: np.ndarray
    theta1: np.ndarray
    theta2: np.ndarray
    controllable_theta1: bool = False
    controllable_theta2: bool = False

    @classmethod
    def create(
        cls,
        alpha,
        S0,
        theta1,
        theta2,
        tol: Optional[float] = None,
    ) -> "AdmissibleQuadruple":
        """Validate shapes and compute the controllability flags."""
        alpha = as_cmatrix(alpha, "alpha")
        S0 = as_cmatrix(S0, "S0")
        theta1 = as_cmatrix(theta1, "theta1")
        theta2 = as_cmatrix(theta2, "theta2")
        n = alpha.shape[0]
        if alpha.shape != (n, n) or S0.shape != (n, n):
            raise DimensionError(f"alpha {alpha.shape} and S0 {S0.shape} must be {n}x{n}")
        if theta1.shape[0] != n or theta2.shape[0] != n:
            raise DimensionError(f"theta1 {theta1.shape} and theta2 {theta2.shape} must have {n} rows")
        return cls(
            alpha=alpha,
            S0=S0,
            theta1=theta1,
            theta2=theta2,
            controllable_theta1=bool(is_controllable(alpha, theta1, tol)),
            controllable_theta2=bool(is_controllable(alpha, theta2, tol)),
        )

    @property
    def n(self) -> int:
        return int(self.alpha.shape[0])

    @property
    def m1(self) -> int:
        return int(self.theta1.shape[1])

    @property
    def m2(self) -> int:
        return int(self.theta2.shape[1])

    @property
    def m(self) -> int:
        return self.m1 + self.m2

    @property
    def j(self) -> np.ndarray:
        return signature_matrix(self.m1, self.m2)

    @property
    def strongly_admissible(self) -> bool:
        return self.controllable_theta1 and self.controllable_theta2

    def scale(self) -> float:
        return (
            operator_norm(self.alpha) * operator_norm(self.S0)
            + operator_norm(self.theta1) ** 2
            + operator_norm(self.theta2) ** 2
        )


def signature_matrix(m1: int, m2: int) -> np.ndarray:
    """j = diag(I_m1, -I_m2)."""
    return np.diag(np.concatenate([np.ones(m1), -np.ones(m2)])).astype(complex)


def empty_quadruple(m1: int, m2: int) -> AdmissibleQuadruple:
    """n = 0 quadruple; generates v = 0 and C_k = j."""
    return AdmissibleQuadruple.create(
        np.zeros((0, 0)), np.zeros((0, 0)), np.zeros((0, m1)), np.zeros((0, m2))
    )


def identity_residual(q: AdmissibleQuadruple) -> float:
    lhs = q.alpha @ q.S0 - q.S0 @ q.alpha.conj().T
    rhs = 1j * (q.theta1 @ q.theta1.conj().T + q.theta2 @ q.theta2.conj().T)
    return operator_norm(lhs - rhs)


def spectrum_summary(alpha: np.ndarray) -> SpectrumSummary:
    spec = spectrum(alpha)
    tol = SPECTRUM_TOL * (1.0 + operator_norm(alpha))
    if spec.order == 0:
        return SpectrumSummary()
    return SpectrumSummary(
        eigenvalues=[[float(v.real), float(v.imag)] for v in spec.eigenvalues],
        min_imag=spec.min_imag(),
        max_imag=spec.max_imag(),
        contains_i=spec.contains(1j, tol),
        contains_zero=spec.contains(0j, tol),
        contains_minus_i=spec.contains(-1j, tol),
    )


def check_admissible(q: AdmissibleQuadruple, tol: Optional[float] = None) -> AdmissibilityReport:
    """
    Residual report for the admissibility identity.

    Never raises on findings; the verdict is in the report.
    """
    tol = settings.riccati_residual_tol if tol is None else tol
    residual = identity_residual(q)
    scale = q.scale()
    relative = residual / scale if scale > 0 else residual
    positivity = is_positive_definite(q.S0)
    summary = spectrum_summary(q.alpha)

    in_upper = None
    if q.controllable_theta1 and q.n > 0:
        in_upper = summary.min_imag > SPECTRUM_TOL * (1.0 + operator_norm(q.alpha))

    admissible = positivity.is_positive and residual <= tol * max(scale, 1.0)
    return AdmissibilityReport(
        identity_residual=residual,
        scale=scale,
        relative_residual=relative,
        s0_positive=positivity.is_positive,
        s0_reason=positivity.reason,
        controllable_theta1=q.controllable_theta1,
        controllable_theta2=q.controllable_theta2,
        spectrum=summary,
        spectrum_in_upper_half_plane=in_upper,
        admissible=admissible,
        strongly_admissible=admissible and q.strongly_admissible,
    )


def _require_positive(X: np.ndarray) -> None:
    check = is_positive_definite(X)
    if not check:
        raise PositivityError(f"Riccati solution is not positive definite ({check.reason})")


def _right_divide_by_hermitian(M: np.ndarray, X: np.ndarray) -> np.ndarray:
    """M X^{-1} for Hermitian X."""
    return solve_linear(X, M.conj().T, "X").conj().T


def from_continuous(A: np.ndarray, B: np.ndarray, C: np.ndarray, X: np.ndarray) -> AdmissibleQuadruple:
    """
    Quadruple of the continuous inverse procedure:
    alpha = A + i B B* X^{-1}, S0 = X, theta1 = B, theta2 = i X C*.

    Raises:
        PositivityError: X not positive definite
        SingularMatrixError: X singular
    """
    _require_positive(X)
    alpha = A + 1j * _right_divide_by_hermitian(B @ B.conj().T, X)
    q = AdmissibleQuadruple.create(alpha, X, B, 1j * X @ C.conj().T)
    logger.debug("quadruple_from_continuous", n=q.n, m1=q.m1, m2=q.m2)
    return q


def from_discrete(A: np.ndarray, B: np.ndarray, C: np.ndarray, X: np.ndarray) -> AdmissibleQuadruple:
    """
    Quadruple of the discrete inverse procedure:
    alpha = -A + i B B* X^{-1}, S0 = X, theta1 = X C*, theta2 = i B.

    Whether 0 or i lies in sigma(alpha) is reported by check_admissible and
    enforced by discrete synthesis.
    """
    _require_positive(X)
    alpha = -A + 1j * _right_divide_by_hermitian(B @ B.conj().T, X)
    q = AdmissibleQuadruple.create(alpha, X, X @ C.conj().T, 1j * B)
    summary = spectrum_summary(q.alpha)
    if summary.contains_i or summary.contains_zero:
        logger.warning("discrete_spectrum_condition_violated", contains_i=summary.contains_i,
                       contains_zero=summary.contains_zero)
    logger.debug("quadruple_from_discrete", n=q.n, m1=q.m1, m2=q.m2)
    return q


def normalize_s0(q: AdmissibleQuadruple) -> AdmissibleQuadruple:
    """
    Map to the equivalent quadruple with S0 = I:
    {S0^{-1/2} alpha S0^{1/2}, I, S0^{-1/2} theta1, S0^{-1/2} theta2}.
    """
    n = q.n
    if n == 0 or np.array_equal(q.S0, np.eye(n)):
        return q
    root = hermitian_sqrt(q.S0)
    inv_root = hermitian_sqrt(q.S0, inverse=True)
    return AdmissibleQuadruple(
        alpha=inv_root @ q.alpha @ root,
        S0=np.eye(n, dtype=complex),
        theta1=inv_root @ q.theta1,
        theta2=inv_root @ q.theta2,
        controllable_theta1=q.controllable_theta1,
        controllable_theta2=q.controllable_theta2,
    )


def quadruple_distance(q: AdmissibleQuadruple, other: AdmissibleQuadruple) -> float:
    """||alpha - alpha~|| + ||S0 - S0~|| + ||theta1 - theta1~|| + ||theta2 - theta2~||."""
    if (q.n, q.m1, q.m2) != (other.n, other.m1, other.m2):
        raise DimensionError(
            f"quadruple dimensions differ: {(q.n, q.m1, q.m2)} vs {(other.n, other.m1, other.m2)}"
        )
    return (
        operator_norm(q.alpha - other.alpha)
        + operator_norm(q.S0 - other.S0)
        + operator_norm(q.theta1 - other.theta1)
        + operator_norm(q.theta2 - other.theta2)
    )
