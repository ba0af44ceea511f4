"""
Reduction of admissible quadruples to lower order.

A quadruple whose {alpha, theta} pair is not controllable is replaced by
its restriction to the Krylov subspace of that pair. After S0 is brought to
the identity, the restriction generates the same potential.
"""
from typing import Tuple

import numpy as np
import structlog

from src.models.exceptions import SolverError
from src.models.reports import ReductionReport
from src.models.schemas import ReductionTarget
from src.services.matcore import operator_norm
from src.services.quadruple import AdmissibleQuadruple, empty_quadruple, normalize_s0, signature_matrix
from src.services.realization import is_controllable, krylov_basis

logger = structlog.get_logger()

# Prefix length used to confirm that an order-zero reduction is consistent.
TRIVIAL_CHECK_K = 20


def _target_theta(q: AdmissibleQuadruple, target: ReductionTarget) -> np.ndarray:
    return q.theta1 if target == ReductionTarget.THETA1 else q.theta2


def _assert_trivial_potential(q: AdmissibleQuadruple) -> None:
    """An order-zero reduction must come from a quadruple with C_k = j."""
    from src.services.inverse_discrete import c_k_sequence

    j = signature_matrix(q.m1, q.m2)
    generated = c_k_sequence(q, TRIVIAL_CHECK_K, method="recursion", allow_i_in_spectrum=True)
    deviation = max((operator_norm(C - j) for C in generated.C), default=0.0)
    if deviation > 1e-8 * (1.0 + q.scale()):
        logger.error("reduction_inconsistent", deviation=deviation)
        raise SolverError(f"reduction to order 0 but the quadruple generates C_k != j (deviation {deviation:.2e})")


def reduce_quadruple(q: AdmissibleQuadruple, which: str = ReductionTarget.THETA1) -> AdmissibleQuadruple:
    """
    One reduction step with respect to theta1 or theta2.

    Returns the input unchanged when the pair is already controllable.

    Args:
        q: Admissible quadruple
        which: "theta1" or "theta2"

    Returns:
        Quadruple of order rank(Krylov) with S0 = I

    Raises:
        SolverError: order-zero reduction of a quadruple with a nontrivial potential
    """
    target = ReductionTarget(which)
    theta = _target_theta(q, target)
    if q.n == 0 or is_controllable(q.alpha, theta):
        return q

    normalized = normalize_s0(q)
    V, W = krylov_basis(normalized.alpha, _target_theta(normalized, target))
    reduced_order = V.shape[1]
    kappa = W.conj().T @ (normalized.theta2 if target == ReductionTarget.THETA1 else normalized.theta1)
    logger.info(
        "quadruple_reduced",
        target=target.value,
        order=q.n,
        reduced_order=reduced_order,
        kappa_norm=operator_norm(kappa) if kappa.size else 0.0,
    )

    if reduced_order == 0:
        _assert_trivial_potential(q)
        return empty_quadruple(q.m1, q.m2)

    return AdmissibleQuadruple.create(
        V.conj().T @ normalized.alpha @ V,
        np.eye(reduced_order, dtype=complex),
        V.conj().T @ normalized.theta1,
        V.conj().T @ normalized.theta2,
    )


def zero_theta2_replacement(m1: int, m2: int) -> AdmissibleQuadruple:
    """
    Order-one quadruple with theta2 = 0; generates v = 0 and C_k = j.
    Used where a nonempty quadruple is required.
    """
    theta1 = np.zeros((1, m1), dtype=complex)
    if m1:
        theta1[0, 0] = 1.0
    # alpha - alpha* = i theta1 theta1*; real and nonzero when m1 = 0.
    alpha = np.array([[0.5j if m1 else 1.0 + 0j]])
    return AdmissibleQuadruple.create(alpha, np.eye(1), theta1, np.zeros((1, m2), dtype=complex))


def reduce_to_strongly_admissible(
    q: AdmissibleQuadruple, max_steps: int = 64
) -> Tuple[AdmissibleQuadruple, ReductionReport]:
    """
    Alternate theta1 and theta2 reductions until both pairs are controllable.

    The order strictly decreases at every step, so the loop ends at a strongly
    admissible quadruple or at order zero.
    """
    dimensions = [q.n]
    steps = []
    current = q
    for _ in range(max_steps):
        if current.n == 0 or current.strongly_admissible:
            break
        target = ReductionTarget.THETA1 if not current.controllable_theta1 else ReductionTarget.THETA2
        reduced = reduce_quadruple(current, target)
        if reduced.n >= current.n:
            message = f"reduction w.r.t. {target.value} did not lower the order ({current.n})"
            logger.warning("reduction_stalled", order=current.n, target=target.value)
            return current, ReductionReport(dimensions=dimensions, steps=steps, strongly_admissible=False,
                                            message=message)
        current = reduced
        steps.append(target.value)
        dimensions.append(current.n)

    reached = current.n == 0 or current.strongly_admissible
    return current, ReductionReport(
        dimensions=dimensions,
        steps=steps,
        strongly_admissible=reached,
        message=None if reached else f"not strongly admissible after {max_steps} steps",
    )
