"""
Seeded random generators for realizations, unitaries, similarity transforms,
perturbation directions and padded (non-controllable) quadruples.
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.models.schemas import Convention, ReductionTarget
from src.services.quadruple import AdmissibleQuadruple
from src.services.realization import Realization, is_minimal


def perturbation_rng(seed: int, trial: int, row: Optional[int] = None) -> np.random.Generator:
    """Per-trial generator derived from (seed, trial[, row])."""
    entropy = [int(seed), int(trial)] if row is None else [int(seed), int(trial), int(row)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def random_complex(shape: Tuple[int, ...], rng: np.random.Generator) -> np.ndarray:
    """Standard complex Gaussian entries (unit variance)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def random_direction(
    shapes: Sequence[Tuple[int, int]],
    total_norm: float,
    rng: np.random.Generator,
) -> List[np.ndarray]:
    """
    Complex Gaussian matrices rescaled so their operator norms sum to total_norm.

    Args:
        shapes: Shapes of the direction blocks
        total_norm: Target sum of operator norms
        rng: Generator

    Returns:
        One matrix per shape
    """
    blocks = [random_complex(tuple(shape), rng) for shape in shapes]
    norms = [np.linalg.norm(b, 2) if b.size else 0.0 for b in blocks]
    total = float(sum(norms))
    if total == 0.0 or total_norm == 0.0:
        return [np.zeros(tuple(shape), dtype=complex) for shape in shapes]
    return [b * (total_norm / total) for b in blocks]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary (QR of a Gaussian matrix with phase fix)."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    Z = random_complex((n, n), rng)
    Q, R = np.linalg.qr(Z)
    phases = np.diag(R) / np.abs(np.diag(R))
    return Q * phases


def random_similarity(n: int, rng: np.random.Generator, cond_max: float = 100.0) -> np.ndarray:
    """T = U diag(s) V* with singular values log-uniform in [1, cond_max]."""
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    s = np.exp(rng.uniform(0.0, np.log(cond_max), size=n))
    s[0] = 1.0
    U = random_unitary(n, rng)
    V = random_unitary(n, rng)
    return (U * s) @ V.conj().T


def random_minimal_realization(
    n: int,
    m1: int,
    m2: int,
    convention: Convention,
    rng: np.random.Generator,
    attempts: int = 20,
) -> Realization:
    """
    Random minimal realization with Gaussian entries (A scaled by 1/sqrt(n)).

    Raises:
        RuntimeError: no minimal draw within the attempt budget
    """
    b_cols, c_rows = (m1, m2) if Convention(convention) == Convention.CONTINUOUS else (m2, m1)
    for _ in range(attempts):
        A = random_complex((n, n), rng) / np.sqrt(max(n, 1))
        B = random_complex((n, b_cols), rng)
        C = random_complex((c_rows, n), rng)
        r = Realization(A, B, C, convention)
        if is_minimal(r):
            return r
    raise RuntimeError(f"no minimal realization drawn for n={n}, m1={m1}, m2={m2}")


def pad_quadruple(
    core: AdmissibleQuadruple,
    hermitian_block: np.ndarray,
    kappa: np.ndarray,
    target: ReductionTarget,
    mixing: Optional[np.ndarray] = None,
) -> AdmissibleQuadruple:
    """
    Admissible quadruple whose {alpha, theta} pair is not controllable.

    The core (S0 = I) sits in the trailing coordinates. For target theta1,
    theta1 vanishes on the leading block and theta2 carries kappa there:

        alpha = [[H + (i/2) kappa kappa*, 0], [i theta2~ kappa*, alpha~]]

    (roles of theta1/theta2 swap for target theta2). The result is mixed by
    the unitary `mixing` when given.
    """
    target = ReductionTarget(target)
    H = np.atleast_2d(np.asarray(hermitian_block, dtype=complex))
    kappa = np.atleast_2d(np.asarray(kappa, dtype=complex))
    p = H.shape[0]
    n = core.n
    carried, silent = (core.theta2, core.theta1) if target == ReductionTarget.THETA1 else (core.theta1, core.theta2)

    alpha = np.zeros((p + n, p + n), dtype=complex)
    alpha[:p, :p] = H + 0.5j * kappa @ kappa.conj().T
    alpha[p:, :p] = 1j * carried @ kappa.conj().T
    alpha[p:, p:] = core.alpha
    silent_full = np.vstack([np.zeros((p, silent.shape[1]), dtype=complex), silent])
    carried_full = np.vstack([kappa, carried])
    theta1, theta2 = (silent_full, carried_full) if target == ReductionTarget.THETA1 else (carried_full, silent_full)
    S0 = np.eye(p + n, dtype=complex)

    if mixing is not None:
        U = np.asarray(mixing, dtype=complex)
        alpha = U @ alpha @ U.conj().T
        theta1 = U @ theta1
        theta2 = U @ theta2

    return AdmissibleQuadruple.create(alpha, S0, theta1, theta2)
