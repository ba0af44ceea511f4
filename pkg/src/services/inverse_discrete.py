"""
Discrete inverse problem: potentials {C_k} of the system
    y_{k+1}(z) = (I_m + (i/z) C_k) y_k(z).

C_k = j + Lambda_k* S_k^{-1} Lambda_k - Lambda_{k+1}* S_{k+1}^{-1} Lambda_{k+1}, with
    Lambda_{k+1} = Lambda_k + i alpha^{-1} Lambda_k j,
    S_{k+1} = S_k + alpha^{-1} S_k alpha*^{-1} + alpha^{-1} Lambda_k j Lambda_k* alpha*^{-1}.

S_k grows geometrically. When {alpha, theta1} is controllable the quadratic
forms Lambda_k* S_k^{-1} Lambda_k are taken from the balanced matrices
    Rb_k = T^{-k} R_k T^{-k}*,  T = (alpha - i)^{-1} (alpha + i),
which converge to a positive limit:
    Rb_{k+1} = T^{-1} (Rb_k + 2 D D*) T^{-1}*,  D = (alpha - i)^{-1} theta1,
    Lambda_k* S_k^{-1} Lambda_k = [theta1  T^{-k} theta2]* Rb_k^{-1} [theta1  T^{-k} theta2].

Each computed C_k is replaced by the nearest Hermitian involution; the largest
such correction is kept as the synthesis defect.
"""
from dataclasses import dataclass
from functools import cached_property
from typing import List, Optional, Tuple

import numpy as np
import scipy.linalg as sla
import structlog

from src.config.settings import settings
from src.models.exceptions import (
    DomainError,
    NonMinimalError,
    PoleProximityError,
    PositivityError,
    SchemaError,
    SpectrumConditionError,
)
from src.models.reports import AsymptoticsReport, StructureReport, VerificationReport
from src.models.schemas import Convention
from src.services.matcore import (
    hermitian_part,
    is_positive_definite,
    lambda_min,
    matrix_power,
    operator_norm,
    solve_linear,
    spectrum,
)
from src.services.quadruple import (
    AdmissibleQuadruple,
    check_admissible,
    from_discrete,
    spectrum_summary,
)
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

SYNTHESIS_METHODS = ("auto", "resolvent", "recursion")


@dataclass(frozen=True)
class DiscretePotential:
    """Prefix C_0..C_{K-1} of a discrete potential and its generating quadruple."""

    quadruple: AdmissibleQuadruple
    C: np.ndarray
    method: str = "resolvent"
    riccati: Optional[RiccatiSolution] = None
    realization: Optional[Realization] = None
    reduced_from: Optional[int] = None
    synthesis_defect: float = 0.0

    @property
    def K(self) -> int:
        return int(self.C.shape[0])

    @property
    def m1(self) -> int:
        return self.quadruple.m1

    @property
    def m2(self) -> int:
        return self.quadruple.m2

    @property
    def j(self) -> np.ndarray:
        return self.quadruple.j

    def __len__(self) -> int:
        return self.K

    @cached_property
    def lambdas(self) -> List[np.ndarray]:
        return lambda_sequence(self.quadruple, self.K)

    @cached_property
    def s_matrices(self) -> List[np.ndarray]:
        return s_sequence(self.quadruple, self.K)

    @cached_property
    def r_matrices(self) -> List[np.ndarray]:
        return r_k_sequence(self.quadruple, self.K)

    @cached_property
    def q_matrices(self) -> List[np.ndarray]:
        return q_k_sequence(self.quadruple, self.K)

    @cached_property
    def psis(self) -> List[np.ndarray]:
        return psi_sequence(self.quadruple, self.K)


def default_K(n: int) -> int:
    return max(5 * n + 20, settings.discrete_min_K)


def _identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def _alpha_inverse(q: AdmissibleQuadruple) -> np.ndarray:
    return solve_linear(q.alpha, _identity(q.n), "alpha")


def check_spectrum(q: AdmissibleQuadruple, allow_i_in_spectrum: bool = False) -> None:
    """
    Enforce 0 not in sigma(alpha), and i not in sigma(alpha) unless overridden.

    Raises:
        SpectrumConditionError: condition violated
    """
    if q.n == 0:
        return
    summary = spectrum_summary(q.alpha)
    if summary.contains_zero:
        raise SpectrumConditionError("alpha is singular (0 in its spectrum)")
    if summary.contains_i:
        if not allow_i_in_spectrum:
            raise SpectrumConditionError("i lies in the spectrum of alpha; discrete synthesis refused")
        logger.warning("i_in_spectrum_override", eigenvalues=summary.eigenvalues)


def recursion_step(
    q: AdmissibleQuadruple,
    lam: np.ndarray,
    S: np.ndarray,
    alpha_inv: Optional[np.ndarray] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    One step (Lambda_k, S_k) -> (Lambda_{k+1}, S_{k+1}).

    Raises:
        SingularMatrixError: alpha singular
    """
    ainv = _alpha_inverse(q) if alpha_inv is None else alpha_inv
    j = q.j
    lam_next = lam + 1j * ainv @ lam @ j
    S_next = S + ainv @ S @ ainv.conj().T + ainv @ lam @ j @ lam.conj().T @ ainv.conj().T
    return lam_next, hermitian_part(S_next)


def lambda_sequence(q: AdmissibleQuadruple, K: int) -> List[np.ndarray]:
    """Lambda_0..Lambda_K by recursion."""
    lam = np.hstack([q.theta1, q.theta2])
    out = [lam]
    if q.n == 0:
        return out * (K + 1)
    ainv = _alpha_inverse(q)
    S = q.S0
    for _ in range(K):
        lam, S = recursion_step(q, lam, S, ainv)
        out.append(lam)
    return out


def s_sequence(q: AdmissibleQuadruple, K: int) -> List[np.ndarray]:
    """S_0..S_K by recursion."""
    out = [q.S0]
    if q.n == 0:
        return out * (K + 1)
    ainv = _alpha_inverse(q)
    lam, S = np.hstack([q.theta1, q.theta2]), q.S0
    for _ in range(K):
        lam, S = recursion_step(q, lam, S, ainv)
        out.append(S)
    return out


def explicit_lambda(q: AdmissibleQuadruple, k: int) -> np.ndarray:
    """Lambda_k = [(I + i alpha^{-1})^k theta1, (I - i alpha^{-1})^k theta2]."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if q.n == 0:
        return np.hstack([q.theta1, q.theta2])
    ainv = _alpha_inverse(q)
    identity = _identity(q.n)
    return np.hstack([
        matrix_power(identity + 1j * ainv, k) @ q.theta1,
        matrix_power(identity - 1j * ainv, k) @ q.theta2,
    ])


def _require_positive(M: np.ndarray, label: str, k: int) -> None:
    check = is_positive_definite(M)
    if not check:
        logger.error("discrete_positivity_lost", matrix=label, k=k, reason=check.reason)
        raise PositivityError(f"{label}_{k} is not positive definite ({check.reason})")


def _forms_resolvent(q: AdmissibleQuadruple, K: int) -> List[np.ndarray]:
    n = q.n
    identity = _identity(n)
    T_inv = solve_linear(q.alpha + 1j * identity, q.alpha - 1j * identity, "alpha + iI")
    D = solve_linear(q.alpha - 1j * identity, q.theta1, "alpha - iI")
    increment = 2.0 * D @ D.conj().T

    Rb, eta = q.S0, q.theta2
    forms = []
    for k in range(K + 1):
        _require_positive(Rb, "Rb", k)
        W = np.hstack([q.theta1, eta])
        # W* Rb^{-1} W = Y* Y with Rb = L L*, L Y = W
        Y = sla.solve_triangular(sla.cholesky(Rb, lower=True), W, lower=True)
        forms.append(Y.conj().T @ Y)
        Rb = hermitian_part(T_inv @ (Rb + increment) @ T_inv.conj().T)
        eta = T_inv @ eta
    return forms


def _forms_recursion(q: AdmissibleQuadruple, K: int) -> List[np.ndarray]:
    ainv = _alpha_inverse(q)
    lam, S = np.hstack([q.theta1, q.theta2]), q.S0
    forms = []
    for k in range(K + 1):
        _require_positive(S, "S", k)
        forms.append(hermitian_part(lam.conj().T @ solve_linear(S, lam, "S_k")))
        lam, S = recursion_step(q, lam, S, ainv)
    return forms


def c_k_sequence(
    q: AdmissibleQuadruple,
    K: int,
    method: str = "auto",
    allow_i_in_spectrum: bool = False,
) -> DiscretePotential:
    """
    C_0..C_{K-1} generated by the quadruple.

    Args:
        q: Admissible quadruple
        K: Number of matrices
        method: "resolvent" (balanced, needs {alpha, theta1} controllable and
            i not in sigma(alpha)), "recursion" (defining recursion) or "auto"
        allow_i_in_spectrum: Proceed (with a warning) when i is in sigma(alpha)

    Raises:
        SpectrumConditionError: 0 in sigma(alpha), or i without override
        PositivityError: S_k (or Rb_k) loses positivity
    """
    if K < 0:
        raise DomainError(f"K must be >= 0, got {K}")
    if method not in SYNTHESIS_METHODS:
        raise DomainError(f"unknown synthesis method '{method}', expected one of {SYNTHESIS_METHODS}")
    j = q.j
    if q.n == 0:
        return DiscretePotential(q, np.array([j] * K, dtype=complex).reshape(K, q.m, q.m), "trivial")

    check_spectrum(q, allow_i_in_spectrum)
    contains_i = spectrum_summary(q.alpha).contains_i
    if method == "auto":
        method = "resolvent" if q.controllable_theta1 and not contains_i else "recursion"
    if method == "resolvent" and contains_i:
        raise SpectrumConditionError("resolvent synthesis needs i outside the spectrum of alpha")

    forms = _forms_resolvent(q, K) if method == "resolvent" else _forms_recursion(q, K)
    C = np.empty((K, q.m, q.m), dtype=complex)
    defect = 0.0
    for k in range(K):
        C[k], moved = nearest_involution(j + forms[k] - forms[k + 1])
        defect = max(defect, moved)
    logger.debug("c_k_sequence_computed", n=q.n, K=K, method=method, synthesis_defect=defect)
    return DiscretePotential(q, C, method, synthesis_defect=defect)


def nearest_involution(M: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Closest Hermitian involution U sign(L) U* to M, with ||M - result||.

    U, L from the eigendecomposition of the Hermitian part of M; eigenvalue
    signs (0 counted negative) fix the signature.
    """
    eigenvalues, U = sla.eigh(hermitian_part(M))
    signs = np.where(eigenvalues > 0, 1.0, -1.0)
    C = (U * signs) @ U.conj().T
    return C, operator_norm(M - C)


def _spectral_guard(q: AdmissibleQuadruple, point: complex, label: str) -> None:
    summary = spectrum_summary(q.alpha)
    flags = {1j: summary.contains_i, -1j: summary.contains_minus_i, 0j: summary.contains_zero}
    if flags[point] or summary.contains_zero:
        raise SpectrumConditionError(f"{label} needs 0 and {point} outside the spectrum of alpha")


def r_k_sequence(q: AdmissibleQuadruple, K: int, form: str = "increment") -> List[np.ndarray]:
    """
    R_0..R_K with R_k = (I - i alpha^{-1})^{-k} S_k (I + i alpha*^{-1})^{-k}.

    form="definition" conjugates S_k; form="increment" sums
    R_{k+1} - R_k = 2 (T^k D)(T^k D)*, T = (alpha - i)^{-1}(alpha + i), D = (alpha - i)^{-1} theta1.
    """
    if q.n == 0:
        return [q.S0] * (K + 1)
    _spectral_guard(q, 1j, "R_k")
    identity = _identity(q.n)
    if form == "definition":
        M_inv = solve_linear(identity - 1j * _alpha_inverse(q), identity, "I - i alpha^{-1}")
        P = identity
        out = []
        for S in s_sequence(q, K):
            out.append(hermitian_part(P @ S @ P.conj().T))
            P = M_inv @ P
        return out
    if form == "increment":
        T = solve_linear(q.alpha - 1j * identity, q.alpha + 1j * identity, "alpha - iI")
        Y = solve_linear(q.alpha - 1j * identity, q.theta1, "alpha - iI")
        R = q.S0
        out = [R]
        for _ in range(K):
            R = hermitian_part(R + 2.0 * Y @ Y.conj().T)
            out.append(R)
            Y = T @ Y
        return out
    raise DomainError(f"unknown form '{form}'")


def q_k_sequence(q: AdmissibleQuadruple, K: int, form: str = "increment") -> List[np.ndarray]:
    """
    Q_0..Q_K with Q_k = (I + i alpha^{-1})^{-k} S_k (I - i alpha*^{-1})^{-k}.

    form="increment" uses Q_{k+1} - Q_k = -2 G_k G_k*,
    G_k = (alpha + i)^{-k-1} (alpha - i)^k theta2.
    """
    if q.n == 0:
        return [q.S0] * (K + 1)
    _spectral_guard(q, -1j, "Q_k")
    identity = _identity(q.n)
    if form == "definition":
        N_inv = solve_linear(identity + 1j * _alpha_inverse(q), identity, "I + i alpha^{-1}")
        P = identity
        out = []
        for S in s_sequence(q, K):
            out.append(hermitian_part(P @ S @ P.conj().T))
            P = N_inv @ P
        return out
    if form == "increment":
        U = solve_linear(q.alpha + 1j * identity, q.alpha - 1j * identity, "alpha + iI")
        G = solve_linear(q.alpha + 1j * identity, q.theta2, "alpha + iI")
        Qk = q.S0
        out = [Qk]
        for _ in range(K):
            Qk = hermitian_part(Qk - 2.0 * G @ G.conj().T)
            out.append(Qk)
            G = U @ G
        return out
    raise DomainError(f"unknown form '{form}'")


def psi_sequence(q: AdmissibleQuadruple, K: int) -> List[np.ndarray]:
    """Psi_k = (alpha - i)^{-k} (alpha + i)^k theta1 for k = 0..K."""
    if q.n == 0:
        return [q.theta1] * (K + 1)
    _spectral_guard(q, 1j, "Psi_k")
    identity = _identity(q.n)
    T = solve_linear(q.alpha - 1j * identity, q.alpha + 1j * identity, "alpha - iI")
    out = [q.theta1]
    for _ in range(K):
        out.append(T @ out[-1])
    return out


def s_identity_residuals(q: AdmissibleQuadruple, K: int) -> List[float]:
    """Scaled ||alpha S_k - S_k alpha* - i Lambda_k Lambda_k*|| for k = 0..K."""
    out = []
    for lam, S in zip(lambda_sequence(q, K), s_sequence(q, K)):
        lhs = q.alpha @ S - S @ q.alpha.conj().T - 1j * lam @ lam.conj().T
        scale = operator_norm(q.alpha) * operator_norm(S) + operator_norm(lam) ** 2
        out.append(operator_norm(lhs) / scale if scale else 0.0)
    return out


def r_identity_residuals(q: AdmissibleQuadruple, K: int) -> List[float]:
    """Scaled ||alpha R_k - R_k alpha* - i [Psi_k theta2][Psi_k theta2]*|| for k = 0..K."""
    out = []
    for R, psi in zip(r_k_sequence(q, K), psi_sequence(q, K)):
        W = np.hstack([psi, q.theta2])
        lhs = q.alpha @ R - R @ q.alpha.conj().T - 1j * W @ W.conj().T
        scale = operator_norm(q.alpha) * operator_norm(R) + operator_norm(W) ** 2
        out.append(operator_norm(lhs) / scale if scale else 0.0)
    return out


def weyl_discrete(q: AdmissibleQuadruple, z: complex) -> np.ndarray:
    """
    Weyl function phi(z) = -i theta1* S0^{-1} (zI + gamma)^{-1} theta2,
    gamma = alpha - i theta2 theta2* S0^{-1}.

    Raises:
        PoleProximityError: -z near sigma(gamma)
    """
    if q.n == 0:
        return np.zeros((q.m1, q.m2), dtype=complex)
    t2t2 = q.theta2 @ q.theta2.conj().T
    gamma = q.alpha - 1j * solve_linear(q.S0, t2t2.conj().T, "S0").conj().T
    distance = spectrum(gamma).distance_to(-z)
    if distance <= settings.pole_tol * (1.0 + operator_norm(gamma)):
        raise PoleProximityError(f"z={z} is at a pole of the discrete Weyl function", distance=distance)
    left = solve_linear(q.S0, q.theta1, "S0").conj().T
    return -1j * left @ solve_linear(z * np.eye(q.n) + gamma, q.theta2, "zI + gamma")


def gamma_matrix(q: AdmissibleQuadruple) -> np.ndarray:
    t2t2 = q.theta2 @ q.theta2.conj().T
    return q.alpha - 1j * solve_linear(q.S0, t2t2.conj().T, "S0").conj().T


def solve_inverse_discrete(
    r: Realization,
    K: Optional[int] = None,
    reduce: bool = False,
    allow_i_in_spectrum: bool = False,
    method: str = "hamiltonian",
    synthesis: str = "auto",
) -> DiscretePotential:
    """
    Recover {C_k} from a discrete-convention realization (B: n x m2, C: m1 x n).

    Raises:
        SchemaError: continuous-convention input
        NonMinimalError: non-minimal input without reduce
        SpectrumConditionError: recovered alpha has i (or 0) in its spectrum
    """
    if r.convention != Convention.DISCRETE:
        raise SchemaError("solve_inverse_discrete needs a discrete-convention realization")

    logger.info("inverse_discrete_started", n=r.n, m1=r.m1, m2=r.m2, K=K)
    reduced_from = None
    try:
        if not is_minimal(r):
            if not reduce:
                raise NonMinimalError(f"realization of order {r.n} is not minimal", order=r.n)
            reduced_from = r.n
            r = minimal_realization(r)
        K = default_K(r.n) if K is None else K

        solution = solve_max_positive(RiccatiProblem.from_realization(r), method=method, check_minimality=False)
        q = from_discrete(r.A, r.B, r.C, solution.X)
        report = check_admissible(q)
        if not report.admissible:
            logger.warning("quadruple_not_admissible", relative_residual=report.relative_residual)
        generated = c_k_sequence(q, K, method=synthesis, allow_i_in_spectrum=allow_i_in_spectrum)
    except Exception as e:
        logger.error("inverse_discrete_failed", error=str(e))
        raise

    potential = DiscretePotential(
        q, generated.C, generated.method, solution, r, reduced_from, synthesis_defect=generated.synthesis_defect
    )
    logger.info("inverse_discrete_completed", n=q.n, K=K, method=generated.method,
                riccati_residual=solution.residual_norm)
    return potential


def _resolvent_decay(q: AdmissibleQuadruple, K: int) -> List[float]:
    """||R_k^{-1} Psi_k|| for k < K, via R_k^{-1} Psi_k = T^{-k}* Rb_k^{-1} theta1."""
    if q.n == 0 or K == 0:
        return []
    summary = spectrum_summary(q.alpha)
    if summary.contains_i or summary.contains_zero:
        return []
    identity = _identity(q.n)
    if not q.controllable_theta1:
        return [
            operator_norm(solve_linear(R, psi, "R_k"))
            for R, psi in zip(r_k_sequence(q, K - 1), psi_sequence(q, K - 1))
        ]
    T_inv = solve_linear(q.alpha + 1j * identity, q.alpha - 1j * identity, "alpha + iI")
    D = solve_linear(q.alpha - 1j * identity, q.theta1, "alpha - iI")
    Rb, P = q.S0, identity
    out = []
    for _ in range(K):
        out.append(operator_norm(P.conj().T @ solve_linear(Rb, q.theta1, "Rb_k")))
        Rb = hermitian_part(T_inv @ (Rb + 2.0 * D @ D.conj().T) @ T_inv.conj().T)
        P = T_inv @ P
    return out


def asymptotics_check(p: DiscretePotential) -> AsymptoticsReport:
    """
    ||C_k - j|| per k and whether the tail falls below 1e-6 ||C_0 - j||
    (absolute 1e-6 when C_0 = j), with block limits and ||R_k^{-1} Psi_k||.
    """
    q = p.quadruple
    recommended = default_K(q.n)
    if p.K < recommended:
        logger.warning("asymptotics_short_prefix", K=p.K, recommended_K=recommended)
    j = p.j
    distances = [operator_norm(C - j) for C in p.C]
    if not distances:
        return AsymptoticsReport(K=0, recommended_K=recommended, threshold=1e-6, converged=False)

    c0 = distances[0]
    threshold = 1e-6 * c0 if c0 > 1e-12 else 1e-6
    first_below = None
    for k in range(len(distances)):
        if all(d < threshold for d in distances[k:]):
            first_below = k
            break

    last = p.C[-1]
    m1 = p.m1
    block_tails = {
        "C11_minus_I": operator_norm(last[:m1, :m1] - np.eye(m1)),
        "C12": operator_norm(last[:m1, m1:]),
        "C21": operator_norm(last[m1:, :m1]),
        "C22_plus_I": operator_norm(last[m1:, m1:] + np.eye(p.m2)),
    }
    return AsymptoticsReport(
        K=p.K,
        recommended_K=recommended,
        distances=distances,
        threshold=threshold,
        tail_value=distances[-1],
        first_k_below_threshold=first_below,
        converged=distances[-1] < threshold,
        block_tails=block_tails,
        resolvent_decay=_resolvent_decay(q, p.K),
    )


def check_structure(p: DiscretePotential, signature_tol: float = 1e-8) -> StructureReport:
    """Hermiticity, involutivity and (m1, m2) signature of every C_k."""
    identity = np.eye(p.quadruple.m)
    hermitian_max = 0.0
    involution_max = 0.0
    signature_ok = True
    for C in p.C:
        hermitian_max = max(hermitian_max, operator_norm(C - C.conj().T) / max(operator_norm(C), 1e-300))
        involution_max = max(involution_max, operator_norm(C @ C - identity))
        eigenvalues = sla.eigvalsh(hermitian_part(C))
        positive = eigenvalues[eigenvalues > 0]
        negative = eigenvalues[eigenvalues <= 0]
        if (
            positive.size != p.m1
            or negative.size != p.m2
            or np.any(np.abs(positive - 1.0) > signature_tol)
            or np.any(np.abs(negative + 1.0) > signature_tol)
        ):
            signature_ok = False
    return StructureReport(
        K=p.K,
        hermitian_max=hermitian_max,
        involution_max=involution_max,
        signature_ok=signature_ok,
        synthesis_defect=p.synthesis_defect,
        passed=(
            hermitian_max <= 1e-10
            and involution_max <= 1e-9
            and signature_ok
            and p.synthesis_defect <= settings.synthesis_defect_tol
        ),
    )


def verify_pipeline(p: DiscretePotential) -> VerificationReport:
    """Aggregate the invariant checks of one discrete run."""
    q = p.quadruple
    admissibility = check_admissible(q)
    findings: List[str] = []

    agreement = 0.0
    if p.realization is not None and q.n > 0:
        scale = max(operator_norm(p.realization.A), operator_norm(gamma_matrix(q)))
        agreement = max_relative_deviation(
            lambda z: weyl_discrete(q, z), lambda z: evaluate(p.realization, z), probe_points(scale)
        )
        if agreement > 1e-8:
            findings.append(f"weyl function deviates from input realization ({agreement:.2e})")

    structure = check_structure(p)
    asymptotics = asymptotics_check(p)
    if not admissibility.admissible:
        findings.append("quadruple is not admissible")
    if not structure.passed:
        findings.append("C_k structure check failed")
    if p.K >= asymptotics.recommended_K and not asymptotics.converged:
        findings.append("C_k does not approach j within the computed prefix")

    riccati = p.riccati
    return VerificationReport(
        convention=Convention.DISCRETE,
        n=q.n,
        m1=q.m1,
        m2=q.m2,
        reduced_from=p.reduced_from,
        riccati_residual=riccati.residual_norm if riccati else 0.0,
        riccati_method=riccati.method if riccati else "none",
        riccati_iterations=riccati.iterations if riccati else 0,
        admissibility=admissibility,
        weyl_agreement=agreement,
        bound_M=max((operator_norm(C) for C in p.C), default=1.0) + 1.0,
        structure=structure,
        asymptotics=asymptotics,
        findings=findings,
        passed=not findings,
    )


def r_k_lambda_min(p: DiscretePotential) -> List[float]:
    """lambda_min(R_k) for k < K (NaN where R_k is undefined)."""
    try:
        return [lambda_min(R) for R in r_k_sequence(p.quadruple, max(p.K - 1, 0))][: p.K]
    except SpectrumConditionError:
        return [float("nan")] * p.K
