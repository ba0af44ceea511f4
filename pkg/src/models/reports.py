"""
Report models produced by checks and pipelines.
Report-style operations return these instead of raising on findings.
"""
from pydantic import BaseModel, Field
from typing import Dict, List, Optional

from src.models.schemas import Convention, Verdict


class SpectrumSummary(BaseModel):
    """Location of sigma(alpha) relative to the points the theory cares about."""
    eigenvalues: List[List[float]] = Field(default_factory=list, description="[re, im] pairs")
    min_imag: Optional[float] = None
    max_imag: Optional[float] = None
    contains_i: bool = False
    contains_zero: bool = False
    contains_minus_i: bool = False


class AdmissibilityReport(BaseModel):
    """Identity residual, positivity and controllability of a quadruple."""
    identity_residual: float = Field(..., description="||alpha S0 - S0 alpha* - i(t1 t1* + t2 t2*)||")
    scale: float = Field(..., description="||alpha|| ||S0|| + ||theta1||^2 + ||theta2||^2")
    relative_residual: float
    s0_positive: bool
    s0_reason: str
    controllable_theta1: bool
    controllable_theta2: bool
    spectrum: SpectrumSummary
    spectrum_in_upper_half_plane: Optional[bool] = Field(
        None, description="min Im sigma(alpha) > tol; only asserted when {alpha, theta1} is controllable"
    )
    admissible: bool
    strongly_admissible: bool


class SensitivityStats(BaseModel):
    """Deviation statistics of Riccati solutions under random data perturbations."""
    delta: float
    trials: int
    skipped: int
    max_deviation: float
    mean_deviation: float
    median_deviation: float
    deviations: List[float] = Field(default_factory=list)


class DecayProfile(BaseModel):
    """Sampled ||v(x)|| and ||theta1* e^{2ix alpha*} R(x)^{-1}||."""
    xs: List[float]
    potential_norms: List[float]
    resolvent_norms: List[float]
    x_max: float
    initial_norm: float
    peak_norm: float = Field(..., description="max ||v|| over the grid")
    final_norm: float
    decays: bool = Field(..., description="final ||v|| < 1e-3 peak ||v|| (or v identically 0)")
    resolvent_tail_decreasing: bool = Field(..., description="resolvent norms non-increasing over the final half")


class MonotonicityReport(BaseModel):
    """Growth of R(x) along a grid."""
    xs: List[float]
    lambda_min: List[float]
    min_increment_eigenvalue: float
    increments_psd: bool
    strictly_increasing: bool
    growth_ok: Optional[bool] = Field(
        None, description="lambda_min(R(2 x_max)) >= 2 lambda_min(R(x_max)) - lambda_max(S0); flagged, not failed"
    )


class StructureReport(BaseModel):
    """Hermiticity, involutivity and signature of a discrete potential."""
    K: int
    hermitian_max: float
    involution_max: float
    signature_ok: bool
    synthesis_defect: float = Field(0.0, description="max distance of a raw C_k to its nearest Hermitian involution")
    passed: bool


class AsymptoticsReport(BaseModel):
    """Convergence C_k -> j."""
    K: int
    recommended_K: int
    distances: List[float] = Field(default_factory=list, description="||C_k - j|| per k")
    threshold: float
    tail_value: Optional[float] = None
    first_k_below_threshold: Optional[int] = None
    converged: bool
    block_tails: Dict[str, float] = Field(default_factory=dict)
    resolvent_decay: List[float] = Field(default_factory=list, description="||R_k^{-1} Psi_k|| per k")


class WeylDefectReport(BaseModel):
    """Finite-horizon measurement of the Weyl integral or sum."""
    mode: Convention
    z: List[float] = Field(..., description="[re, im]")
    bound_M: float
    z_in_half_plane: bool = Field(..., description="Im z > M")
    horizon: float = Field(..., description="L (continuous) or K (discrete)")
    step: Optional[float] = None
    checkpoints: List[float] = Field(default_factory=list)
    partial_values: List[float] = Field(default_factory=list)
    integrand_samples: List[float] = Field(default_factory=list)
    head: float
    tail: float
    tail_ratio: float
    verdict: Verdict


class VerificationReport(BaseModel):
    """Aggregate findings of one inverse-pipeline run."""
    convention: Convention
    n: int
    m1: int
    m2: int
    reduced_from: Optional[int] = None
    riccati_residual: float
    riccati_method: str
    riccati_iterations: int
    admissibility: AdmissibilityReport
    weyl_agreement: float = Field(..., description="max relative deviation at probe points")
    node_identity_max: Optional[float] = None
    bound_M: Optional[float] = None
    decay: Optional[DecayProfile] = None
    monotonicity: Optional[MonotonicityReport] = None
    structure: Optional[StructureReport] = None
    asymptotics: Optional[AsymptoticsReport] = None
    findings: List[str] = Field(default_factory=list)
    passed: bool


class UniquenessReport(BaseModel):
    """Potential-level agreement under random similarity transforms."""
    mode: Convention
    trials: int
    deviations: List[float]
    conditions: List[float]
    max_deviation: float
    passed: bool


class ReductionReport(BaseModel):
    """Outcome of iterated one-step reductions."""
    dimensions: List[int]
    steps: List[str]
    strongly_admissible: bool
    message: Optional[str] = None
