"""
Models for stability sweeps: configuration, per-trial records and per-delta statistics.
"""
from pydantic import BaseModel, Field, field_validator, model_validator
from typing import List, Optional

from src.models.schemas import Convention, PerturbationLevel, RealizationDocument, Verdict


class SweepConfig(BaseModel):
    """A stability experiment over a descending list of perturbation sizes."""
    mode: Convention
    realization: RealizationDocument
    deltas: List[float] = Field(..., description="Strictly descending, positive; a trailing 0 is a control row")
    trials: int = Field(30, description="Trials per delta")
    seed: Optional[int] = Field(None, description="Defaults to settings.seed")
    level: PerturbationLevel = PerturbationLevel.TRIPLE
    K: Optional[int] = Field(None, ge=0, description="Discrete prefix length")
    grid_samples: Optional[int] = Field(None, gt=1, description="Continuous grid size")
    x_max: Optional[float] = Field(None, gt=0, description="Continuous grid end")

    @field_validator("trials")
    @classmethod
    def trials_positive(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("trials must be > 0")
        return value

    @field_validator("deltas")
    @classmethod
    def deltas_descending(cls, value: List[float]) -> List[float]:
        if not value:
            raise ValueError("deltas must not be empty")
        body = value[:-1] if len(value) > 1 and value[-1] == 0 else value
        if any(d <= 0 for d in body):
            raise ValueError("deltas must be > 0 (only a trailing 0 control row is allowed)")
        if any(later >= earlier for earlier, later in zip(value, value[1:])):
            raise ValueError("deltas must be strictly descending")
        return value

    @model_validator(mode="after")
    def convention_matches(self) -> "SweepConfig":
        if self.realization.convention != self.mode:
            raise ValueError(f"realization convention {self.realization.convention.value} != mode {self.mode.value}")
        return self


class TrialRecord(BaseModel):
    """One perturbation trial."""
    delta: float
    trial: int
    quad_distance: Optional[float] = None
    potential_dev: Optional[float] = None
    skipped: bool = False
    reason: Optional[str] = None


class DeltaStats(BaseModel):
    """Statistics of one delta row over its non-skipped trials."""
    delta: float
    trials: int
    skipped: int
    median_quad_distance: Optional[float] = None
    max_quad_distance: Optional[float] = None
    median_potential_dev: Optional[float] = None
    max_potential_dev: Optional[float] = None
    lipschitz_estimate: Optional[float] = Field(None, description="median potential deviation / delta")


class SweepResult(BaseModel):
    """Trend verdict of a sweep."""
    mode: Convention
    level: PerturbationLevel
    seed: int
    rows: List[DeltaStats]
    records: List[TrialRecord] = Field(default_factory=list)
    monotone: bool
    ratio_ok: bool
    skip_fraction: float
    verdict: Verdict
    message: Optional[str] = None
