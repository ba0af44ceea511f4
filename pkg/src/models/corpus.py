"""
Models for the shipped example corpus.
"""
from pydantic import BaseModel, Field, model_validator
from typing import Any, Dict, List, Optional
from enum import Enum

from src.models.schemas import QuadrupleDocument


class CheckKind(str, Enum):
    """What an example case measures."""
    CLOSED_FORM = "closed_form"
    QUADRUPLE = "quadruple"
    WEYL_ROUNDTRIP = "weyl_roundtrip"
    WEYL_DEFECT = "weyl_defect"
    DECAY = "decay"
    DISCRETE_TAIL = "discrete_tail"
    TRIVIAL_POTENTIAL = "trivial_potential"
    REDUCTION = "reduction"
    STABILITY = "stability"
    UNIQUENESS = "uniqueness"


class ExampleCase(BaseModel):
    """One corpus entry: an input, the quantity to measure and its tolerance."""
    name: str
    check: CheckKind
    description: str = ""
    provenance: str = Field(..., description="[PROVEN: statement] / [TRIVIAL] / [DERIVED: oracle] tag")
    realization: Optional[str] = Field(None, description="Realization JSON, relative to the corpus directory")
    sweep: Optional[str] = Field(None, description="SweepConfig JSON, relative to the corpus directory")
    quadruple: Optional[QuadrupleDocument] = Field(None, description="Inline quadruple input")
    expected_quadruple: Optional[QuadrupleDocument] = None
    closed_form: Optional[str] = Field(None, description="Name of a registered closed-form potential norm")
    parameters: Dict[str, Any] = Field(default_factory=dict)
    tolerance: float = Field(..., gt=0)

    @model_validator(mode="after")
    def has_input(self) -> "ExampleCase":
        if self.realization is None and self.quadruple is None and self.sweep is None:
            raise ValueError("a case needs a realization, a quadruple or a sweep")
        if self.check == CheckKind.QUADRUPLE and self.expected_quadruple is None:
            raise ValueError("quadruple checks need expected_quadruple")
        if self.check == CheckKind.CLOSED_FORM and self.closed_form is None:
            raise ValueError("closed_form checks need closed_form")
        return self


class CorpusRow(BaseModel):
    """Outcome of one case."""
    name: str
    check: Optional[CheckKind] = None
    provenance: Optional[str] = None
    deviation: Optional[float] = None
    tolerance: Optional[float] = None
    status: str = Field(..., description="pass | fail | error")
    message: Optional[str] = None


class CorpusSummary(BaseModel):
    rows: List[CorpusRow]
    passed: int
    failed: int
    errored: int
