"""
Pydantic models for the JSON documents read and written by the CLI.
Complex numbers are [re, im] pairs; matrices carry explicit rows/cols.
"""
from pydantic import BaseModel, Field, field_validator, model_validator
from typing import Any, Dict, List, Optional, Union
from datetime import datetime
from enum import Enum
import math

import numpy as np


class Convention(str, Enum):
    """Which Dirac system a realization or quadruple belongs to."""
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


class Verdict(str, Enum):
    """Finite-horizon verdict of a check."""
    PASS = "pass"
    INCONCLUSIVE = "inconclusive"
    FAIL = "fail"


class PerturbationLevel(str, Enum):
    """What the stability harness perturbs."""
    TRIPLE = "triple"
    QUADRUPLE = "quadruple"


class ReductionTarget(str, Enum):
    """Which pair {alpha, theta} a reduction makes controllable."""
    THETA1 = "theta1"
    THETA2 = "theta2"


Entry = Union[float, List[float]]


class ComplexMatrix(BaseModel):
    """Row-major complex matrix with entries as [re, im] (bare reals accepted)."""
    rows: int = Field(..., ge=0, description="Number of rows")
    cols: int = Field(..., ge=0, description="Number of columns")
    data: List[List[Entry]] = Field(default_factory=list, description="Row-major nested entries")

    @field_validator("data")
    @classmethod
    def entries_are_pairs(cls, value: List[List[Entry]]) -> List[List[Entry]]:
        for row in value:
            for entry in row:
                parts = entry if isinstance(entry, list) else [entry]
                if len(parts) not in (1, 2):
                    raise ValueError("complex entries must be [re, im]")
                if not all(math.isfinite(float(p)) for p in parts):
                    raise ValueError("matrix entries must be finite")
        return value

    @model_validator(mode="after")
    def shape_matches(self) -> "ComplexMatrix":
        if len(self.data) != self.rows:
            raise ValueError(f"expected {self.rows} rows, got {len(self.data)}")
        for idx, row in enumerate(self.data):
            if len(row) != self.cols:
                raise ValueError(f"row {idx} has {len(row)} entries, expected {self.cols}")
        return self

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=complex)
        for i, row in enumerate(self.data):
            for k, entry in enumerate(row):
                if isinstance(entry, list):
                    out[i, k] = complex(entry[0], entry[1] if len(entry) > 1 else 0.0)
                else:
                    out[i, k] = complex(entry, 0.0)
        return out

    @classmethod
    def from_array(cls, M: np.ndarray) -> "ComplexMatrix":
        M = np.asarray(M, dtype=complex)
        return cls(
            rows=M.shape[0],
            cols=M.shape[1],
            data=[[[float(v.real), float(v.imag)] for v in row] for row in M],
        )


class RealizationDocument(BaseModel):
    """State-space realization phi(z) = C (zI - A)^{-1} B."""
    convention: Convention
    n: int = Field(..., ge=0, description="State dimension")
    m1: int = Field(..., ge=0, description="Size of the +1 block of j")
    m2: int = Field(..., ge=0, description="Size of the -1 block of j")
    A: ComplexMatrix
    B: ComplexMatrix
    C: ComplexMatrix

    @model_validator(mode="after")
    def dimensions_conform(self) -> "RealizationDocument":
        b_cols, c_rows = (self.m1, self.m2) if self.convention == Convention.CONTINUOUS else (self.m2, self.m1)
        expected = {
            "A": (self.n, self.n),
            "B": (self.n, b_cols),
            "C": (c_rows, self.n),
        }
        for name, shape in expected.items():
            block = getattr(self, name)
            if (block.rows, block.cols) != shape:
                raise ValueError(f"{name} must be {shape[0]}x{shape[1]} for the {self.convention.value} convention")
        return self


class QuadrupleDocument(BaseModel):
    """Admissible quadruple {alpha, S0, theta1, theta2}."""
    convention: Optional[Convention] = Field(None, description="Pipeline that produced the quadruple")
    n: int = Field(..., ge=0)
    m1: int = Field(..., ge=0)
    m2: int = Field(..., ge=0)
    alpha: ComplexMatrix
    S0: ComplexMatrix
    theta1: ComplexMatrix
    theta2: ComplexMatrix

    @model_validator(mode="after")
    def dimensions_conform(self) -> "QuadrupleDocument":
        expected = {
            "alpha": (self.n, self.n),
            "S0": (self.n, self.n),
            "theta1": (self.n, self.m1),
            "theta2": (self.n, self.m2),
        }
        for name, shape in expected.items():
            block = getattr(self, name)
            if (block.rows, block.cols) != shape:
                raise ValueError(f"{name} must be {shape[0]}x{shape[1]}")
        return self


class RunManifest(BaseModel):
    """Provenance record written next to every CLI output."""
    command: str
    inputs: List[str] = Field(default_factory=list)
    parameters: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    version: str
    environment: str = "development"
    started_at: datetime
    wall_time_seconds: float = 0.0
    exit_code: int = 0
    outputs: List[str] = Field(default_factory=list)
    message: Optional[str] = None
