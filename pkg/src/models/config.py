"""
Configuration models for regularization runs.
Follows Single Responsibility Principle by handling only configuration concerns.
"""
from typing import List, Optional
from pydantic import BaseModel, Field, field_validator
from enum import Enum


class ScalarField(str, Enum):
    """Ground field of the matrix entries."""
    REAL = "real"
    COMPLEX = "complex"


class Arithmetic(str, Enum):
    """How scalars are represented and compared."""
    EXACT = "exact"
    FLOAT = "float"


class FormKind(str, Enum):
    """Bilinear forms transform by S A S^T, sesquilinear ones by S A S^*."""
    BILINEAR = "bilinear"
    SESQUILINEAR = "sesquilinear"


class ScrambleMode(str, Enum):
    """Transform applied to a synthesized direct sum."""
    NONE = "none"
    UNITARY = "unitary"
    GENERAL = "general"


class ReportFormat(str, Enum):
    TEXT = "text"
    JSON = "json"


class SurveyKind(str, Enum):
    """Batch experiments offered by the survey command."""
    RECOVERY = "recovery"
    AGREEMENT = "agreement"


class ScalarSpec(BaseModel):
    """Field and arithmetic of a matrix."""
    model_config = {"frozen": True}

    field: ScalarField = Field(..., description="Real or complex entries")
    arithmetic: Arithmetic = Field(..., description="Exact rationals or double precision")

    @property
    def is_exact(self) -> bool:
        return self.arithmetic == Arithmetic.EXACT

    @property
    def is_complex(self) -> bool:
        return self.field == ScalarField.COMPLEX

    def label(self) -> str:
        return f"{self.field.value} {self.arithmetic.value}"


class RankPolicy(BaseModel):
    """Numerical rank threshold settings (ignored by exact backends)."""
    model_config = {"frozen": True}

    tol_scale: float = Field(1.0, gt=0, description="Multiplier of max(rows, cols) * eps * sigma_max")
    margin_factor: float = Field(10.0, gt=1, description="Rank margins below this factor raise warnings")


class RankScale(BaseModel):
    """Scale shared by every rank decision of one reduction."""
    model_config = {"frozen": True}

    sigma_max: float = Field(..., ge=0, description="Largest singular value of the original input")
    dim: int = Field(..., ge=0, description="Size of the original input")


class SynthesisSpec(BaseModel):
    """Prescribed regular size and singular block sizes of a test instance."""
    regular_size: int = Field(0, ge=0, description="Size of the nonsingular regular part")
    blocks: List[int] = Field(default_factory=list, description="Singular Jordan block sizes")
    scramble: ScrambleMode = Field(ScrambleMode.NONE, description="Congruence applied to the direct sum")
    seed: int = Field(0, ge=0, lt=2 ** 64, description="Seed of the PCG64 generator")
    entry_bound: int = Field(3, ge=1, description="Entry magnitude bound of exact random matrices")

    @field_validator('blocks')
    @classmethod
    def validate_blocks(cls, v):
        if any(b < 1 for b in v):
            raise ValueError('Jordan block sizes must be positive')
        return sorted(v, reverse=True)

    @property
    def total_size(self) -> int:
        return self.regular_size + sum(self.blocks)


class RegularizeRequest(BaseModel):
    """Parameters of one regularize command."""
    input_path: str = Field(..., description="Matrix file to decompose")
    form: FormKind = Field(FormKind.BILINEAR)
    arithmetic: Optional[Arithmetic] = Field(None, description="Backend override; defaults to the file's arithmetic")
    policy: RankPolicy = Field(default_factory=RankPolicy)
    report_format: ReportFormat = Field(ReportFormat.TEXT)
    output_path: Optional[str] = Field(None, description="Report destination; stdout when omitted")


class CompareRequest(BaseModel):
    """Parameters of one compare command."""
    path_a: str
    path_b: str
    form: FormKind = Field(FormKind.BILINEAR)
    arithmetic: Optional[Arithmetic] = None
    policy: RankPolicy = Field(default_factory=RankPolicy)
    witness_path: Optional[str] = Field(None, description="Matrix file holding a congruence witness S")
    tol: float = Field(1e-9, gt=0)


class SynthesizeRequest(BaseModel):
    """Parameters of one synthesize command."""
    spec: SynthesisSpec
    scalar: ScalarSpec
    form: FormKind = Field(FormKind.BILINEAR)
    output_path: str = Field(..., description="Matrix file to write")

    @field_validator('output_path')
    @classmethod
    def validate_output_path(cls, v):
        if not v.strip():
            raise ValueError('Output path cannot be empty')
        return v


class SurveyRequest(BaseModel):
    """Parameters of one survey command."""
    kind: SurveyKind = Field(SurveyKind.RECOVERY)
    count: int = Field(100, ge=1, le=100000)
    max_size: int = Field(8, ge=1, le=60)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    scalar: ScalarSpec = Field(default_factory=lambda: ScalarSpec(field=ScalarField.REAL, arithmetic=Arithmetic.EXACT))
    form: FormKind = Field(FormKind.BILINEAR)
    scramble: ScrambleMode = Field(ScrambleMode.GENERAL)
    policy: RankPolicy = Field(default_factory=RankPolicy)
    output_path: Optional[str] = None
