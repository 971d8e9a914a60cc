"""
Result models produced by the regularization engine and the classifier.
Matrices are numpy arrays; the models are frozen once built.
"""
import math
from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import FormKind, ScalarSpec


class RankReport(BaseModel):
    """Outcome of one rank decision."""
    model_config = ConfigDict(frozen=True)

    rank: int = Field(..., ge=0)
    exact: bool = Field(..., description="True when decided by exact elimination")
    smallest_accepted: float = Field(0.0, ge=0, description="Least singular value counted as nonzero")
    largest_rejected: float = Field(0.0, ge=0, description="Largest singular value counted as zero")
    threshold: float = Field(0.0, ge=0)

    @property
    def margin(self) -> float:
        """Ratio of the smallest accepted singular value to the threshold."""
        if self.exact or self.rank == 0 or self.threshold == 0.0:
            return math.inf
        return self.smallest_accepted / self.threshold


class StepRecord(BaseModel):
    """One pass of the two-stage reduction.

    The transformed input equals [[D, E, C1], [F, A2, 0], [0, 0, 0]] with
    row blocks of sizes m2, n - m1 - m2, m1.
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    input_size: int = Field(..., ge=1)
    m1: int = Field(..., ge=0)
    m2: int = Field(..., ge=0)
    S: np.ndarray
    S1: np.ndarray
    D: np.ndarray
    E: np.ndarray
    F: np.ndarray
    C1: np.ndarray
    A2: np.ndarray
    compress_report: RankReport
    coupling_report: RankReport

    @property
    def margins(self) -> List[float]:
        return [self.compress_report.margin, self.coupling_report.margin]


class ReductionTrace(BaseModel):
    """Replayable certificate of a full reduction."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    input_size: int = Field(..., ge=0)
    form: FormKind
    scalar: ScalarSpec
    steps: List[StepRecord] = Field(default_factory=list)
    regular: np.ndarray
    regular_report: RankReport
    ill_conditioned: bool = False
    warnings: List[str] = Field(default_factory=list)

    @property
    def m_sequence(self) -> List[int]:
        sequence = []
        for step in self.steps:
            sequence.extend([step.m1, step.m2])
        return sequence

    @property
    def min_margin(self) -> float:
        margins = [m for step in self.steps for m in step.margins]
        if self.regular.shape[0] > 0:
            margins.append(self.regular_report.margin)
        return min(margins, default=math.inf)


class RegularizingDecomposition(BaseModel):
    """Regular part plus the multiset of singular Jordan block sizes."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    regular: np.ndarray
    blocks: List[int] = Field(default_factory=list)
    m_sequence: List[int] = Field(default_factory=list)

    @field_validator('blocks')
    @classmethod
    def validate_blocks(cls, v):
        if any(b < 1 for b in v):
            raise ValueError('Jordan block sizes must be positive')
        return sorted(v, reverse=True)

    @property
    def regular_size(self) -> int:
        return self.regular.shape[0]

    @property
    def size(self) -> int:
        return self.regular_size + sum(self.blocks)


class VerificationCheck(BaseModel):
    """Single pass/fail line of a trace replay."""
    name: str
    passed: bool
    margin: Optional[float] = Field(None, description="Residual measured by the check (float backend)")
    detail: str = ""


class VerificationReport(BaseModel):
    checks: List[VerificationCheck] = Field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    def failed(self) -> List[VerificationCheck]:
        return [check for check in self.checks if not check.passed]

    def check(self, name: str) -> Optional[VerificationCheck]:
        for item in self.checks:
            if item.name == name:
                return item
        return None


class SubspaceReport(BaseModel):
    """Dimensions of the left kernel L and of K = {x : Phi(x, L) = 0}."""
    dim_L: int = Field(..., ge=0)
    dim_K: int = Field(..., ge=0)


class VerdictTag(str, Enum):
    EQUIVALENT = "equivalent"
    NOT_EQUIVALENT = "not_equivalent"
    REDUCED_TO_REGULAR_PARTS = "reduced_to_regular_parts"


class Verdict(BaseModel):
    """Outcome of a topological (*)congruence comparison."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    tag: VerdictTag
    reason: str
    violated: Optional[str] = Field(None, description="size, blocks or regular_size")
    blocks_a: List[int] = Field(default_factory=list)
    blocks_b: List[int] = Field(default_factory=list)
    summands_a: int = 0
    summands_b: int = 0
    regular_a: Optional[np.ndarray] = None
    regular_b: Optional[np.ndarray] = None
    witness_checked: bool = False
    warnings: List[str] = Field(default_factory=list, description="Float rank warnings of either reduction")
