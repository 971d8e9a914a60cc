"""
Serializable report models written by the command-line tool.
Matrices are stored as their shape plus row-major entry strings in the
matrix-file entry syntax, so exact rationals survive a JSON round trip.
"""
from typing import List, Optional

from pydantic import BaseModel, Field, model_validator

from .config import Arithmetic, FormKind, ScalarField

SCHEMA_VERSION = 1


class MatrixPayload(BaseModel):
    rows: int = Field(..., ge=0)
    cols: int = Field(..., ge=0)
    entries: List[List[str]] = Field(default_factory=list)

    @model_validator(mode='after')
    def validate_entry_count(self):
        if len(self.entries) != self.rows or any(len(row) != self.cols for row in self.entries):
            raise ValueError(f'Entries do not match shape {self.rows}x{self.cols}')
        return self


class StepPayload(BaseModel):
    m1: int = Field(..., ge=0)
    m2: int = Field(..., ge=0)
    S: MatrixPayload
    S1: MatrixPayload
    D: MatrixPayload
    E: MatrixPayload
    F: MatrixPayload
    C1: MatrixPayload
    A2: MatrixPayload
    compress_margin: Optional[float] = Field(None, description="None when infinite or exact")
    coupling_margin: Optional[float] = None


class SubspacePayload(BaseModel):
    dim_L: int
    dim_K: int


class DecompositionReport(BaseModel):
    """Everything needed to re-verify a decomposition against its input."""
    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    input_digest: str
    field: ScalarField
    arithmetic: Arithmetic
    form: FormKind
    tol_scale: float
    size: int
    m_sequence: List[int]
    blocks: List[int]
    regular_size: int
    regular: MatrixPayload
    steps: List[StepPayload] = Field(default_factory=list)
    subspaces: Optional[SubspacePayload] = None
    ill_conditioned: bool = False
    warnings: List[str] = Field(default_factory=list)

    model_config = {"populate_by_name": True}


class GroundTruthSidecar(BaseModel):
    """Prescribed decomposition of a synthesized instance."""
    schema_version: int = Field(SCHEMA_VERSION, alias="schema")
    prng: str
    seed: int
    field: ScalarField
    arithmetic: Arithmetic
    form: FormKind
    scramble: str
    regular_size: int
    blocks: List[int]
    m_sequence: List[int]
    regular: MatrixPayload
    instance_digest: str

    model_config = {"populate_by_name": True}
