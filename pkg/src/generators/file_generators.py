"""
File formats following the Strategy Pattern: the plain-text matrix file,
decomposition/verdict reports (text or JSON) and tabular survey output.

Matrix file layout: a header line ``field arithmetic rows cols`` followed by
row-major whitespace-separated entries. Exact entries are ``p`` or ``p/q``,
complex entries ``re+imi``; float entries use 17 significant digits.
"""
import hashlib
import json
import math
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict

from ..models.config import Arithmetic, ReportFormat, ScalarField, ScalarSpec
from ..models.errors import MatrixFileError
from ..models.reports import DecompositionReport, GroundTruthSidecar, MatrixPayload, StepPayload
from ..models.results import RankReport, ReductionTrace, StepRecord, Verdict, VerificationReport
from ..numkit.backends import BackendFactory, ScalarBackend


class MatrixFile(BaseModel):
    """A matrix together with the scalar spec it was written with."""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    spec: ScalarSpec
    matrix: np.ndarray

    @property
    def backend(self) -> ScalarBackend:
        return BackendFactory.create_backend(self.spec)


def format_matrix_file(spec: ScalarSpec, A: np.ndarray) -> str:
    backend = BackendFactory.create_backend(spec)
    rows, cols = A.shape
    lines = [f"{spec.field.value} {spec.arithmetic.value} {rows} {cols}"]
    for i in range(rows):
        lines.append(" ".join(backend.format_scalar(x) for x in A[i, :]))
    return "\n".join(lines) + "\n"


def parse_matrix_file(text: str) -> MatrixFile:
    """Parse the matrix file format; comment lines start with '#'."""
    content = [(number, line.strip()) for number, line in enumerate(text.splitlines(), start=1)]
    content = [(number, line) for number, line in content if line and not line.startswith("#")]
    if not content:
        raise MatrixFileError("Empty matrix file")

    header_line, header = content[0]
    parts = header.split()
    if len(parts) != 4:
        raise MatrixFileError("Header must read 'field arithmetic rows cols'", header_line)
    try:
        spec = ScalarSpec(field=ScalarField(parts[0].lower()), arithmetic=Arithmetic(parts[1].lower()))
        rows, cols = int(parts[2]), int(parts[3])
    except ValueError as e:
        raise MatrixFileError(f"Invalid header: {e}", header_line) from e
    if rows < 0 or cols < 0:
        raise MatrixFileError("Dimensions must be nonnegative", header_line)

    backend = BackendFactory.create_backend(spec)
    tokens = []
    for number, line in content[1:]:
        tokens.extend((number, token) for token in line.split())
    if len(tokens) != rows * cols:
        raise MatrixFileError(f"Expected {rows * cols} entries, found {len(tokens)}")

    A = backend.zeros(rows, cols)
    for k, (number, token) in enumerate(tokens):
        try:
            A[divmod(k, cols)] = backend.parse_scalar(token)
        except MatrixFileError as e:
            raise MatrixFileError(str(e), number) from e
    return MatrixFile(spec=spec, matrix=A)


def read_matrix_file(path: str) -> MatrixFile:
    return parse_matrix_file(Path(path).read_text(encoding="utf-8"))


def write_matrix_file(path: str, spec: ScalarSpec, A: np.ndarray) -> None:
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    output_path.write_text(format_matrix_file(spec, A), encoding="utf-8")


def matrix_digest(spec: ScalarSpec, A: np.ndarray) -> str:
    """sha256 of the canonical matrix-file text."""
    return hashlib.sha256(format_matrix_file(spec, A).encode("utf-8")).hexdigest()


def to_payload(A: np.ndarray, backend: ScalarBackend) -> MatrixPayload:
    rows, cols = A.shape
    return MatrixPayload(rows=rows, cols=cols,
                         entries=[[backend.format_scalar(x) for x in A[i, :]] for i in range(rows)])


def from_payload(payload: MatrixPayload, backend: ScalarBackend) -> np.ndarray:
    A = backend.zeros(payload.rows, payload.cols)
    for i, row in enumerate(payload.entries):
        for j, token in enumerate(row):
            A[i, j] = backend.parse_scalar(token)
    return A


def _finite(value: float):
    return value if math.isfinite(value) else None


def step_to_payload(step: StepRecord, backend: ScalarBackend) -> StepPayload:
    return StepPayload(
        m1=step.m1, m2=step.m2,
        S=to_payload(step.S, backend), S1=to_payload(step.S1, backend),
        D=to_payload(step.D, backend), E=to_payload(step.E, backend),
        F=to_payload(step.F, backend), C1=to_payload(step.C1, backend),
        A2=to_payload(step.A2, backend),
        compress_margin=_finite(step.compress_report.margin),
        coupling_margin=_finite(step.coupling_report.margin),
    )


def render_json(model: BaseModel) -> str:
    """Stable-key-ordered JSON."""
    return json.dumps(model.model_dump(mode="json", by_alias=True), sort_keys=True,
                      indent=2, ensure_ascii=False) + "\n"


def _grid(payload: MatrixPayload, indent: str = "  ") -> List[str]:
    if payload.rows == 0:
        return [f"{indent}(empty {payload.rows}x{payload.cols})"]
    width = max(len(token) for row in payload.entries for token in row) if payload.cols else 0
    return [indent + " ".join(token.rjust(width) for token in row) for row in payload.entries]


class ReportWriterStrategy(ABC):
    """Abstract base class for report rendering strategies."""

    @abstractmethod
    def render_decomposition(self, report: DecompositionReport) -> str:
        pass

    @abstractmethod
    def render_verdict(self, verdict: Verdict, backend: ScalarBackend) -> str:
        pass

    @abstractmethod
    def render_verification(self, report: VerificationReport) -> str:
        pass


class TextReportWriter(ReportWriterStrategy):
    """Human-readable summaries."""

    def render_decomposition(self, report: DecompositionReport) -> str:
        lines = [
            f"Input:       {report.size}x{report.size} {report.field.value} {report.arithmetic.value} "
            f"({report.form.value})",
            f"Digest:      {report.input_digest}",
            f"m-sequence:  {','.join(map(str, report.m_sequence)) or '(none)'}",
            f"Blocks:      {','.join(map(str, report.blocks)) or '(none)'}",
            f"Regular:     size {report.regular_size}",
        ]
        lines.extend(_grid(report.regular))
        if report.subspaces is not None:
            lines.append(f"Subspaces:   dim L = {report.subspaces.dim_L}, dim K = {report.subspaces.dim_K}")
        for index, step in enumerate(report.steps, start=1):
            margins = ""
            if report.arithmetic == Arithmetic.FLOAT:
                margins = f"  margins {_margin(step.compress_margin)}, {_margin(step.coupling_margin)}"
            lines.append(f"Step {index}:      m1={step.m1} m2={step.m2}{margins}")
        for warning in report.warnings:
            lines.append(f"Warning:     {warning}")
        return "\n".join(lines) + "\n"

    def render_verdict(self, verdict: Verdict, backend: ScalarBackend) -> str:
        lines = [f"Verdict: {verdict.tag.value}", f"Reason:  {verdict.reason}"]
        if verdict.blocks_a or verdict.blocks_b:
            lines.append(f"Blocks:  {verdict.blocks_a} vs {verdict.blocks_b} "
                         f"({verdict.summands_a} vs {verdict.summands_b} singular summands)")
        if verdict.regular_a is not None and verdict.regular_b is not None:
            lines.append("Regular part A:")
            lines.extend(_grid(to_payload(verdict.regular_a, backend)))
            lines.append("Regular part B:")
            lines.extend(_grid(to_payload(verdict.regular_b, backend)))
        for warning in verdict.warnings:
            lines.append(f"Warning: {warning}")
        return "\n".join(lines) + "\n"

    def render_verification(self, report: VerificationReport) -> str:
        lines = []
        for check in report.checks:
            status = "ok  " if check.passed else "FAIL"
            margin = f" (margin {check.margin:.3e})" if check.margin is not None else ""
            detail = f": {check.detail}" if check.detail and not check.passed else ""
            lines.append(f"{status} {check.name}{margin}{detail}")
        lines.append("PASS" if report.passed else "FAIL")
        return "\n".join(lines) + "\n"


class JSONReportWriter(ReportWriterStrategy):
    """Versioned, sorted-key JSON."""

    def render_decomposition(self, report: DecompositionReport) -> str:
        return render_json(report)

    def render_verdict(self, verdict: Verdict, backend: ScalarBackend) -> str:
        payload: Dict[str, Any] = {
            "schema": 1,
            "tag": verdict.tag.value,
            "reason": verdict.reason,
            "violated": verdict.violated,
            "blocks_a": verdict.blocks_a,
            "blocks_b": verdict.blocks_b,
            "summands_a": verdict.summands_a,
            "summands_b": verdict.summands_b,
            "witness_checked": verdict.witness_checked,
            "warnings": verdict.warnings,
        }
        for key, matrix in (("regular_a", verdict.regular_a), ("regular_b", verdict.regular_b)):
            payload[key] = None if matrix is None else to_payload(matrix, backend).model_dump()
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"

    def render_verification(self, report: VerificationReport) -> str:
        payload = {"schema": 1, "passed": report.passed,
                   "checks": [check.model_dump() for check in report.checks]}
        return json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _margin(value) -> str:
    return "inf" if value is None else f"{value:.3g}"


class ReportWriterFactory:
    """Factory for creating report writers following the Factory Pattern."""

    _writers = {
        ReportFormat.TEXT: TextReportWriter,
        ReportFormat.JSON: JSONReportWriter,
    }

    @classmethod
    def create_writer(cls, report_format: ReportFormat) -> ReportWriterStrategy:
        if report_format not in cls._writers:
            raise ValueError(f"Unsupported report format: {report_format}")
        return cls._writers[report_format]()

    @classmethod
    def get_available_formats(cls) -> list[str]:
        return [f.value for f in cls._writers]


def write_survey_table(rows: List[Dict[str, Any]], path: str) -> None:
    """Write survey rows as CSV or JSON, chosen by the file suffix."""
    output_path = Path(path)
    output_path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(rows)
    if output_path.suffix.lower() == ".json":
        df.to_json(output_path, orient="records", indent=2)
    else:
        df.to_csv(output_path, index=False)


def read_report(path: str) -> DecompositionReport:
    return DecompositionReport.model_validate_json(Path(path).read_text(encoding="utf-8"))


def trace_from_report(report: DecompositionReport) -> ReductionTrace:
    """Rebuild a replayable trace from a report (rank margins are not re-derived)."""
    backend = BackendFactory.create_backend(ScalarSpec(field=report.field, arithmetic=report.arithmetic))
    steps = []
    size = report.size
    for payload in report.steps:
        placeholder = RankReport(rank=0, exact=backend.exact)
        steps.append(StepRecord(
            input_size=max(size, 1),
            m1=payload.m1, m2=payload.m2,
            S=from_payload(payload.S, backend), S1=from_payload(payload.S1, backend),
            D=from_payload(payload.D, backend), E=from_payload(payload.E, backend),
            F=from_payload(payload.F, backend), C1=from_payload(payload.C1, backend),
            A2=from_payload(payload.A2, backend),
            compress_report=placeholder, coupling_report=placeholder,
        ))
        size = payload.A2.rows
    regular = from_payload(report.regular, backend)
    return ReductionTrace(
        input_size=report.size,
        form=report.form,
        scalar=backend.spec,
        steps=steps,
        regular=regular,
        regular_report=RankReport(rank=regular.shape[0], exact=backend.exact),
        ill_conditioned=report.ill_conditioned,
        warnings=report.warnings,
    )


class GroundTruthSidecarWriter:
    """Writes the prescribed decomposition next to a synthesized instance."""

    @staticmethod
    def sidecar_path(instance_path: str) -> str:
        return str(Path(instance_path).with_suffix(".truth.json"))

    def write(self, path: str, sidecar: GroundTruthSidecar) -> None:
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(render_json(sidecar), encoding="utf-8")

    def read(self, path: str) -> GroundTruthSidecar:
        return GroundTruthSidecar.model_validate_json(Path(path).read_text(encoding="utf-8"))
