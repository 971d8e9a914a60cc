"""
Regularization service that orchestrates file I/O, the engine, the
classifier and the instance generator for the command-line tool.
Follows Single Responsibility Principle by handling only the orchestration logic.
"""
import logging
from collections import Counter
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..classify.topological import compare, subspace_report
from ..generators.file_generators import (
    GroundTruthSidecarWriter, MatrixFile, ReportWriterFactory, matrix_digest, read_matrix_file,
    read_report, step_to_payload, to_payload, trace_from_report, write_matrix_file,
    write_survey_table,
)
from ..generators.instance_generator import (
    PRNG_ALGORITHM, ScrambleFactory, make_rng, random_integer_matrix, random_synthesis_spec, synthesize,
)
from ..models.config import (
    Arithmetic, CompareRequest, RankPolicy, RegularizeRequest, ScalarSpec,
    SurveyKind, SurveyRequest, SynthesizeRequest,
)
from ..models.errors import DigestMismatchError, DomainError, FormRegError, InvariantViolationError
from ..models.reports import DecompositionReport, GroundTruthSidecar, SubspacePayload
from ..models.results import (
    ReductionTrace, RegularizingDecomposition, Verdict, VerificationCheck, VerificationReport,
)
from ..numkit.backends import BackendFactory, ScalarBackend
from ..regengine.engine import blocks_from_m_sequence, is_weakly_decreasing, regularize
from ..regengine.verification import verify_trace

logger = logging.getLogger(__name__)


class RegularizationService:
    """Main service for decomposition, comparison, verification and synthesis."""

    def load(self, path: str, arithmetic: Optional[Arithmetic] = None) -> Tuple[MatrixFile, ScalarBackend, np.ndarray]:
        """Read a matrix file and re-express it in the requested arithmetic.

        Returns the file as written, the working backend and the working matrix.
        """
        matrix_file = read_matrix_file(path)
        source = matrix_file.backend
        spec = ScalarSpec(field=matrix_file.spec.field,
                          arithmetic=arithmetic or matrix_file.spec.arithmetic)
        backend = BackendFactory.create_backend(spec)
        return matrix_file, backend, backend.convert(matrix_file.matrix, source)

    def regularize_file(self, request: RegularizeRequest) -> Tuple[DecompositionReport, ReductionTrace]:
        matrix_file, backend, A = self.load(request.input_path, request.arithmetic)
        decomposition, trace = regularize(A, request.form, backend, request.policy)
        report = self.build_report(matrix_file, backend, request, decomposition, trace)
        return report, trace

    def build_report(self, matrix_file: MatrixFile, backend: ScalarBackend, request: RegularizeRequest,
                     decomposition: RegularizingDecomposition, trace: ReductionTrace) -> DecompositionReport:
        A = backend.convert(matrix_file.matrix, matrix_file.backend)
        warnings = list(trace.warnings)
        subspaces = subspace_report(A, request.form, backend, request.policy)
        if trace.steps:
            first = trace.steps[0]
            if subspaces.dim_L != first.m1 or A.shape[0] - subspaces.dim_K != first.m2:
                warnings.append(f"subspace dimensions (L={subspaces.dim_L}, K={subspaces.dim_K}) "
                                f"disagree with m1={first.m1}, m2={first.m2}")
        return DecompositionReport(
            input_digest=matrix_digest(matrix_file.spec, matrix_file.matrix),
            field=backend.spec.field,
            arithmetic=backend.spec.arithmetic,
            form=request.form,
            tol_scale=request.policy.tol_scale,
            size=A.shape[0],
            m_sequence=decomposition.m_sequence,
            blocks=decomposition.blocks,
            regular_size=decomposition.regular_size,
            regular=to_payload(decomposition.regular, backend),
            steps=[step_to_payload(step, backend) for step in trace.steps],
            subspaces=SubspacePayload(dim_L=subspaces.dim_L, dim_K=subspaces.dim_K),
            ill_conditioned=trace.ill_conditioned,
            warnings=warnings,
        )

    def compare_files(self, request: CompareRequest) -> Tuple[Verdict, ScalarBackend]:
        file_a, backend, A = self.load(request.path_a, request.arithmetic)
        file_b, _, _ = self.load(request.path_b, request.arithmetic)
        if file_a.spec != file_b.spec:
            raise DomainError(f"Scalar specs differ: {file_a.spec.label()} vs {file_b.spec.label()}")
        B = backend.convert(file_b.matrix, file_b.backend)
        witness = None
        if request.witness_path:
            witness_file = read_matrix_file(request.witness_path)
            if witness_file.spec != file_a.spec:
                raise DomainError(f"Witness is {witness_file.spec.label()}, inputs are {file_a.spec.label()}")
            witness = backend.convert(witness_file.matrix, witness_file.backend)
        verdict = compare(A, B, request.form, backend, request.policy, witness, request.tol)
        return verdict, backend

    def verify_files(self, input_path: str, report_path: str, tol: float = 1e-9) -> VerificationReport:
        """Replay a saved report against its input; the digest must match."""
        report = read_report(report_path)
        matrix_file = read_matrix_file(input_path)
        if matrix_digest(matrix_file.spec, matrix_file.matrix) != report.input_digest:
            raise DigestMismatchError("wrong input for this report (digest mismatch)")
        backend = BackendFactory.create_backend(ScalarSpec(field=report.field, arithmetic=report.arithmetic))
        A = backend.convert(matrix_file.matrix, matrix_file.backend)
        trace = trace_from_report(report)
        result = verify_trace(A, trace, report.form, backend, tol, RankPolicy(tol_scale=report.tol_scale))
        return VerificationReport(checks=result.checks + self._claim_checks(report, trace))

    @staticmethod
    def _claim_checks(report: DecompositionReport, trace: ReductionTrace) -> List[VerificationCheck]:
        """Checks on what the report states beyond the replayable steps."""
        claimed = report.m_sequence
        checks = [
            VerificationCheck(name="claimed_monotonicity", passed=is_weakly_decreasing(claimed),
                              detail=f"claimed m-sequence {claimed}"),
            VerificationCheck(name="m_sequence_matches_steps", passed=claimed == trace.m_sequence,
                              detail=f"claimed {claimed}, steps give {trace.m_sequence}"),
        ]
        try:
            blocks_ok = sorted(report.blocks, reverse=True) == blocks_from_m_sequence(trace.m_sequence)
        except InvariantViolationError:
            blocks_ok = False
        checks.append(VerificationCheck(name="blocks_match_m_sequence", passed=blocks_ok,
                                        detail=f"claimed blocks {report.blocks}"))
        checks.append(VerificationCheck(name="regular_size", passed=report.regular_size == trace.regular.shape[0],
                                        detail=f"claimed {report.regular_size}"))
        return checks

    def synthesize_file(self, request: SynthesizeRequest) -> Tuple[str, str]:
        """Write the instance and its ground-truth sidecar; returns both paths."""
        backend = BackendFactory.create_backend(request.scalar)
        A, truth = synthesize(request.spec, request.form, backend)
        write_matrix_file(request.output_path, request.scalar, A)
        sidecar = GroundTruthSidecar(
            prng=PRNG_ALGORITHM,
            seed=request.spec.seed,
            field=request.scalar.field,
            arithmetic=request.scalar.arithmetic,
            form=request.form,
            scramble=request.spec.scramble.value,
            regular_size=request.spec.regular_size,
            blocks=truth.blocks,
            m_sequence=truth.m_sequence,
            regular=to_payload(truth.regular, backend),
            instance_digest=matrix_digest(request.scalar, A),
        )
        sidecar_path = GroundTruthSidecarWriter.sidecar_path(request.output_path)
        GroundTruthSidecarWriter().write(sidecar_path, sidecar)
        return request.output_path, sidecar_path

    def survey(self, request: SurveyRequest) -> List[Dict[str, Any]]:
        """Run a seeded batch; one row per instance."""
        rng = make_rng(request.seed)
        make_row = self._recovery_row if request.kind == SurveyKind.RECOVERY else self._agreement_row
        rows = []
        for index in range(request.count):
            try:
                rows.append(make_row(index, rng, request))
            except FormRegError:
                raise
            except Exception as e:
                raise RuntimeError(f"Survey instance {index} failed: {str(e)}") from e
        if request.output_path:
            write_survey_table(rows, request.output_path)
        return rows

    def _recovery_row(self, index: int, rng: np.random.Generator, request: SurveyRequest) -> Dict[str, Any]:
        backend = BackendFactory.create_backend(request.scalar)
        spec = random_synthesis_spec(rng, request.max_size, request.scramble)
        A, truth = synthesize(spec, request.form, backend)
        decomposition, trace = regularize(A, request.form, backend, request.policy)
        recovered = (Counter(decomposition.blocks) == Counter(truth.blocks)
                     and decomposition.regular_size == truth.regular_size)
        guarded = not backend.exact and trace.min_margin <= request.policy.margin_factor
        return {
            "index": index,
            "seed": spec.seed,
            "size": A.shape[0],
            "regular_size": truth.regular_size,
            "blocks": _join(truth.blocks),
            "recovered_blocks": _join(decomposition.blocks),
            "recovered_regular_size": decomposition.regular_size,
            "m_sequence": _join(decomposition.m_sequence),
            "min_margin": _margin_value(trace.min_margin),
            "status": "recovered" if recovered else ("guarded" if guarded else "failed"),
        }

    def _agreement_row(self, index: int, rng: np.random.Generator, request: SurveyRequest) -> Dict[str, Any]:
        exact = BackendFactory.create_backend(ScalarSpec(field=request.scalar.field, arithmetic=Arithmetic.EXACT))
        floating = BackendFactory.create_backend(ScalarSpec(field=request.scalar.field, arithmetic=Arithmetic.FLOAT))
        n = int(rng.integers(1, request.max_size, endpoint=True))
        A = random_integer_matrix(rng, n, exact)
        exact_dec, _ = regularize(A, request.form, exact)
        float_dec, float_trace = regularize(floating.convert(A, exact), request.form, floating, request.policy)
        agree = (exact_dec.m_sequence == float_dec.m_sequence and exact_dec.blocks == float_dec.blocks
                 and exact_dec.regular_size == float_dec.regular_size)
        guarded = float_trace.min_margin <= request.policy.margin_factor
        if agree:
            status = "agree"
        else:
            status = "guarded" if guarded else "failed"
        return {
            "index": index,
            "size": n,
            "exact_m_sequence": _join(exact_dec.m_sequence),
            "float_m_sequence": _join(float_dec.m_sequence),
            "exact_blocks": _join(exact_dec.blocks),
            "float_blocks": _join(float_dec.blocks),
            "min_margin": _margin_value(float_trace.min_margin),
            "status": status,
        }

    def get_available_fields(self) -> List[str]:
        """Get list of scalar fields with a backend."""
        return list(dict.fromkeys(spec.field.value for spec in BackendFactory.get_available_specs()))

    def get_available_arithmetics(self) -> List[str]:
        """Get list of arithmetics with a backend."""
        return list(dict.fromkeys(spec.arithmetic.value for spec in BackendFactory.get_available_specs()))

    def get_available_scramble_modes(self) -> List[str]:
        """Get list of available scramble modes."""
        return [mode.value for mode in ScrambleFactory.get_available_modes()]

    def get_available_report_formats(self) -> List[str]:
        """Get list of available report formats."""
        return ReportWriterFactory.get_available_formats()

    @staticmethod
    def render_decomposition(report: DecompositionReport, report_format) -> str:
        return ReportWriterFactory.create_writer(report_format).render_decomposition(report)

    @staticmethod
    def write_text(path: Optional[str], text: str) -> None:
        output_path = Path(path)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        output_path.write_text(text, encoding="utf-8")


def _join(values) -> str:
    return ",".join(str(v) for v in values)


def _margin_value(value: float) -> Optional[float]:
    return None if value == float("inf") else value
