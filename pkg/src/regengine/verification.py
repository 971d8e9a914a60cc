"""
Replay of a reduction trace against its input matrix.
Every structural claim of each step is re-checked independently of the
engine: transforms, zero patterns, block contents, ranks and the m-sequence.
"""
import logging
from typing import List, Optional

import numpy as np

from ..models.config import FormKind, RankPolicy
from ..models.errors import ShapeError
from ..models.results import ReductionTrace, StepRecord, VerificationCheck, VerificationReport
from ..numkit.backends import ScalarBackend
from ..numkit.linalg import (
    congruence, direct_sum, matrices_match, rank_of, rank_scale, require_square,
    residual, unitary_defect,
)
from .engine import is_weakly_decreasing

logger = logging.getLogger(__name__)


class _Replay:
    """Collects checks while walking the steps of one trace."""

    def __init__(self, backend: ScalarBackend, form: FormKind, tol: float,
                 policy: RankPolicy, scale):
        self.backend = backend
        self.form = form
        self.tol = tol
        self.policy = policy
        self.scale = scale
        self.checks: List[VerificationCheck] = []

    def add(self, name: str, passed: bool, margin: Optional[float] = None, detail: str = "") -> bool:
        self.checks.append(VerificationCheck(name=name, passed=bool(passed), margin=margin, detail=detail))
        return passed

    def zero_block(self, name: str, block: np.ndarray, reference: np.ndarray) -> bool:
        size = self.backend.max_abs(block)
        bound = self.tol * (1.0 + self.backend.max_abs(reference))
        passed = self.backend.is_zero_matrix(block) if self.backend.exact else size <= bound
        return self.add(name, passed, None if self.backend.exact else size,
                        "" if passed else f"max entry {size:.3e} in a block that must vanish")

    def transform(self, name: str, S: np.ndarray, size: int) -> bool:
        if S.shape != (size, size):
            return self.add(name, False, detail=f"shape {S.shape}, expected {(size, size)}")
        if self.backend.exact:
            rank = rank_of(S, self.backend).rank
            return self.add(name, rank == size, detail="" if rank == size else f"rank {rank} < {size}")
        defect = unitary_defect(S, self.backend)
        return self.add(name, defect <= self.tol, defect,
                        "" if defect <= self.tol else f"S S^* deviates from I by {defect:.3e}")

    def step(self, index: int, working: np.ndarray, step: StepRecord) -> Optional[np.ndarray]:
        """Replay one step; returns the next working matrix or None when replay cannot go on."""
        prefix = f"step{index}"
        backend = self.backend
        n = working.shape[0]
        m1, m2 = step.m1, step.m2
        r = n - m1
        self.add(f"{prefix}.coupling_bound", 0 <= m2 <= m1,
                 detail="" if m2 <= m1 else f"m2={m2} exceeds m1={m1}")
        if not (self.transform(f"{prefix}.transform", step.S, n) and 0 < m1 <= n and 0 <= m2 <= r):
            return None

        M = congruence(step.S, working, self.form, backend)
        self.zero_block(f"{prefix}.left_kernel_rows", M[r:, :], working)

        if not self.transform(f"{prefix}.coupling_transform", step.S1, r):
            return None
        W = direct_sum([step.S1, backend.eye(m1)], backend)
        N = congruence(W, M, self.form, backend)
        self.zero_block(f"{prefix}.coupling_zero_rows", N[m2:r, r:], working)

        expected = {"D": N[:m2, :m2], "E": N[:m2, m2:r], "F": N[m2:r, :m2],
                    "C1": N[:m2, r:], "A2": N[m2:r, m2:r]}
        recorded = {"D": step.D, "E": step.E, "F": step.F, "C1": step.C1, "A2": step.A2}
        mismatched = [key for key in expected
                      if not matrices_match(recorded[key], expected[key], backend, self.tol)]
        worst = max((residual(recorded[k], expected[k], backend) for k in expected), default=0.0)
        self.add(f"{prefix}.blocks", not mismatched, None if backend.exact else worst,
                 "" if not mismatched else "recorded blocks differ: " + ", ".join(mismatched))

        c1_rank = rank_of(step.C1, backend, self.policy, self.scale)
        self.add(f"{prefix}.coupling_rank", step.C1.shape == (m2, m1) and c1_rank.rank == m2,
                 None if backend.exact else c1_rank.margin,
                 "" if c1_rank.rank == m2 else f"C1 has rank {c1_rank.rank}, expected {m2}")

        if step.A2.shape != (r - m2, r - m2):
            self.add(f"{prefix}.next_shape", False, detail=f"A2 has shape {step.A2.shape}")
            return None
        return step.A2


def verify_trace(A: np.ndarray, trace: ReductionTrace, form: FormKind, backend: ScalarBackend,
                 tol: float = 1e-9, policy: Optional[RankPolicy] = None) -> VerificationReport:
    """Replay ``trace`` on ``A`` and report every check with its margin."""
    n = require_square(A)
    if trace.input_size != n:
        raise ShapeError(f"Trace is for a {trace.input_size}x{trace.input_size} matrix, input is {n}x{n}")
    backend.check_form(form)
    policy = policy or RankPolicy()
    replay = _Replay(backend, form, tol, policy, rank_scale(A, backend))
    replay.add("form", trace.form == form, detail="" if trace.form == form else
               f"trace was computed for {trace.form.value} forms")

    working: Optional[np.ndarray] = A
    for index, step in enumerate(trace.steps, start=1):
        if working is None:
            break
        try:
            working = replay.step(index, working, step)
        except (ValueError, ShapeError) as e:
            replay.add(f"step{index}.replay", False, detail=str(e))
            working = None

    consumed = sum(step.m1 + step.m2 for step in trace.steps)
    regular = trace.regular
    replay.add("size_telescoping", regular.shape[0] + consumed == n,
               detail=f"regular {regular.shape[0]} + consumed {consumed} vs size {n}")

    if working is not None:
        same = matrices_match(regular, working, backend, tol)
        replay.add("regular_matches_last_step", same,
                   None if backend.exact else residual(regular, working, backend))

    if regular.ndim == 2 and regular.shape[0] == regular.shape[1]:
        report = rank_of(regular, backend, policy, replay.scale)
        nonsingular = report.rank == regular.shape[0]
        replay.add("regular_nonsingular", nonsingular,
                   None if backend.exact or regular.shape[0] == 0 else report.margin,
                   "" if nonsingular else f"rank {report.rank} < {regular.shape[0]}")
    else:
        replay.add("regular_nonsingular", False, detail=f"regular part has shape {regular.shape}")

    sequence = trace.m_sequence
    replay.add("monotonicity", is_weakly_decreasing(sequence),
               detail=f"m-sequence {sequence}")

    result = VerificationReport(checks=replay.checks)
    if not result.passed:
        logger.info("trace verification failed: %s", [c.name for c in result.failed()])
    return result
