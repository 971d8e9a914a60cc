"""
The regularizing reduction of a square matrix under (*)congruence.

One step splits off the left kernel (m1 zero rows after a row compression),
then compresses the coupling block C to m2 independent rows; the remaining
square block A2 is reduced again until it is nonsingular. The m-sequence
m1 >= m2 >= ... >= m_2t determines the singular Jordan summands:
J_i occurs m_i - m_{i+1} times, with m_{2t+1} = 0.
"""
import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from ..models.config import FormKind, RankPolicy, RankScale
from ..models.errors import InvariantViolationError, PreconditionError
from ..models.results import ReductionTrace, RegularizingDecomposition, StepRecord
from ..numkit.backends import ScalarBackend
from ..numkit.linalg import (
    compress_rows, congruence, direct_sum, is_nonsingular, jordan_block, rank_of, rank_scale,
    require_square,
)

logger = logging.getLogger(__name__)


def blocks_from_m_sequence(m_sequence: List[int]) -> List[int]:
    """Jordan block sizes, descending, from multiplicities m_i - m_{i+1}."""
    padded = list(m_sequence) + [0]
    blocks: List[int] = []
    for i in range(len(m_sequence)):
        count = padded[i] - padded[i + 1]
        if count < 0:
            raise InvariantViolationError(f"m-sequence {m_sequence} is not weakly decreasing")
        blocks.extend([i + 1] * count)
    return sorted(blocks, reverse=True)


def m_sequence_for_blocks(blocks: List[int]) -> List[int]:
    """Inverse of blocks_from_m_sequence: m_i = number of blocks of size >= i."""
    if not blocks:
        return []
    length = 2 * math.ceil(max(blocks) / 2)
    return [sum(1 for b in blocks if b >= i) for i in range(1, length + 1)]


def is_weakly_decreasing(sequence: List[int]) -> bool:
    return all(a >= b for a, b in zip(sequence, sequence[1:]))


def regularization_step(A: np.ndarray, form: FormKind, backend: ScalarBackend,
                        policy: Optional[RankPolicy] = None,
                        scale: Optional[RankScale] = None) -> StepRecord:
    """One reduction of a singular square matrix.

    Returns the transforms S, S1 and the blocks D, E, F, C1, A2 of
    (S1 + I) S A S^star (S1^star + I) = [[D, E, C1], [F, A2, 0], [0, 0, 0]].
    """
    n = require_square(A)
    backend.check_form(form)
    if n == 0:
        raise PreconditionError("The empty matrix is nonsingular; nothing to reduce")
    policy = policy or RankPolicy()
    if scale is None:
        scale = rank_scale(A, backend)

    first = compress_rows(A, backend, policy, scale)
    m1 = first.m
    if m1 == 0:
        raise PreconditionError("Matrix is nonsingular; the reduction loop must stop here")
    r = n - m1

    M = congruence(first.S, A, form, backend)
    M[r:, :] = backend.zero
    C = M[:r, r:]

    second = compress_rows(C, backend, policy, scale)
    S1 = second.S
    m2 = r - second.m

    W = direct_sum([S1, backend.eye(m1)], backend)
    N = congruence(W, M, form, backend)
    N[m2:r, r:] = backend.zero
    N[r:, :] = backend.zero

    logger.debug("step on size %d: m1=%d m2=%d margins=(%.3g, %.3g)",
                 n, m1, m2, first.report.margin, second.report.margin)
    return StepRecord(
        input_size=n,
        m1=m1,
        m2=m2,
        S=first.S,
        S1=S1,
        D=N[:m2, :m2].copy(),
        E=N[:m2, m2:r].copy(),
        F=N[m2:r, :m2].copy(),
        C1=N[:m2, r:].copy(),
        A2=N[m2:r, m2:r].copy(),
        compress_report=first.report,
        coupling_report=second.report,
    )


def regularize(A: np.ndarray, form: FormKind, backend: ScalarBackend,
               policy: Optional[RankPolicy] = None) -> Tuple[RegularizingDecomposition, ReductionTrace]:
    """Reduce A until the working block is nonsingular.

    Returns the decomposition (regular part, Jordan block sizes, m-sequence)
    and the trace of every step.
    """
    n = require_square(A)
    backend.check_form(form)
    policy = policy or RankPolicy()
    scale = rank_scale(A, backend)

    working = A.copy()
    steps: List[StepRecord] = []
    while True:
        report = rank_of(working, backend, policy, scale)
        if report.rank == working.shape[0]:
            break
        step = regularization_step(working, form, backend, policy, scale)
        if step.A2.shape[0] >= working.shape[0]:
            raise InvariantViolationError("Reduction step did not shrink the working matrix")
        steps.append(step)
        working = step.A2

    warnings: List[str] = []
    ill_conditioned = False
    if not backend.exact:
        if working.shape[0] and report.margin <= policy.margin_factor:
            ill_conditioned = True
            warnings.append(
                f"ill-conditioned: smallest singular value of the regular part "
                f"{report.smallest_accepted:.3e} is within {policy.margin_factor:g}x "
                f"of the rank threshold {report.threshold:.3e}"
            )
        for index, step in enumerate(steps, start=1):
            if min(step.margins) <= policy.margin_factor:
                warnings.append(f"step {index}: rank margin {min(step.margins):.3g} "
                                f"is below {policy.margin_factor:g}")
        for message in warnings:
            logger.warning(message)

    trace = ReductionTrace(
        input_size=n,
        form=form,
        scalar=backend.spec,
        steps=steps,
        regular=working,
        regular_report=report,
        ill_conditioned=ill_conditioned,
        warnings=warnings,
    )
    m_sequence = trace.m_sequence
    if not is_weakly_decreasing(m_sequence):
        raise InvariantViolationError(f"m-sequence {m_sequence} is not weakly decreasing")
    decomposition = RegularizingDecomposition(
        regular=working,
        blocks=blocks_from_m_sequence(m_sequence),
        m_sequence=m_sequence,
    )
    if decomposition.size != n:
        raise InvariantViolationError(
            f"Decomposition covers {decomposition.size} of {n} dimensions")
    logger.debug("regularized size %d: m=%s blocks=%s regular=%d",
                 n, m_sequence, decomposition.blocks, decomposition.regular_size)
    return decomposition, trace


def assemble_decomposition(decomposition: RegularizingDecomposition, backend: ScalarBackend,
                           policy: Optional[RankPolicy] = None) -> np.ndarray:
    """R + J_{n1} + ... + J_{np} with blocks in descending size order."""
    R = decomposition.regular
    require_square(R, "regular part")
    if not is_nonsingular(R, backend, policy):
        raise InvariantViolationError("Regular part of a decomposition must be nonsingular")
    blocks = [jordan_block(k, backend) for k in sorted(decomposition.blocks, reverse=True)]
    return direct_sum([R] + blocks, backend)
