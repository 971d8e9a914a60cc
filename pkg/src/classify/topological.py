"""
Topological (*)congruence of square matrices.

Two matrices are topologically (*)congruent iff their singular Jordan
summands agree up to permutation and their regular parts are topologically
(*)congruent. The second condition is only settled here when the regular
parts are empty, equal, or related by a supplied linear witness.

Forms are read as Phi(x, y) = x^T A conj(y) (no conjugation for bilinear
forms), so the left kernel L = {x : x^T A = 0} is the left null space of A.
"""
import logging
from collections import Counter
from typing import Optional

import numpy as np

from ..models.config import FormKind, RankPolicy
from ..models.errors import ShapeError
from ..models.results import SubspaceReport, Verdict, VerdictTag
from ..numkit.backends import ScalarBackend
from ..numkit.linalg import (
    congruence, is_nonsingular, matrices_match, null_space, rank_of, rank_scale, require_square, residual,
)
from ..regengine.engine import regularize

logger = logging.getLogger(__name__)


def left_kernel_dim(A: np.ndarray, form: FormKind, backend: ScalarBackend,
                    policy: Optional[RankPolicy] = None) -> int:
    """dim L = size(A) - rank(A)."""
    n = require_square(A)
    backend.check_form(form)
    return n - rank_of(A, backend, policy).rank


def k_subspace_dim(A: np.ndarray, form: FormKind, backend: ScalarBackend,
                   policy: Optional[RankPolicy] = None) -> int:
    """dim K for K = {x : Phi(x, l) = 0 for all l in L}."""
    n = require_square(A)
    backend.check_form(form)
    scale = rank_scale(A, backend)
    N = null_space(A.T.copy(), backend, policy, scale)
    if form == FormKind.SESQUILINEAR:
        N = backend.conj(N)
    coupling = backend.matmul(A, N)
    return n - rank_of(coupling, backend, policy, scale).rank


def subspace_report(A: np.ndarray, form: FormKind, backend: ScalarBackend,
                    policy: Optional[RankPolicy] = None) -> SubspaceReport:
    return SubspaceReport(dim_L=left_kernel_dim(A, form, backend, policy),
                          dim_K=k_subspace_dim(A, form, backend, policy))


def check_congruence_witness(R_A: np.ndarray, R_B: np.ndarray, S: np.ndarray, form: FormKind,
                             backend: ScalarBackend, tol: float = 1e-9,
                             policy: Optional[RankPolicy] = None) -> bool:
    """True iff S is nonsingular and S R_A S^star = R_B."""
    n = require_square(R_A)
    if require_square(R_B) != n or require_square(S, "witness") != n:
        raise ShapeError(f"Witness check needs matching sizes, got {R_A.shape}, {R_B.shape}, {S.shape}")
    backend.check_form(form)
    if not is_nonsingular(S, backend, policy):
        return False
    return matrices_match(congruence(S, R_A, form, backend), R_B, backend, tol)


def _regular_parts_equal(R_A: np.ndarray, R_B: np.ndarray, backend: ScalarBackend, tol: float) -> bool:
    """Equality up to tol relative to the larger part; symmetric in R_A and R_B."""
    if R_A.shape != R_B.shape:
        return False
    if R_A.shape[0] == 0 or backend.exact:
        return matrices_match(R_A, R_B, backend, tol)
    bound = tol * (1.0 + max(backend.max_abs(R_A), backend.max_abs(R_B)))
    return residual(R_A, R_B, backend) <= bound


def compare(A: np.ndarray, B: np.ndarray, form: FormKind, backend: ScalarBackend,
            policy: Optional[RankPolicy] = None, witness: Optional[np.ndarray] = None,
            tol: float = 1e-9) -> Verdict:
    """Decide topological (*)congruence of A and B as far as their regular parts allow."""
    backend.coerce(A)
    backend.coerce(B)
    size_a, size_b = require_square(A), require_square(B)
    if size_a != size_b:
        return Verdict(tag=VerdictTag.NOT_EQUIVALENT, violated="size",
                       reason=f"sizes differ ({size_a} vs {size_b})")

    dec_a, trace_a = regularize(A, form, backend, policy)
    dec_b, trace_b = regularize(B, form, backend, policy)
    warnings = [f"A: {w}" for w in trace_a.warnings] + [f"B: {w}" for w in trace_b.warnings]
    details = dict(blocks_a=dec_a.blocks, blocks_b=dec_b.blocks,
                   summands_a=len(dec_a.blocks), summands_b=len(dec_b.blocks),
                   regular_a=dec_a.regular, regular_b=dec_b.regular, warnings=warnings)

    if Counter(dec_a.blocks) != Counter(dec_b.blocks):
        return Verdict(tag=VerdictTag.NOT_EQUIVALENT, violated="blocks",
                       reason=f"singular summands differ ({_fmt(dec_a.blocks)} vs {_fmt(dec_b.blocks)})",
                       **details)
    if dec_a.regular_size != dec_b.regular_size:
        return Verdict(tag=VerdictTag.NOT_EQUIVALENT, violated="regular_size",
                       reason=f"regular parts differ in size ({dec_a.regular_size} vs {dec_b.regular_size})",
                       **details)
    if _regular_parts_equal(dec_a.regular, dec_b.regular, backend, tol):
        return Verdict(tag=VerdictTag.EQUIVALENT,
                       reason="same singular summands and equal regular parts", **details)
    if witness is not None:
        if check_congruence_witness(dec_a.regular, dec_b.regular, witness, form, backend, tol, policy):
            return Verdict(tag=VerdictTag.EQUIVALENT, witness_checked=True,
                           reason="same singular summands and witness-verified regular parts", **details)
        logger.info("witness does not relate the regular parts")
    return Verdict(tag=VerdictTag.REDUCED_TO_REGULAR_PARTS, witness_checked=witness is not None,
                   reason="same singular summands; equivalence reduces to the regular parts", **details)


def _fmt(blocks) -> str:
    return "{" + ",".join(str(b) for b in blocks) + "}"
