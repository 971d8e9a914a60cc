"""
Dense matrix operations shared by the engine and the classifier: the star
involution, rank decisions, row compression, direct sums and Jordan blocks.

Exact backends decide ranks by elimination; float backends by an SVD
threshold tol_scale * max(rows, cols) * eps * sigma_max.
"""
import logging
from typing import List, NamedTuple, Optional

import numpy as np
import scipy.linalg

from ..models.config import FormKind, RankPolicy, RankScale
from ..models.errors import DomainError, ShapeError
from ..models.results import RankReport
from .backends import ScalarBackend

logger = logging.getLogger(__name__)

EPS = np.finfo(np.float64).eps


class RowCompression(NamedTuple):
    """S A = [A1; 0] with A1 of full row rank and m zero rows."""
    S: np.ndarray
    A1: np.ndarray
    m: int
    report: RankReport


def require_square(A: np.ndarray, what: str = "matrix") -> int:
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"Expected a square {what}, got shape {A.shape}")
    return A.shape[0]


def star(A: np.ndarray, form: FormKind, backend: ScalarBackend) -> np.ndarray:
    """Transpose for bilinear forms, conjugate transpose for sesquilinear ones."""
    backend.check_form(form)
    if form == FormKind.SESQUILINEAR:
        return backend.conj(A).T.copy()
    return A.T.copy()


def congruence(S: np.ndarray, A: np.ndarray, form: FormKind, backend: ScalarBackend) -> np.ndarray:
    """S A S^star."""
    return backend.matmul(backend.matmul(S, A), star(S, form, backend))


def rank_scale(A: np.ndarray, backend: ScalarBackend) -> Optional[RankScale]:
    """Scale of a whole reduction (None for exact backends)."""
    if backend.exact:
        return None
    sigma_max = float(scipy.linalg.norm(A, 2)) if A.size else 0.0
    return RankScale(sigma_max=sigma_max, dim=max(A.shape, default=0))


def _threshold(A: np.ndarray, singular_values: np.ndarray, policy: RankPolicy,
               scale: Optional[RankScale]) -> float:
    if scale is None:
        sigma_max = float(singular_values[0]) if singular_values.size else 0.0
        dim = max(A.shape)
    else:
        sigma_max, dim = scale.sigma_max, max(scale.dim, *A.shape)
    return policy.tol_scale * dim * EPS * sigma_max


def _float_rank(A: np.ndarray, singular_values: np.ndarray, policy: RankPolicy,
                scale: Optional[RankScale]) -> RankReport:
    threshold = _threshold(A, singular_values, policy, scale)
    rank = int(np.count_nonzero(singular_values > threshold))
    return RankReport(
        rank=rank,
        exact=False,
        smallest_accepted=float(singular_values[rank - 1]) if rank else 0.0,
        largest_rejected=float(singular_values[rank]) if rank < singular_values.size else 0.0,
        threshold=threshold,
    )


def _exact_rank(A: np.ndarray, backend: ScalarBackend) -> int:
    """Fraction-free (Bareiss) elimination; every division is exact."""
    M = A.copy()
    rows, cols = M.shape
    rank = 0
    previous = backend.one
    for c in range(cols):
        if rank == rows:
            break
        pivot = next((r for r in range(rank, rows) if not backend.is_zero(M[r, c])), None)
        if pivot is None:
            continue
        if pivot != rank:
            M[[rank, pivot], :] = M[[pivot, rank], :]
        p = M[rank, c]
        for r in range(rank + 1, rows):
            factor = M[r, c]
            M[r, c + 1:] = (M[r, c + 1:] * p - M[rank, c + 1:] * factor) / previous
            M[r, c] = backend.zero
        previous = p
        rank += 1
    return rank


def rank_of(A: np.ndarray, backend: ScalarBackend, policy: Optional[RankPolicy] = None,
            scale: Optional[RankScale] = None) -> RankReport:
    """Rank of A with the decision margin (float) or exactly (exact).

    ``scale`` replaces A's own sigma_max and dimensions in the threshold when A
    is a block of a larger, unitarily transformed matrix.
    """
    if A.size == 0:
        return RankReport(rank=0, exact=backend.exact)
    if backend.exact:
        return RankReport(rank=_exact_rank(A, backend), exact=True)
    policy = policy or RankPolicy()
    return _float_rank(A, scipy.linalg.svdvals(A), policy, scale)


def is_nonsingular(A: np.ndarray, backend: ScalarBackend, policy: Optional[RankPolicy] = None,
                   scale: Optional[RankScale] = None) -> bool:
    n = require_square(A)
    return rank_of(A, backend, policy, scale).rank == n


def compress_rows(A: np.ndarray, backend: ScalarBackend, policy: Optional[RankPolicy] = None,
                  scale: Optional[RankScale] = None) -> RowCompression:
    """Row compression of a possibly rectangular matrix."""
    if A.ndim != 2:
        raise ShapeError(f"Expected a matrix, got shape {A.shape}")
    if backend.exact:
        return _compress_exact(A, backend)
    return _compress_float(A, backend, policy or RankPolicy(), scale)


def _compress_exact(A: np.ndarray, backend: ScalarBackend) -> RowCompression:
    rows, cols = A.shape
    M = A.copy()
    T = backend.eye(rows)
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        pivot = next((r for r in range(rank, rows) if not backend.is_zero(M[r, c])), None)
        if pivot is None:
            continue
        if pivot != rank:
            M[[rank, pivot], :] = M[[pivot, rank], :]
            T[[rank, pivot], :] = T[[pivot, rank], :]
        for r in range(rank + 1, rows):
            if backend.is_zero(M[r, c]):
                continue
            factor = M[r, c] / M[rank, c]
            M[r, :] = M[r, :] - M[rank, :] * factor
            T[r, :] = T[r, :] - T[rank, :] * factor
        rank += 1
    return RowCompression(S=T, A1=M[:rank, :].copy(), m=rows - rank,
                          report=RankReport(rank=rank, exact=True))


def _compress_float(A: np.ndarray, backend: ScalarBackend, policy: RankPolicy,
                    scale: Optional[RankScale]) -> RowCompression:
    rows, cols = A.shape
    if A.size == 0:
        return RowCompression(S=backend.eye(rows), A1=backend.zeros(0, cols), m=rows,
                              report=RankReport(rank=0, exact=False))
    U, singular_values, _ = scipy.linalg.svd(A, full_matrices=True)
    report = _float_rank(A, singular_values, policy, scale)
    S = np.asarray(U.conj().T, dtype=backend.dtype)
    SA = backend.matmul(S, A)
    # rows below the rank are under the threshold by construction
    SA[report.rank:, :] = 0
    return RowCompression(S=S, A1=SA[:report.rank, :].copy(), m=rows - report.rank, report=report)


def row_compress(A: np.ndarray, backend: ScalarBackend, policy: Optional[RankPolicy] = None,
                 scale: Optional[RankScale] = None):
    """Return (S, A1, m) with S A = [A1; 0], A1 of full row rank, m = n - rank(A).

    Float backends return a unitary (orthogonal) S whose last m rows span the
    left null space; exact backends return the elimination transform.
    """
    require_square(A)
    result = compress_rows(A, backend, policy, scale)
    return result.S, result.A1, result.m


def null_space(A: np.ndarray, backend: ScalarBackend, policy: Optional[RankPolicy] = None,
               scale: Optional[RankScale] = None) -> np.ndarray:
    """Columns spanning {x : A x = 0}."""
    rows, cols = A.shape
    if backend.exact:
        return _null_space_exact(A, backend)
    if A.size == 0:
        return backend.eye(cols)
    _, singular_values, Vh = scipy.linalg.svd(A, full_matrices=True)
    rank = _float_rank(A, singular_values, policy or RankPolicy(), scale).rank
    return np.asarray(Vh[rank:, :].conj().T, dtype=backend.dtype)


def _null_space_exact(A: np.ndarray, backend: ScalarBackend) -> np.ndarray:
    """Reduced row echelon form, then one basis vector per free column."""
    rows, cols = A.shape
    M = A.copy()
    pivots: List[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        pivot = next((i for i in range(r, rows) if not backend.is_zero(M[i, c])), None)
        if pivot is None:
            continue
        if pivot != r:
            M[[r, pivot], :] = M[[pivot, r], :]
        M[r, :] = M[r, :] / M[r, c]
        for i in range(rows):
            if i != r and not backend.is_zero(M[i, c]):
                M[i, :] = M[i, :] - M[r, :] * M[i, c]
        pivots.append(c)
        r += 1
    free = [c for c in range(cols) if c not in pivots]
    basis = backend.zeros(cols, len(free))
    for k, f in enumerate(free):
        basis[f, k] = backend.one
        for i, p in enumerate(pivots):
            basis[p, k] = -M[i, f]
    return basis


def direct_sum(blocks: List[np.ndarray], backend: ScalarBackend) -> np.ndarray:
    """Block-diagonal matrix of square blocks; the empty sum is 0x0."""
    for block in blocks:
        require_square(block, "direct summand")
    size = sum(block.shape[0] for block in blocks)
    out = backend.zeros(size, size)
    offset = 0
    for block in blocks:
        k = block.shape[0]
        out[offset:offset + k, offset:offset + k] = block
        offset += k
    return out


def jordan_block(n: int, backend: ScalarBackend) -> np.ndarray:
    """n x n nilpotent Jordan block with ones on the superdiagonal."""
    if n < 1:
        raise DomainError("Jordan blocks have size at least 1; use an empty direct sum for 0x0")
    J = backend.zeros(n, n)
    for i in range(n - 1):
        J[i, i + 1] = backend.one
    return J


def residual(A: np.ndarray, B: np.ndarray, backend: ScalarBackend) -> float:
    """max |A - B| (0.0 exactly when equal in the exact backend)."""
    if A.shape != B.shape:
        return float("inf")
    if backend.exact:
        return 0.0 if backend.is_zero_matrix(A - B) else backend.max_abs(A - B)
    return backend.max_abs(A - B)


def matrices_match(A: np.ndarray, B: np.ndarray, backend: ScalarBackend, tol: float) -> bool:
    """Exact equality, or max |A - B| <= tol * (1 + max |B|) for float backends."""
    if A.shape != B.shape:
        return False
    if backend.exact:
        return backend.is_zero_matrix(A - B)
    return residual(A, B, backend) <= tol * (1.0 + backend.max_abs(B))


def unitary_defect(S: np.ndarray, backend: ScalarBackend) -> float:
    """max |S S^* - I|."""
    n = require_square(S)
    product = backend.matmul(S, backend.conj(S).T)
    return backend.max_abs(product - backend.eye(n))
