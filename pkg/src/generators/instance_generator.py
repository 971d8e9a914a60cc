"""
Seeded test instances with known regularizing decompositions.
Scrambling transforms follow the Strategy Pattern; each strategy builds the
matrix T of the congruence A = T D T^star.
"""
import logging
from abc import ABC, abstractmethod
from typing import Optional, Tuple, Union

import numpy as np
import scipy.linalg

from ..models.config import FormKind, ScrambleMode, SynthesisSpec
from ..models.errors import PreconditionError, UnsupportedError
from ..models.results import RegularizingDecomposition
from ..numkit.backends import ScalarBackend
from ..numkit.linalg import congruence, direct_sum, is_nonsingular, jordan_block, require_square
from ..regengine.engine import m_sequence_for_blocks

logger = logging.getLogger(__name__)

PRNG_ALGORITHM = "numpy.PCG64"
MAX_CONDITION = 1e6
MAX_ATTEMPTS = 1000

Seed = Union[int, np.random.SeedSequence]


def make_rng(seed: Seed) -> np.random.Generator:
    """PCG64 generator; identical seeds give identical streams on every platform."""
    return np.random.Generator(np.random.PCG64(seed))


def random_nonsingular(n: int, seed: Seed, backend: ScalarBackend, entry_bound: int = 3) -> np.ndarray:
    """n x n nonsingular matrix.

    Exact backends draw integer (Gaussian integer) entries in
    [-entry_bound, entry_bound] until the matrix is exactly nonsingular;
    float backends draw Gaussian entries until the condition number is below 1e6.
    """
    rng = make_rng(seed)
    if n == 0:
        return backend.zeros(0, 0)
    for _ in range(MAX_ATTEMPTS):
        if backend.exact:
            re = rng.integers(-entry_bound, entry_bound, size=(n, n), endpoint=True)
            im = rng.integers(-entry_bound, entry_bound, size=(n, n), endpoint=True) \
                if backend.spec.is_complex else None
            candidate = backend.from_integers(re, im)
            if is_nonsingular(candidate, backend):
                return candidate
        else:
            candidate = rng.standard_normal((n, n))
            if backend.spec.is_complex:
                candidate = candidate + 1j * rng.standard_normal((n, n))
            candidate = np.asarray(candidate, dtype=backend.dtype)
            if np.linalg.cond(candidate) < MAX_CONDITION:
                return candidate
    raise RuntimeError(f"No nonsingular {n}x{n} sample after {MAX_ATTEMPTS} attempts")


def random_unitary(n: int, seed: Seed, backend: ScalarBackend) -> np.ndarray:
    """Haar-distributed unitary (orthogonal for real fields) via QR of a Gaussian matrix."""
    if backend.exact:
        raise UnsupportedError("Exact unitary sampling is not offered; use the general scramble")
    rng = make_rng(seed)
    if n == 0:
        return backend.zeros(0, 0)
    Z = rng.standard_normal((n, n))
    if backend.spec.is_complex:
        Z = (Z + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = scipy.linalg.qr(Z)
    diagonal = np.diag(R)
    phases = diagonal / np.abs(diagonal)
    return np.asarray(Q * phases, dtype=backend.dtype)


class ScrambleStrategy(ABC):
    """Abstract base class for congruence scrambles."""

    @abstractmethod
    def transform(self, n: int, seed: Seed, backend: ScalarBackend, entry_bound: int) -> np.ndarray:
        """Return the nonsingular T of A = T D T^star."""
        pass


class IdentityScramble(ScrambleStrategy):
    def transform(self, n: int, seed: Seed, backend: ScalarBackend, entry_bound: int) -> np.ndarray:
        return backend.eye(n)


class UnitaryScramble(ScrambleStrategy):
    def transform(self, n: int, seed: Seed, backend: ScalarBackend, entry_bound: int) -> np.ndarray:
        return random_unitary(n, seed, backend)


class GeneralScramble(ScrambleStrategy):
    def transform(self, n: int, seed: Seed, backend: ScalarBackend, entry_bound: int) -> np.ndarray:
        return random_nonsingular(n, seed, backend, entry_bound)


class ScrambleFactory:
    """Factory for creating scramble strategies following the Factory Pattern."""

    _scrambles = {
        ScrambleMode.NONE: IdentityScramble,
        ScrambleMode.UNITARY: UnitaryScramble,
        ScrambleMode.GENERAL: GeneralScramble,
    }

    @classmethod
    def create_scramble(cls, mode: ScrambleMode) -> ScrambleStrategy:
        if mode not in cls._scrambles:
            raise ValueError(f"Unsupported scramble mode: {mode}")
        return cls._scrambles[mode]()

    @classmethod
    def get_available_modes(cls) -> list[ScrambleMode]:
        return list(cls._scrambles.keys())


def synthesize(spec: SynthesisSpec, form: FormKind, backend: ScalarBackend,
               regular: Optional[np.ndarray] = None) -> Tuple[np.ndarray, RegularizingDecomposition]:
    """Build A = T (R + J_{n1} + ... + J_{np}) T^star and its ground truth."""
    backend.check_form(form)
    regular_seed, scramble_seed = np.random.SeedSequence(spec.seed).spawn(2)
    if regular is None:
        regular = random_nonsingular(spec.regular_size, regular_seed, backend, spec.entry_bound)
    else:
        size = require_square(regular, "regular part")
        if size != spec.regular_size:
            raise PreconditionError(f"Regular part has size {size}, spec asks for {spec.regular_size}")
        if not is_nonsingular(regular, backend):
            raise PreconditionError("Supplied regular part is singular")

    blocks = sorted(spec.blocks, reverse=True)
    D = direct_sum([regular] + [jordan_block(k, backend) for k in blocks], backend)
    scramble = ScrambleFactory.create_scramble(spec.scramble)
    T = scramble.transform(D.shape[0], scramble_seed, backend, spec.entry_bound)
    A = congruence(T, D, form, backend)
    logger.debug("synthesized size %d: regular=%d blocks=%s scramble=%s",
                 D.shape[0], spec.regular_size, blocks, spec.scramble.value)
    truth = RegularizingDecomposition(regular=regular, blocks=blocks,
                                      m_sequence=m_sequence_for_blocks(blocks))
    return A, truth


def random_synthesis_spec(rng: np.random.Generator, max_size: int, scramble: ScrambleMode,
                          entry_bound: int = 3) -> SynthesisSpec:
    """Random regular size and block partition with total size <= max_size."""
    total = int(rng.integers(0, max_size, endpoint=True))
    regular_size = int(rng.integers(0, total, endpoint=True))
    remaining = total - regular_size
    blocks = []
    while remaining > 0:
        size = int(rng.integers(1, remaining, endpoint=True))
        blocks.append(size)
        remaining -= size
    return SynthesisSpec(regular_size=regular_size, blocks=blocks, scramble=scramble,
                         seed=int(rng.integers(0, 2 ** 63)), entry_bound=entry_bound)


def random_integer_matrix(rng: np.random.Generator, n: int, backend: ScalarBackend,
                          entry_bound: int = 3) -> np.ndarray:
    """Integer entries in [-entry_bound, entry_bound], randomly thinned so singular cases are common."""
    density = rng.uniform(0.2, 1.0)
    re = rng.integers(-entry_bound, entry_bound, size=(n, n), endpoint=True)
    re = re * (rng.random((n, n)) < density)
    im = None
    if backend.spec.is_complex:
        im = rng.integers(-entry_bound, entry_bound, size=(n, n), endpoint=True)
        im = im * (rng.random((n, n)) < density)
    return backend.from_integers(re, im)
