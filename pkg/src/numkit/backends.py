"""
Scalar arithmetic backends following the Strategy Pattern.
Each backend owns one ScalarSpec: how its scalars are built, compared,
conjugated, printed and parsed, and how its matrices are multiplied.
"""
import math
import re
from abc import ABC, abstractmethod
from fractions import Fraction
from typing import Any, Callable, Optional

import numpy as np
from sympy.polys.domains import QQ, QQ_I

from ..models.config import Arithmetic, FormKind, ScalarField, ScalarSpec
from ..models.errors import DomainError, InvalidFormError, MatrixFileError

_UNSIGNED_RATIONAL = r"\d+(?:/\d+)?"
_UNSIGNED_FLOAT = r"(?:(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?|inf|nan)"


def _complex_pattern(unsigned: str) -> "re.Pattern":
    # re+imi, a pure imaginary "imi", or a bare real part
    signed = rf"[+-]?{unsigned}"
    return re.compile(
        rf"^(?:(?P<re>{signed})(?P<im>[+-]{unsigned})i|(?P<pure>{signed})i|(?P<real>{signed}))$"
    )


def _complex_groups(match: "re.Match") -> tuple:
    """(real token, imaginary token) of a matched complex entry; missing parts are '0'."""
    if match.group("pure") is not None:
        return "0", match.group("pure")
    if match.group("real") is not None:
        return match.group("real"), "0"
    return match.group("re"), match.group("im")


class ScalarBackend(ABC):
    """Abstract base class for scalar arithmetic strategies."""

    spec: ScalarSpec

    @property
    def exact(self) -> bool:
        return self.spec.is_exact

    @property
    @abstractmethod
    def dtype(self) -> Any:
        """numpy dtype of this backend's arrays."""

    @abstractmethod
    def scalar(self, re: Any, im: Any = 0) -> Any:
        """Build a scalar from integer/rational/float parts."""

    @abstractmethod
    def conj_scalar(self, x: Any) -> Any:
        pass

    @abstractmethod
    def is_zero(self, x: Any) -> bool:
        pass

    @abstractmethod
    def parts(self, x: Any) -> tuple:
        """Real and imaginary parts as (Fraction, Fraction) or (float, float)."""

    @abstractmethod
    def format_scalar(self, x: Any) -> str:
        pass

    @abstractmethod
    def parse_scalar(self, token: str) -> Any:
        pass

    @property
    def zero(self) -> Any:
        return self.scalar(0)

    @property
    def one(self) -> Any:
        return self.scalar(1)

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        return np.zeros((rows, cols), dtype=self.dtype)

    def eye(self, n: int) -> np.ndarray:
        return np.eye(n, dtype=self.dtype)

    def from_integers(self, re: np.ndarray, im: Optional[np.ndarray] = None) -> np.ndarray:
        """Matrix with the given integer real (and imaginary) parts."""
        out = self.zeros(*re.shape)
        for idx in np.ndindex(re.shape):
            out[idx] = self.scalar(int(re[idx]), 0 if im is None else int(im[idx]))
        return out

    def from_rows(self, rows: list) -> np.ndarray:
        """Matrix from nested Python lists of ints, Fractions, floats or complex."""
        n_rows = len(rows)
        n_cols = len(rows[0]) if n_rows else 0
        out = self.zeros(n_rows, n_cols)
        for i, row in enumerate(rows):
            if len(row) != n_cols:
                raise DomainError("Ragged rows")
            for j, value in enumerate(row):
                if isinstance(value, complex):
                    out[i, j] = self.scalar(value.real, value.imag)
                else:
                    out[i, j] = self.scalar(value)
        return out

    def conj(self, A: np.ndarray) -> np.ndarray:
        return _map(A, self.conj_scalar, self.dtype)

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.shape[1] != B.shape[0]:
            raise DomainError(f"Cannot multiply {A.shape} by {B.shape}")
        if A.shape[1] == 0:
            return self.zeros(A.shape[0], B.shape[1])
        return A @ B

    def is_zero_matrix(self, A: np.ndarray) -> bool:
        return all(self.is_zero(x) for x in A.flat)

    def max_abs(self, A: np.ndarray) -> float:
        """Largest entry modulus as a float (0 for empty matrices)."""
        if A.size == 0:
            return 0.0
        return float(max(math.hypot(*map(float, self.parts(x))) for x in A.flat))

    def convert(self, A: np.ndarray, source: "ScalarBackend") -> np.ndarray:
        """Re-express a matrix of another backend with this backend's scalars."""
        if source.spec == self.spec:
            return A.copy()
        if source.spec.is_complex and not self.spec.is_complex:
            raise DomainError("Cannot convert complex entries to a real backend")
        out = self.zeros(*A.shape)
        for idx in np.ndindex(A.shape):
            re, im = source.parts(A[idx])
            out[idx] = self.scalar(re, im)
        return out

    @abstractmethod
    def coerce(self, A: np.ndarray) -> np.ndarray:
        """Validate that A holds this backend's scalars; raise DomainError otherwise."""

    def check_form(self, form: FormKind) -> None:
        if form == FormKind.SESQUILINEAR and not self.spec.is_complex:
            raise InvalidFormError("Sesquilinear forms require a complex field")


def _map(A: np.ndarray, func: Callable, dtype: Any) -> np.ndarray:
    out = np.empty(A.shape, dtype=dtype)
    for idx in np.ndindex(A.shape):
        out[idx] = func(A[idx])
    return out


def _to_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, float)):
        return Fraction(value)
    # sympy rationals (PythonMPQ or gmpy mpq)
    return Fraction(int(value.numerator), int(value.denominator))


def _format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _parse_rational(token: str) -> Fraction:
    try:
        return Fraction(token)
    except ZeroDivisionError:
        raise MatrixFileError(f"Zero denominator in '{token}'")


def _join_parts(re: str, im: str) -> str:
    if im.startswith("-"):
        return f"{re}{im}i"
    return f"{re}+{im}i"


class ExactBackend(ScalarBackend):
    """Arbitrary-precision rationals; equality is exact."""

    @property
    def dtype(self) -> Any:
        return object

    def zeros(self, rows: int, cols: int) -> np.ndarray:
        out = np.empty((rows, cols), dtype=object)
        zero = self.zero
        for idx in np.ndindex(out.shape):
            out[idx] = zero
        return out

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros(n, n)
        for i in range(n):
            out[i, i] = self.one
        return out

    def is_zero(self, x: Any) -> bool:
        return not x


class RationalBackend(ExactBackend):
    """Exact real arithmetic with fractions.Fraction."""

    spec = ScalarSpec(field=ScalarField.REAL, arithmetic=Arithmetic.EXACT)
    _pattern = re.compile(rf"^[+-]?{_UNSIGNED_RATIONAL}$")

    def scalar(self, re: Any, im: Any = 0) -> Fraction:
        if _to_fraction(im) != 0:
            raise DomainError("Real backend cannot hold an imaginary part")
        return _to_fraction(re)

    def conj_scalar(self, x: Fraction) -> Fraction:
        return x

    def parts(self, x: Fraction) -> tuple:
        return x, Fraction(0)

    def format_scalar(self, x: Fraction) -> str:
        return _format_rational(x)

    def parse_scalar(self, token: str) -> Fraction:
        if not self._pattern.match(token):
            raise MatrixFileError(f"Invalid exact real entry '{token}'")
        return _parse_rational(token)

    def coerce(self, A: np.ndarray) -> np.ndarray:
        if A.dtype != object or not all(isinstance(x, Fraction) for x in A.flat):
            raise DomainError("Expected a matrix of Fractions for the exact real backend")
        return A


class GaussianRationalBackend(ExactBackend):
    """Exact complex arithmetic with sympy's Gaussian rationals QQ_I."""

    spec = ScalarSpec(field=ScalarField.COMPLEX, arithmetic=Arithmetic.EXACT)
    _pattern = _complex_pattern(_UNSIGNED_RATIONAL)

    def scalar(self, re: Any, im: Any = 0):
        re, im = _to_fraction(re), _to_fraction(im)
        return QQ_I(QQ(re.numerator, re.denominator), QQ(im.numerator, im.denominator))

    def conj_scalar(self, x):
        return QQ_I(x.x, -x.y)

    def parts(self, x) -> tuple:
        return _to_fraction(x.x), _to_fraction(x.y)

    def format_scalar(self, x) -> str:
        re, im = self.parts(x)
        return _join_parts(_format_rational(re), _format_rational(im))

    def parse_scalar(self, token: str):
        match = self._pattern.match(token)
        if not match:
            raise MatrixFileError(f"Invalid exact complex entry '{token}'")
        re_token, im_token = _complex_groups(match)
        return self.scalar(_parse_rational(re_token), _parse_rational(im_token))

    def is_zero(self, x) -> bool:
        return not x.x and not x.y

    def coerce(self, A: np.ndarray) -> np.ndarray:
        dtype = QQ_I.dtype
        if A.dtype != object or not all(isinstance(x, dtype) for x in A.flat):
            raise DomainError("Expected a matrix of Gaussian rationals for the exact complex backend")
        return A


class FloatBackend(ScalarBackend):
    """IEEE double precision; structural decisions go through rank thresholds."""

    def is_zero(self, x: Any) -> bool:
        return x == 0

    def matmul(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if A.shape[1] != B.shape[0]:
            raise DomainError(f"Cannot multiply {A.shape} by {B.shape}")
        return np.asarray(A @ B, dtype=self.dtype)

    def max_abs(self, A: np.ndarray) -> float:
        return float(np.max(np.abs(A))) if A.size else 0.0

    def conj(self, A: np.ndarray) -> np.ndarray:
        return np.conj(A)


class RealFloatBackend(FloatBackend):
    spec = ScalarSpec(field=ScalarField.REAL, arithmetic=Arithmetic.FLOAT)

    @property
    def dtype(self) -> Any:
        return np.float64

    def scalar(self, re: Any, im: Any = 0) -> float:
        if float(im) != 0.0:
            raise DomainError("Real backend cannot hold an imaginary part")
        return float(re)

    def conj_scalar(self, x: float) -> float:
        return x

    def parts(self, x: float) -> tuple:
        return float(x), 0.0

    def format_scalar(self, x: float) -> str:
        return format(float(x), ".17g")

    def parse_scalar(self, token: str) -> float:
        if not re.match(rf"^[+-]?{_UNSIGNED_FLOAT}$", token):
            raise MatrixFileError(f"Invalid real entry '{token}'")
        return float(token)

    def coerce(self, A: np.ndarray) -> np.ndarray:
        if A.dtype != np.float64:
            raise DomainError("Expected a float64 matrix for the float real backend")
        return A


class ComplexFloatBackend(FloatBackend):
    spec = ScalarSpec(field=ScalarField.COMPLEX, arithmetic=Arithmetic.FLOAT)
    _pattern = _complex_pattern(_UNSIGNED_FLOAT)

    @property
    def dtype(self) -> Any:
        return np.complex128

    def scalar(self, re: Any, im: Any = 0) -> complex:
        return complex(float(re), float(im))

    def conj_scalar(self, x: complex) -> complex:
        return complex(x).conjugate()

    def parts(self, x: complex) -> tuple:
        x = complex(x)
        return x.real, x.imag

    def format_scalar(self, x: complex) -> str:
        x = complex(x)
        return _join_parts(format(x.real, ".17g"), format(x.imag, ".17g"))

    def parse_scalar(self, token: str) -> complex:
        match = self._pattern.match(token)
        if not match:
            raise MatrixFileError(f"Invalid complex entry '{token}'")
        re_token, im_token = _complex_groups(match)
        return complex(float(re_token), float(im_token))

    def coerce(self, A: np.ndarray) -> np.ndarray:
        if A.dtype != np.complex128:
            raise DomainError("Expected a complex128 matrix for the float complex backend")
        return A


class BackendFactory:
    """Factory for creating scalar backends following the Factory Pattern."""

    _backends = {
        (ScalarField.REAL, Arithmetic.EXACT): RationalBackend,
        (ScalarField.COMPLEX, Arithmetic.EXACT): GaussianRationalBackend,
        (ScalarField.REAL, Arithmetic.FLOAT): RealFloatBackend,
        (ScalarField.COMPLEX, Arithmetic.FLOAT): ComplexFloatBackend,
    }

    @classmethod
    def create_backend(cls, spec: ScalarSpec) -> ScalarBackend:
        """Create the backend for the specified scalar spec."""
        key = (spec.field, spec.arithmetic)
        if key not in cls._backends:
            raise ValueError(f"Unsupported scalar spec: {spec}")
        return cls._backends[key]()

    @classmethod
    def get_available_specs(cls) -> list[ScalarSpec]:
        return [ScalarSpec(field=f, arithmetic=a) for f, a in cls._backends]
