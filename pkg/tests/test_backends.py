"""
Unit tests for the scalar backends.
"""
import unittest
from fractions import Fraction

import numpy as np

from src.models.config import Arithmetic, FormKind, ScalarField, ScalarSpec
from src.models.errors import DomainError, InvalidFormError, MatrixFileError
from src.numkit.backends import (
    BackendFactory, ComplexFloatBackend, GaussianRationalBackend, RationalBackend,
    RealFloatBackend,
)


class TestBackendFactory(unittest.TestCase):
    """Test cases for backend selection."""

    def test_create_backend_for_every_spec(self):
        """Test every available spec builds a backend."""
        expected = {
            (ScalarField.REAL, Arithmetic.EXACT): RationalBackend,
            (ScalarField.COMPLEX, Arithmetic.EXACT): GaussianRationalBackend,
            (ScalarField.REAL, Arithmetic.FLOAT): RealFloatBackend,
            (ScalarField.COMPLEX, Arithmetic.FLOAT): ComplexFloatBackend,
        }
        for (field, arithmetic), cls in expected.items():
            backend = BackendFactory.create_backend(ScalarSpec(field=field, arithmetic=arithmetic))
            self.assertIsInstance(backend, cls)
            self.assertEqual(backend.spec.field, field)

    def test_available_specs(self):
        """Test the list of available backend specs."""
        specs = BackendFactory.get_available_specs()
        self.assertEqual(len(specs), 4)
        self.assertEqual({spec.label() for spec in specs},
                         {"real exact", "complex exact", "real float", "complex float"})


class TestRationalBackend(unittest.TestCase):
    """Test cases for exact real scalars."""

    def setUp(self):
        self.backend = RationalBackend()

    def test_parse_and_format(self):
        """Test parsing and formatting rational entries."""
        self.assertEqual(self.backend.parse_scalar("3/4"), Fraction(3, 4))
        self.assertEqual(self.backend.parse_scalar("-2"), Fraction(-2))
        self.assertEqual(self.backend.format_scalar(Fraction(-6, 4)), "-3/2")
        self.assertEqual(self.backend.format_scalar(Fraction(5)), "5")

    def test_rejects_malformed_entries(self):
        """Test malformed entries are rejected."""
        for token in ("1.5", "1/0", "abc", "2i"):
            with self.assertRaises(MatrixFileError):
                self.backend.parse_scalar(token)

    def test_imaginary_part_rejected(self):
        """Test an imaginary part is rejected on the rational field."""
        with self.assertRaises(DomainError):
            self.backend.scalar(1, 1)

    def test_zeros_and_eye_hold_fractions(self):
        """Test zeros and eye hold Fraction entries."""
        I = self.backend.eye(3)
        self.assertTrue(all(isinstance(x, Fraction) for x in I.flat))
        self.assertEqual(I[1, 1], 1)
        self.assertTrue(self.backend.is_zero_matrix(self.backend.zeros(2, 3)))

    def test_matmul_with_empty_inner_dimension(self):
        """Test matmul with an empty inner dimension."""
        product = self.backend.matmul(self.backend.zeros(2, 0), self.backend.zeros(0, 3))
        self.assertEqual(product.shape, (2, 3))
        self.assertTrue(self.backend.is_zero_matrix(product))

    def test_coerce_rejects_float_arrays(self):
        """Test coercion rejects float arrays."""
        with self.assertRaises(DomainError):
            self.backend.coerce(np.eye(2))

    def test_sesquilinear_requires_complex_field(self):
        """Test sesquilinear forms require a complex field."""
        with self.assertRaises(InvalidFormError):
            self.backend.check_form(FormKind.SESQUILINEAR)
        self.backend.check_form(FormKind.BILINEAR)


class TestGaussianRationalBackend(unittest.TestCase):
    """Test cases for exact complex scalars."""

    def setUp(self):
        self.backend = GaussianRationalBackend()

    def test_parse_forms(self):
        """Test parsing Gaussian rational entries."""
        cases = {
            "3+4i": (Fraction(3), Fraction(4)),
            "1/2-3/4i": (Fraction(1, 2), Fraction(-3, 4)),
            "-2i": (Fraction(0), Fraction(-2)),
            "7": (Fraction(7), Fraction(0)),
        }
        for token, parts in cases.items():
            self.assertEqual(self.backend.parts(self.backend.parse_scalar(token)), parts)

    def test_missing_imaginary_unit_rejected(self):
        """Test a missing imaginary unit is rejected."""
        with self.assertRaises(MatrixFileError):
            self.backend.parse_scalar("3+4")

    def test_format(self):
        """Test formatting Gaussian rational entries."""
        self.assertEqual(self.backend.format_scalar(self.backend.scalar(1, -1)), "1-1i")
        self.assertEqual(self.backend.format_scalar(self.backend.scalar(Fraction(1, 3), 2)), "1/3+2i")

    def test_conjugation(self):
        """Test conjugation of Gaussian rationals."""
        x = self.backend.scalar(2, 5)
        self.assertEqual(self.backend.parts(self.backend.conj_scalar(x)), (2, -5))

    def test_exact_arithmetic(self):
        """Test exact complex arithmetic."""
        i = self.backend.scalar(0, 1)
        self.assertEqual(self.backend.parts(i * i), (-1, 0))
        self.assertTrue(self.backend.is_zero(i - i))
        self.assertFalse(self.backend.is_zero(i))

    def test_convert_from_rational(self):
        """Test conversion from a rational backend."""
        A = RationalBackend().from_rows([[1, Fraction(1, 2)], [0, -3]])
        B = self.backend.convert(A, RationalBackend())
        self.assertEqual(self.backend.parts(B[0, 1]), (Fraction(1, 2), 0))

    def test_convert_to_real_rejected(self):
        """Test conversion of complex entries to a real backend is rejected."""
        with self.assertRaises(DomainError):
            RationalBackend().convert(self.backend.eye(2), self.backend)


class TestFloatBackends(unittest.TestCase):
    """Test cases for double precision scalars."""

    def test_real_format_round_trips_bits(self):
        """Test real float formatting keeps every bit."""
        backend = RealFloatBackend()
        for value in (0.1, 1 / 3, -2.5e-300, 12345.678901234567):
            self.assertEqual(backend.parse_scalar(backend.format_scalar(value)), value)

    def test_complex_format_and_parse(self):
        """Test complex float formatting and parsing."""
        backend = ComplexFloatBackend()
        self.assertEqual(backend.format_scalar(1 + 1j), "1+1i")
        self.assertEqual(backend.format_scalar(0.5 - 2j), "0.5-2i")
        self.assertEqual(backend.parse_scalar("1e-3-2.5i"), complex(1e-3, -2.5))
        self.assertEqual(backend.parse_scalar("-3i"), complex(0, -3))

    def test_convert_from_exact(self):
        """Test conversion from an exact backend."""
        exact = GaussianRationalBackend()
        A = exact.from_integers(np.array([[1, 2]]), np.array([[0, -1]]))
        np.testing.assert_array_equal(ComplexFloatBackend().convert(A, exact), np.array([[1 + 0j, 2 - 1j]]))

    def test_coerce_rejects_exact_arrays(self):
        """Test coercion rejects exact arrays."""
        with self.assertRaises(DomainError):
            RealFloatBackend().coerce(RationalBackend().eye(2))


if __name__ == '__main__':
    unittest.main()
