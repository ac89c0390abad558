"""
Test module for validation.py
"""
import unittest
from fractions import Fraction
from unittest.mock import patch

import numpy as np

from lcstat.lcstat_exceptions import (
    LcstatConfigException,
    LcstatDomainException,
    LcstatInputException,
    LcstatNumericException,
    LcstatOptimizationException,
    LcstatPhaseException,
)
from lcstat.validation import (
    handle_config_error,
    handle_domain_error,
    handle_input_error,
    handle_numeric_error,
    handle_optimization_error,
    handle_phase_error,
    validate_eta,
    validate_in_range,
    validate_positive,
    validate_unit_vector,
)


class HandlerTests(unittest.TestCase):
    @patch("lcstat.validation.get_logger")
    def test_handlers_log_and_raise(self, logger_mock):
        """
        Asserts that every handler logs the message as an error and raises its
        exception type.
        """
        handlers = (
            (handle_input_error, LcstatInputException),
            (handle_domain_error, LcstatDomainException),
            (handle_config_error, LcstatConfigException),
            (handle_phase_error, LcstatPhaseException),
            (handle_optimization_error, LcstatOptimizationException),
        )
        for handler, exception in handlers:
            with self.assertRaises(exception) as context:
                handler("bad value")
            self.assertEqual("bad value", str(context.exception))
        self.assertEqual(len(handlers), logger_mock.return_value.error.call_count)

    @patch("lcstat.validation.get_logger")
    def test_numeric_error(self, logger_mock):
        """
        Asserts that a numeric failure raises with the estimate attached, or logs a
        warning and returns the estimate when raising is disabled.
        """
        with self.assertRaises(LcstatNumericException) as context:
            handle_numeric_error("no convergence", 0.5, should_raise_exception=True)
        self.assertEqual(0.5, context.exception.estimate)

        value = handle_numeric_error(
            "no convergence", 0.5, should_raise_exception=False
        )
        self.assertEqual(0.5, value)
        logger_mock.return_value.warning.assert_called_once()

    @patch("lcstat.validation.RAISE_NUMERIC_EXCEPTIONS", False)
    def test_numeric_error_default_from_env(self):
        """
        Asserts that the module setting decides when no explicit choice is passed.
        """
        self.assertEqual(3, handle_numeric_error("slow", 3))


class ValidatorTests(unittest.TestCase):
    def test_unit_vector(self):
        """
        Asserts that unit 3-vectors pass, exact Fractions are checked exactly, and
        wrong shapes or norms raise input errors.
        """
        vector = validate_unit_vector([0, 0.6, 0.8])
        np.testing.assert_array_equal([0.0, 0.6, 0.8], vector)
        exact = [Fraction(3, 5), Fraction(4, 5), Fraction(0)]
        self.assertEqual(exact, list(validate_unit_vector(exact, exact=True)))
        for vector in ([1.0, 0.0], [1.0, 1.0, 0.0], [float("nan"), 0.0, 0.0]):
            with self.assertRaises(LcstatInputException):
                validate_unit_vector(vector)
        with self.assertRaises(LcstatInputException):
            validate_unit_vector([Fraction(1, 2), Fraction(1, 2), 0], exact=True)

    def test_scalars(self):
        """
        Asserts eta in (0, 1], positive values and closed or open ranges.
        """
        self.assertEqual(1.0, validate_eta(1))
        for eta in (0.0, 1.01, "0.5", True):
            with self.assertRaises(LcstatInputException):
                validate_eta(eta)
        self.assertEqual(2.0, validate_positive(2, "x"))
        for value in (0.0, -1.0, float("inf"), None):
            with self.assertRaises(LcstatInputException):
                validate_positive(value, "x")
        self.assertEqual(1.0, validate_in_range(1.0, 0.0, 1.0, "x"))
        with self.assertRaises(LcstatInputException):
            validate_in_range(1.0, 0.0, 1.0, "x", closed=False)


if __name__ == "__main__":
    unittest.main()
