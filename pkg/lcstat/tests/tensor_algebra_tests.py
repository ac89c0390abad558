"""
Test module for tensor_algebra.py
"""
import math
import unittest
from fractions import Fraction
from unittest.mock import patch

import numpy as np

from lcstat.lcstat_exceptions import LcstatInputException, LcstatNumericException
from lcstat.tensor_algebra import (
    LEADING_LEGENDRE_COEFFICIENTS,
    LEGENDRE_TABLE_FUNCTIONS,
    TracelessTensor,
    alpha_coefficients,
    canonical_indices,
    contract,
    delta_sym,
    expansion_coefficients,
    gauss_legendre_integrate,
    index_multiplicity,
    legendre_P,
    legendre_coefficient_table,
    legendre_power_coefficients,
    legendre_project,
    sigma_term_count,
    sigma_terms,
    sigma_tensor,
    xi_tensor,
)

EXACT_UNIT_VECTOR = (Fraction(2, 3), Fraction(1, 3), Fraction(2, 3))


def _random_unit_vectors(generator, count):
    vectors = generator.standard_normal((count, 3))
    return vectors / np.linalg.norm(vectors, axis=1)[:, None]


class TracelessTensorTests(unittest.TestCase):
    def test_canonical_storage_sizes(self):
        """
        Asserts that symmetric tensors of order 2 and 4 are stored with 6 and 15
        independent components, and that multiplicities add up to 3^k.
        """
        self.assertEqual(6, len(canonical_indices(2)))
        self.assertEqual(15, len(canonical_indices(4)))
        for order in (2, 4):
            self.assertEqual(
                3**order, sum(index_multiplicity(i) for i in canonical_indices(order))
            )

    def test_full_and_from_full_are_inverse(self):
        """
        Asserts that expanding canonical storage to a full array and reading it back
        gives the same components, and the full array is symmetric.
        """
        tensor = xi_tensor(4, np.array([0.6, 0.0, 0.8]))
        full = tensor.full()
        np.testing.assert_allclose(full, np.transpose(full, (2, 0, 3, 1)))
        np.testing.assert_allclose(
            tensor.components, TracelessTensor.from_full(full).components
        )

    def test_double_dot_matches_full_contraction(self):
        """
        Asserts that the contraction computed on canonical storage equals the sum over
        all entries of the full arrays.
        """
        a = xi_tensor(4, np.array([0.0, 0.6, 0.8]))
        b = xi_tensor(4, np.array([1.0, 0.0, 0.0]))
        self.assertAlmostEqual(np.sum(a.full() * b.full()), a.double_dot(b), places=14)

    def test_double_dot_rejects_mixed_orders(self):
        """
        Asserts that contracting tensors of different orders raises an input error.
        """
        with self.assertRaises(LcstatInputException):
            xi_tensor(2, [0, 0, 1]).double_dot(xi_tensor(4, [0, 0, 1]))


class XiTensorTests(unittest.TestCase):
    def test_second_order_along_z(self):
        """
        Asserts that Xi_2 of the z axis is diag(-1/3, -1/3, 2/3).
        """
        np.testing.assert_allclose(
            np.diag([-1 / 3, -1 / 3, 2 / 3]), xi_tensor(2, [0, 0, 1]).full(), atol=1e-15
        )

    def test_fourth_order_zzzz_component(self):
        """
        Asserts that the (3,3,3,3) component of Xi_4 along z is 1 - 6/7 + 3/35 = 8/35,
        exactly in rational mode.
        """
        exact = xi_tensor(4, (Fraction(0), Fraction(0), Fraction(1)), exact=True)
        self.assertEqual(Fraction(8, 35), exact.full()[2, 2, 2, 2])
        self.assertAlmostEqual(8 / 35, xi_tensor(4, [0, 0, 1]).full()[2, 2, 2, 2])

    def test_every_pair_contraction_vanishes(self):
        """
        Asserts that Xi_k is traceless over every index pair for k = 2..4 on random unit
        vectors.
        """
        generator = np.random.default_rng(3)
        for m in _random_unit_vectors(generator, 20):
            for k in (2, 3, 4):
                self.assertLess(xi_tensor(k, m).max_pair_trace(), 1e-12)

    def test_traceless_exactly_in_rational_mode(self):
        """
        Asserts that the pair contractions of Xi_4 are exactly zero for a rational unit
        vector.
        """
        full = xi_tensor(4, EXACT_UNIT_VECTOR, exact=True).full()
        for i, j in ((0, 1), (0, 3), (2, 3)):
            contracted = contract(full, i, j)
            self.assertTrue(all(value == 0 for value in contracted.flat))

    def test_addition_theorem(self):
        """
        Asserts that P_n(m.m') = b_n Xi_n(m) : Xi_n(m') for n = 2, 4 on 100 random
        pairs of unit vectors.
        """
        generator = np.random.default_rng(11)
        first = _random_unit_vectors(generator, 100)
        second = _random_unit_vectors(generator, 100)
        for m, m2 in zip(first, second):
            x = float(np.clip(np.dot(m, m2), -1.0, 1.0))
            for n in (2, 4):
                b_n = float(LEADING_LEGENDRE_COEFFICIENTS[n])
                value = b_n * xi_tensor(n, m).double_dot(xi_tensor(n, m2))
                self.assertAlmostEqual(legendre_P(n, x), value, delta=1e-10)

    def test_non_unit_vector_is_rejected(self):
        """
        Asserts that a vector that is not of unit length raises an input error.
        """
        with self.assertRaises(LcstatInputException):
            xi_tensor(2, [1.0, 1.0, 0.0])
        with self.assertRaises(LcstatInputException):
            xi_tensor(5, [0.0, 0.0, 1.0])


class SigmaTensorTests(unittest.TestCase):
    def test_term_counts(self):
        """
        Asserts that term counts follow (k+2l)! / (k! l! 2^l): 3 for one m and one
        delta, 6 for two m and one delta, 3 for two deltas.
        """
        self.assertEqual(3, len(sigma_terms(1, 1)))
        self.assertEqual(6, len(sigma_terms(2, 1)))
        self.assertEqual(3, len(sigma_terms(0, 2)))
        for k, l in ((1, 0), (2, 0), (3, 0), (4, 0), (1, 1), (2, 1), (0, 1), (0, 2)):
            self.assertEqual(sigma_term_count(k, l), len(sigma_terms(k, l)))

    def test_unsupported_order_is_rejected(self):
        """
        Asserts that sigma tensors beyond order 4 raise an input error.
        """
        with self.assertRaises(LcstatInputException):
            sigma_terms(3, 1)

    def test_contraction_identity_exact(self):
        """
        Asserts that contracting sigma(k m, l deltas) gives (2k+2l+1) sigma(k, l-1) +
        sigma(k-2, l) exactly for every supported (k, l) of order at least 2.
        """
        m = EXACT_UNIT_VECTOR
        for k, l in ((2, 0), (3, 0), (4, 0), (0, 1), (1, 1), (2, 1), (0, 2)):
            contracted = np.asarray(contract(sigma_tensor(m, k, l, exact=True), 0, 1))
            expected = np.zeros(contracted.shape, dtype=object)
            expected[...] = Fraction(0)
            if l >= 1:
                expected = expected + (2 * k + 2 * l + 1) * sigma_tensor(
                    m, k, l - 1, exact=True
                )
            if k >= 2:
                expected = expected + sigma_tensor(m, k - 2, l, exact=True)
            self.assertTrue(
                all(a == b for a, b in zip(contracted.flat, np.asarray(expected).flat)),
                f"identity fails for k={k}, l={l}",
            )

    def test_delta_sym_matches_sigma(self):
        """
        Asserts that the six-term delta symmetrization of mm equals sigma(m, 2, 1).
        """
        m = np.array([0.36, 0.48, 0.8])
        np.testing.assert_allclose(
            sigma_tensor(m, 2, 1), delta_sym(np.outer(m, m)), atol=1e-15
        )


class LegendreTests(unittest.TestCase):
    def test_values(self):
        """
        Asserts that P_2(1) = 1, P_2(0) = -1/2 and P_n(1) = 1 up to degree 6.
        """
        self.assertEqual(1.0, legendre_P(2, 1.0))
        self.assertEqual(-0.5, legendre_P(2, 0.0))
        for n in range(7):
            self.assertAlmostEqual(1.0, legendre_P(n, 1.0), places=14)

    def test_fourth_degree_closed_form(self):
        """
        Asserts that P_4(0.3) from the power-series coefficients equals
        (35x^4 - 30x^2 + 3)/8.
        """
        x = 0.3
        self.assertAlmostEqual((35 * x**4 - 30 * x**2 + 3) / 8, legendre_P(4, x))
        self.assertEqual(
            [Fraction(3, 8), 0, Fraction(-30, 8), 0, Fraction(35, 8)],
            legendre_power_coefficients(4),
        )

    def test_argument_out_of_range(self):
        """
        Asserts that arguments outside [-1, 1] raise an input error.
        """
        with self.assertRaises(LcstatInputException):
            legendre_P(2, 1.5)

    def test_projection_reproduces_coefficient_table(self):
        """
        Asserts that projecting sqrt(1-x^2), 1/sqrt(1-x^2) and arcsin(x)/x onto
        Legendre polynomials reproduces every tabulated coefficient to 1e-8.
        """
        for (name, n), value in legendre_coefficient_table().items():
            projected = legendre_project(LEGENDRE_TABLE_FUNCTIONS[name], n)
            self.assertAlmostEqual(value, projected, delta=1e-8, msg=f"{name}, n={n}")

    def test_leading_coefficients(self):
        """
        Asserts that b_2 = 3/2 and b_4 = 35/8 exactly.
        """
        self.assertEqual(Fraction(3, 2), LEADING_LEGENDRE_COEFFICIENTS[2])
        self.assertEqual(Fraction(35, 8), LEADING_LEGENDRE_COEFFICIENTS[4])

    def test_quadrature_non_convergence(self):
        """
        Asserts that an integrand the node-doubling cannot resolve raises a numeric
        error carrying the last estimate, and returns it when raising is disabled.
        """

        def integrand(x):
            return np.sign(x - 0.1234567)

        with self.assertRaises(LcstatNumericException) as err:
            gauss_legendre_integrate(integrand, -1.0, 1.0, max_nodes=64)
        self.assertIsNotNone(err.exception.estimate)

        with patch("lcstat.validation.RAISE_NUMERIC_EXCEPTIONS", False):
            estimate = gauss_legendre_integrate(integrand, -1.0, 1.0, max_nodes=64)
        self.assertAlmostEqual(-0.2469134, estimate, delta=0.2)


class ExpansionCoefficientTests(unittest.TestCase):
    def test_constants(self):
        """
        Asserts that mu22 = -5/2304 at any eta, alpha21 = 1/24 at eta = 0 and
        alpha12 = -5/192 at eta = 0.5.
        """
        for eta in (0.1, 0.5, 1.0):
            self.assertAlmostEqual(-5 / 2304, expansion_coefficients(eta).mu22)
        self.assertAlmostEqual(1 / 24, alpha_coefficients(0.0)[(2, 1)])
        self.assertAlmostEqual(-5 / 192, expansion_coefficients(0.5).alpha[(1, 2)])

    def test_bulk_alpha_matches_projection(self):
        """
        Asserts that alpha12 is (2 eta^2 / 3) times the P2 coefficient of
        sqrt(1 - x^2) over pi, recovered by quadrature.
        """
        eta = 0.5
        projected = legendre_project(LEGENDRE_TABLE_FUNCTIONS["sqrt_one_minus_x2"], 2)
        self.assertAlmostEqual(
            2 * eta**2 / 3 * projected / math.pi,
            expansion_coefficients(eta).alpha[(1, 2)],
            delta=1e-9,
        )

    def test_entries_are_finite(self):
        """
        Asserts that all coefficients are finite and b_n carries the leading Legendre
        coefficients.
        """
        coefficients = expansion_coefficients(0.3)
        self.assertEqual(7, len(coefficients.alpha))
        for value in list(coefficients.alpha.values()) + [
            coefficients.mu11,
            coefficients.mu21,
        ]:
            self.assertTrue(math.isfinite(value))
        self.assertEqual(1.5, coefficients.b[2])

    def test_eta_out_of_range(self):
        """
        Asserts that eta outside (0, 1] raises an input error.
        """
        for eta in (0.0, 1.5, -0.1):
            with self.assertRaises(LcstatInputException):
                expansion_coefficients(eta)


if __name__ == "__main__":
    unittest.main()
