"""
Test module for geometry_kernel.py
"""
import math
import unittest
from unittest.mock import patch

import numpy as np

from lcstat.geometry_kernel import (
    PairFrame,
    RodGeometry,
    excluded_volume,
    fourth_moment_diag,
    fourth_moment_frame_tensor,
    fourth_moment_regions,
    fourth_moment_tensor,
    kernel_B,
    kernel_R,
    legendre_fourth_moment,
    moment_mc,
    rods_overlap,
    second_moment_diag,
    second_moment_regions,
    second_moment_tensor,
    segment_distance_sq,
)
from lcstat.lcstat_exceptions import LcstatDomainException, LcstatInputException

FOURTH_INDICES = {
    "x4": (0, 0, 0, 0),
    "y4": (1, 1, 1, 1),
    "z4": (2, 2, 2, 2),
    "x2y2": (0, 0, 1, 1),
    "y2z2": (1, 1, 2, 2),
    "x2z2": (0, 0, 2, 2),
}


class RodGeometryTests(unittest.TestCase):
    def test_eta_and_validation(self):
        """
        Asserts that eta = D/L and that non-positive sizes or D > L raise input errors.
        """
        self.assertAlmostEqual(0.25, RodGeometry(L=2.0, D=0.5).eta)
        self.assertEqual(RodGeometry(1.0, 0.3), RodGeometry.from_eta(0.3))
        for L, D in ((1.0, 0.0), (-1.0, 0.1), (1.0, 1.5)):
            with self.assertRaises(LcstatInputException):
                RodGeometry(L=L, D=D)


class PairFrameTests(unittest.TestCase):
    def test_frame_is_orthonormal(self):
        """
        Asserts that the pair frame is orthonormal, n1 bisects m and m', and gamma is
        the angle between them.
        """
        m = np.array([0.0, 0.6, 0.8])
        m2 = np.array([1.0, 0.0, 0.0])
        frame = PairFrame.from_vectors(m, m2)
        np.testing.assert_allclose(np.eye(3), frame.basis @ frame.basis.T, atol=1e-14)
        self.assertAlmostEqual(math.pi / 2, frame.gamma)
        self.assertAlmostEqual(float(np.dot(frame.n1, m)), float(np.dot(frame.n1, m2)))

    def test_from_angle_is_the_lab_frame(self):
        """
        Asserts that the frame built from an angle has n1, n2, n3 along x, y, z, and
        that to_lab leaves its tensors unchanged.
        """
        frame = PairFrame.from_angle(1.0)
        np.testing.assert_allclose(np.eye(3), frame.basis, atol=1e-14)
        tensor = np.diag([1.0, 2.0, 3.0])
        np.testing.assert_allclose(tensor, frame.to_lab(tensor), atol=1e-14)

    def test_parallel_rods_have_no_frame(self):
        """
        Asserts that a parallel pair raises a domain error.
        """
        with self.assertRaises(LcstatDomainException):
            PairFrame.from_vectors([0, 0, 1], [0, 0, 1])


class OverlapTests(unittest.TestCase):
    def setUp(self):
        self.geom = RodGeometry(L=1.0, D=0.1)

    def test_crossed_rods(self):
        """
        Asserts that crossed rods overlap exactly when their axes come closer than D.
        """
        m, m2 = [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]
        self.assertTrue(rods_overlap([0.0, 0.0, 0.05], m, m2, self.geom))
        self.assertFalse(rods_overlap([0.0, 0.0, 0.15], m, m2, self.geom))
        self.assertTrue(rods_overlap([0.55, 0.0, 0.0], m, m2, self.geom))
        self.assertFalse(rods_overlap([0.7, 0.0, 0.0], m, m2, self.geom))

    def test_parallel_segments(self):
        """
        Asserts that the distance between side-by-side parallel segments is their
        lateral separation, and end-to-end segments are measured between their tips.
        """
        m = np.array([0.0, 0.0, 1.0])
        distance_sq = segment_distance_sq(
            np.array([[0.03, 0.0, 0.2], [0.0, 0.0, 1.3]]), m, m, 0.5
        )
        np.testing.assert_allclose([0.0009, 0.09], distance_sq, atol=1e-12)


class MomentClosedFormTests(unittest.TestCase):
    def test_second_moment_matches_b_coefficients(self):
        """
        Asserts that the B1, B2, B3 reconstruction of the second moment equals the
        region sums in the pair frame to 1e-9 relative.
        """
        for eta in (0.1, 0.5, 1.0):
            geom = RodGeometry.from_eta(eta)
            for gamma in (math.pi / 6, math.pi / 3, math.pi / 2, 2.5):
                frame = PairFrame.from_angle(gamma)
                tensor = second_moment_tensor(frame.m, frame.m2, geom)
                expected = np.diag(second_moment_diag(gamma, geom))
                np.testing.assert_allclose(
                    expected, tensor, rtol=1e-9, atol=1e-12 * np.max(np.abs(expected))
                )

    def test_fourth_moment_matches_r_coefficients(self):
        """
        Asserts that the R1..R6 reconstruction of the fourth moment equals the region
        sums in the pair frame to 1e-9 relative.
        """
        for eta in (0.1, 0.5, 1.0):
            geom = RodGeometry.from_eta(eta)
            for gamma in (math.pi / 6, math.pi / 3, math.pi / 2, 2.5):
                frame = PairFrame.from_angle(gamma)
                tensor = fourth_moment_tensor(frame.m, frame.m2, geom)
                expected = fourth_moment_frame_tensor(fourth_moment_diag(gamma, geom))
                np.testing.assert_allclose(
                    expected, tensor, rtol=1e-9, atol=1e-12 * np.max(np.abs(expected))
                )

    def test_region_totals(self):
        """
        Asserts that the region tables hold four parts that add up to the totals.
        """
        geom = RodGeometry.from_eta(0.3)
        regions = second_moment_regions(1.0, geom)
        self.assertEqual(4, len(regions))
        np.testing.assert_allclose(
            sum(regions.values()), second_moment_diag(1.0, geom), rtol=1e-15
        )
        self.assertEqual(6, len(fourth_moment_diag(1.0, geom)))
        self.assertEqual(4, len(fourth_moment_regions(1.0, geom)))

    def test_parallel_limit_of_excluded_volume(self):
        """
        Asserts that as gamma -> 0 the excluded volume tends to that of a
        spherocylinder of length 2L and diameter 2D.
        """
        geom = RodGeometry(L=1.0, D=0.2)
        limit = math.pi * (2 * geom.D) ** 2 / 4 * (2 * geom.L) + 4 / 3 * math.pi * (
            geom.D**3
        )
        self.assertAlmostEqual(limit, excluded_volume(1e-9, geom), places=7)

    def test_kernel_guards(self):
        """
        Asserts that nearly parallel rods raise a domain error and cosines outside
        [-1, 1] raise an input error.
        """
        geom = RodGeometry.from_eta(0.1)
        for x in (1.0, -1.0, 1.0 - 1e-8):
            with self.assertRaises(LcstatDomainException):
                kernel_B(x, geom)
            with self.assertRaises(LcstatDomainException):
                kernel_R(x, geom)
        with self.assertRaises(LcstatInputException):
            kernel_B(1.5, geom)

    def test_legendre_fourth_moment_is_symmetric(self):
        """
        Asserts that the truncated Legendre fourth moment is fully symmetric and
        invariant under exchanging the two rods.
        """
        geom = RodGeometry.from_eta(0.1)
        m = np.array([0.0, 0.6, 0.8])
        m2 = np.array([0.6, 0.0, 0.8])
        tensor = legendre_fourth_moment(m, m2, geom)
        np.testing.assert_allclose(tensor, np.transpose(tensor, (1, 3, 0, 2)))
        np.testing.assert_allclose(tensor, legendre_fourth_moment(m2, m, geom))


class MonteCarloTests(unittest.TestCase):
    def test_excluded_volume_oracle(self):
        """
        Asserts that the analytic excluded volume agrees with Monte Carlo within 4
        standard errors for 20 random (gamma, eta) at 1e6 samples each.
        """
        generator = np.random.default_rng(2024)
        for index in range(20):
            gamma = float(generator.uniform(0.2, math.pi - 0.2))
            eta = float(generator.uniform(0.05, 1.0))
            geom = RodGeometry.from_eta(eta)
            frame = PairFrame.from_angle(gamma)
            estimate = moment_mc(frame.m, frame.m2, geom, 0, 1_000_000, seed=index)
            z = estimate.z_scores(excluded_volume(gamma, geom))
            self.assertLess(abs(float(z)), 4.0, f"gamma={gamma}, eta={eta}")

    def test_excluded_volume_headline(self):
        """
        Asserts that the analytic excluded volume at gamma = pi/2, eta = 0.1 agrees
        with Monte Carlo within 3 standard errors.
        """
        geom = RodGeometry.from_eta(0.1)
        frame = PairFrame.from_angle(math.pi / 2)
        estimate = moment_mc(frame.m, frame.m2, geom, 0, 1_000_000, seed=7)
        z = estimate.z_scores(excluded_volume(math.pi / 2, geom))
        self.assertLess(abs(float(z)), 3.0)

    def test_second_and_fourth_moments(self):
        """
        Asserts that every frame-diagonal component of the second and fourth moments
        agrees with Monte Carlo within 4 standard errors.
        """
        for gamma, eta in ((math.pi / 3, 0.5), (math.pi / 2, 0.1)):
            geom = RodGeometry.from_eta(eta)
            frame = PairFrame.from_angle(gamma)
            second = moment_mc(frame.m, frame.m2, geom, 2, 1_000_000, seed=1)
            z2 = second.z_scores(np.diag(second_moment_diag(gamma, geom)))
            self.assertLess(float(np.max(np.abs(np.diag(z2)))), 4.0)

            fourth = moment_mc(frame.m, frame.m2, geom, 4, 1_000_000, seed=2)
            z4 = fourth.z_scores(
                fourth_moment_frame_tensor(fourth_moment_diag(gamma, geom))
            )
            for key, index in FOURTH_INDICES.items():
                self.assertLess(abs(float(z4[index])), 4.0, key)

    def test_odd_moment_vanishes(self):
        """
        Asserts that the first moment is zero within 4 standard errors.
        """
        geom = RodGeometry.from_eta(0.3)
        frame = PairFrame.from_angle(1.0)
        estimate = moment_mc(frame.m, frame.m2, geom, 1, 500_000, seed=5)
        self.assertLess(float(np.max(np.abs(estimate.z_scores(np.zeros(3))))), 4.0)

    @patch("lcstat.geometry_kernel.MC_CHUNK_SIZE", 1000)
    def test_deterministic_across_worker_counts(self):
        """
        Asserts that the same seed gives identical estimates with one or several
        workers, and that a different seed does not.
        """
        geom = RodGeometry.from_eta(0.2)
        frame = PairFrame.from_angle(1.2)
        single = moment_mc(frame.m, frame.m2, geom, 2, 5500, seed=3, workers=1)
        several = moment_mc(frame.m, frame.m2, geom, 2, 5500, seed=3, workers=4)
        np.testing.assert_array_equal(single.value, several.value)
        np.testing.assert_array_equal(single.stderr, several.stderr)
        other = moment_mc(frame.m, frame.m2, geom, 2, 5500, seed=4, workers=1)
        self.assertFalse(np.array_equal(single.value, other.value))

    def test_invalid_requests(self):
        """
        Asserts that unsupported orders and sample counts raise input errors.
        """
        geom = RodGeometry.from_eta(0.2)
        for order, n_samples in ((5, 10), (2, 0), (2, 1.5)):
            with self.assertRaises(LcstatInputException):
                moment_mc([1, 0, 0], [0, 1, 0], geom, order, n_samples, seed=0)


if __name__ == "__main__":
    unittest.main()
