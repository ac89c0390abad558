"""
Test module for nematic_model.py
"""
import math
import unittest
from fractions import Fraction

import numpy as np
from scipy.spatial.transform import Rotation

from lcstat.bingham import QTensor, s2_from_r
from lcstat.geometry_kernel import RodGeometry
from lcstat.lcstat_exceptions import LcstatInputException
from lcstat.nematic_model import (
    FOURTH_ORDER_WEIGHTS,
    SELF_CONSISTENCY_SLOPE,
    SPINODAL_ALPHA,
    bulk_free_energy,
    elastic_J,
    elastic_energy_density,
    equilibrium_branches,
    equilibrium_sweep,
    fourth_order_assembly_raw,
    fourth_order_coefficients,
    maier_saupe_energy,
    reduced_energy,
    transition_alpha,
)
from lcstat.tensor_algebra import expansion_coefficients

LN_4PI = math.log(4 * math.pi)
Z_AXIS = np.array([0.0, 0.0, 1.0])


class BulkFreeEnergyTests(unittest.TestCase):
    def setUp(self):
        self.geom = RodGeometry.from_eta(0.1)

    def test_isotropic_value(self):
        """
        Asserts that c = 1, Q = 0 gives -ln 4 pi.
        """
        value = bulk_free_energy(1.0, QTensor.zero(), self.geom)
        self.assertAlmostEqual(-LN_4PI, value)

    def test_rotation_invariance(self):
        """
        Asserts that rotating a biaxial Q leaves the bulk energy unchanged.
        """
        Q = QTensor(np.diag([0.25, -0.05, -0.2]))
        rotation = Rotation.from_euler("xyz", [0.4, -1.2, 2.0]).as_matrix()
        self.assertAlmostEqual(
            bulk_free_energy(2.0, Q, self.geom),
            bulk_free_energy(2.0, Q.rotated(rotation), self.geom),
            delta=1e-9,
        )

    def test_uniaxial_reduction(self):
        """
        Asserts that the tensor bulk energy of a uniaxial Q equals the one-dimensional
        form with alpha = pi L^2 D c.
        """
        for S2 in (-0.2, 0.3, 0.7):
            Q = QTensor.uniaxial(S2, Z_AXIS)
            self.assertAlmostEqual(
                bulk_free_energy(1.5, Q, self.geom),
                maier_saupe_energy(1.5, S2, self.geom),
                delta=1e-8,
            )


class EquilibriumBranchTests(unittest.TestCase):
    def test_roots_are_self_consistent(self):
        """
        Asserts that every branch satisfies r = 15 alpha S2(r) / 32 to 1e-10 and the
        isotropic branch is always present.
        """
        for alpha in (10.0, 15.0, 20.0, 100.0):
            equilibrium = equilibrium_branches(alpha)
            self.assertTrue(equilibrium.isotropic.is_isotropic)
            for branch in equilibrium.branches:
                target = SELF_CONSISTENCY_SLOPE * alpha * s2_from_r(branch.r)
                self.assertLess(abs(branch.r - target), 1e-10)

    def test_branch_structure(self):
        """
        Asserts the branch counts and stability below the nematic threshold, between it
        and the spinodal, and above the spinodal.
        """
        self.assertEqual([], equilibrium_branches(14.0).nematic_branches)

        between = equilibrium_branches(15.0)
        self.assertEqual(2, len(between.nematic_branches))
        self.assertEqual(
            [False, True], [branch.stable for branch in between.nematic_branches]
        )
        self.assertTrue(between.isotropic.stable)

        above = equilibrium_branches(20.0)
        self.assertEqual(1, len(above.nematic_branches))
        self.assertTrue(above.nematic_branches[0].stable)
        self.assertFalse(above.isotropic.stable)

    def test_spinodal(self):
        """
        Asserts that the isotropic state loses stability at alpha = 16.
        """
        self.assertEqual(16.0, SPINODAL_ALPHA)
        self.assertTrue(equilibrium_branches(15.9).isotropic.stable)
        self.assertFalse(equilibrium_branches(16.1).isotropic.stable)

    def test_ground_states(self):
        """
        Asserts that the nematic branch wins at alpha = 20, the isotropic state wins at
        alpha = 10, and strong coupling gives S2 > 0.9.
        """
        above = equilibrium_branches(20.0)
        self.assertLess(above.preferred_nematic().energy, above.isotropic.energy)
        self.assertIs(above.preferred_nematic(), above.ground_state())

        below = equilibrium_branches(10.0)
        self.assertIsNone(below.preferred_nematic())
        self.assertIs(below.isotropic, below.ground_state())
        self.assertAlmostEqual(-LN_4PI, below.isotropic.energy)

        self.assertGreater(equilibrium_branches(100.0).ground_state().S2, 0.9)

    def test_reduced_energy_on_isotropic_state(self):
        """
        Asserts that the isotropic reduced energy is -ln 4 pi for every alpha.
        """
        for alpha in (1.0, 30.0):
            self.assertAlmostEqual(-LN_4PI, reduced_energy(0.0, alpha))

    def test_transition(self):
        """
        Asserts the existence and transition couplings of the first-order transition,
        and that both branches have equal energy at the transition.
        """
        point = transition_alpha()
        self.assertAlmostEqual(14.354, point.alpha_existence, delta=0.01)
        self.assertAlmostEqual(14.531, point.alpha_transition, delta=0.01)
        self.assertAlmostEqual(0.323, point.S2_existence, delta=0.01)
        self.assertAlmostEqual(0.429, point.S2_transition, delta=0.01)
        self.assertLess(point.alpha_existence, point.alpha_transition)
        self.assertLess(point.alpha_transition, SPINODAL_ALPHA)

        equilibrium = equilibrium_branches(point.alpha_transition)
        self.assertAlmostEqual(
            equilibrium.isotropic.energy,
            equilibrium.preferred_nematic().energy,
            delta=1e-6,
        )

    def test_sweep(self):
        """
        Asserts that a sweep keeps grid order and an empty grid raises an input error.
        """
        grid = [20.0, 10.0, 15.0]
        results = equilibrium_sweep(grid, workers=3)
        self.assertEqual(grid, [result.alpha for result in results])
        with self.assertRaises(LcstatInputException):
            equilibrium_sweep([])
        with self.assertRaises(LcstatInputException):
            equilibrium_branches(0.0)


class ElasticCoefficientTests(unittest.TestCase):
    def test_groupings_agree(self):
        """
        Asserts that the grouped and simplified alpha combinations give the same J.
        """
        for eta in (0.1, 0.5, 1.0):
            geom = RodGeometry.from_eta(eta)
            simplified = elastic_J(geom).as_dict()
            grouped = elastic_J(geom, grouped=True).as_dict()
            for key, value in simplified.items():
                self.assertAlmostEqual(value, grouped[key], delta=1e-14, msg=key)

    def test_j3(self):
        """
        Asserts that J3 = -(35 pi / 16) eta alpha_13 and is positive.
        """
        eta = 0.1
        expected = -(35 * math.pi / 16) * eta * (-(2 * eta**2 / 3) * (9 / 256))
        J3 = elastic_J(RodGeometry.from_eta(eta)).J3
        self.assertAlmostEqual(expected, J3, delta=1e-15)
        self.assertGreater(J3, 0)

    def test_thin_rod_limit_of_j2(self):
        """
        Asserts that J2 tends to -(pi/2) eta (3/7)(-5/192) for thin rods.
        """
        eta = 1e-4
        expected = -(math.pi / 2) * eta * (3 / 7) * (-5 / 192)
        self.assertAlmostEqual(
            1.0, elastic_J(RodGeometry.from_eta(eta)).J2 / expected, delta=1e-3
        )

    def test_energy_density(self):
        """
        Asserts that the elastic energy density vanishes without gradients, is
        invariant under a joint rotation and rejects misshaped gradients.
        """
        J = elastic_J(RodGeometry.from_eta(0.3))
        self.assertEqual(
            0.0,
            elastic_energy_density(
                np.zeros(3), np.zeros((3,) * 3), np.zeros((3,) * 5), J
            ),
        )

        generator = np.random.default_rng(11)
        grad_c = generator.normal(size=3)
        grad_cQ = generator.normal(size=(3,) * 3)
        grad_cQ4 = generator.normal(size=(3,) * 5)
        R = Rotation.from_euler("zyx", [0.7, 0.2, -1.3]).as_matrix()
        rotated = (
            R @ grad_c,
            np.einsum("ai,bj,ck,ijk->abc", R, R, R, grad_cQ),
            np.einsum("ai,bj,ck,dl,em,ijklm->abcde", R, R, R, R, R, grad_cQ4),
        )
        value = elastic_energy_density(grad_c, grad_cQ, grad_cQ4, J)
        self.assertAlmostEqual(
            value,
            elastic_energy_density(*rotated, J),
            delta=1e-10 * max(1.0, abs(value)),
        )

        with self.assertRaises(LcstatInputException):
            elastic_energy_density(
                np.zeros(2), np.zeros((3,) * 3), np.zeros((3,) * 5), J
            )


class FourthOrderTests(unittest.TestCase):
    def test_raw_assembly_reproduces_weights(self):
        """
        Asserts that combining the raw orientational integrals yields the tabulated
        rational weights exactly.
        """
        self.assertEqual(FOURTH_ORDER_WEIGHTS, fourth_order_assembly_raw())
        self.assertEqual(
            (Fraction(0), Fraction(6), Fraction(24, 49)),
            FOURTH_ORDER_WEIGHTS["q2_q2_divergence"],
        )

    def test_coefficients(self):
        """
        Asserts that the Q4-Q4 coefficient is -5/256 in units of pi L^6 D / 24 for any
        eta, and the c-c coefficient matches its mu combination.
        """
        for eta in (0.1, 0.7):
            geom = RodGeometry.from_eta(eta)
            scale = math.pi * geom.L**6 * geom.D / 24
            coefficients = fourth_order_coefficients(geom)
            self.assertAlmostEqual(-5 / 256, coefficients.q4_q4 / scale, delta=1e-15)
            self.assertEqual(0.0, coefficients.q4_trace)

            mu = expansion_coefficients(eta)
            expected = 2 / 5 * mu.mu11 + 2 / 3 * mu.mu21 + 8 / 75 * mu.mu22
            self.assertAlmostEqual(expected, coefficients.c_c / scale, delta=1e-15)
            self.assertEqual(10, len(coefficients.as_dict()))


if __name__ == "__main__":
    unittest.main()
