"""
Homogeneous nematic model: the Bingham bulk free energy, its uniaxial branches and
transition points, and the elastic coefficients of the tensor energy density.
"""
import math
from dataclasses import dataclass, fields
from fractions import Fraction
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from lcstat.bingham import (
    as_q_tensor,
    ds2_dr,
    log_partition,
    r_from_s2,
    s2_from_r,
    s4_from_r,
    solve_bingham,
    R_GUARD,
)
from lcstat.logger import get_logger
from lcstat.lcstat_util import get_worker_count
from lcstat.tensor_algebra import expansion_coefficients
from lcstat.validation import handle_input_error, validate_positive

ROOT_SCAN_POINTS = 2048
ROOT_SCAN_MIN = 1e-8
ROOT_TOLERANCE = 1e-12
SPINODAL_ALPHA = 16.0

# Bulk coefficient of -c|Q|^2 per unit L^3 eta, and of -alpha S2^2 on uniaxial states.
BULK_COEFFICIENT = 15 * math.pi / 64
UNIAXIAL_BULK_COEFFICIENT = 5 / 32
# r = SELF_CONSISTENCY_SLOPE * alpha * S2 on every homogeneous branch.
SELF_CONSISTENCY_SLOPE = 15 / 32

F = Fraction

# J_n = -(pi/2) L^5 eta k_BT * sum over (i, j) of weight * alpha_ij
J_WEIGHTS = {
    1: {(1, 1): F(1), (2, 1): F(2, 3), (3, 1): F(2, 9), (3, 2): F(4, 45)},
    2: {(1, 2): F(3, 2), (2, 2): F(3, 7), (3, 2): F(9, 49)},
    3: {(1, 3): F(35, 8)},
    4: {(2, 1): F(2), (3, 1): F(4, 3), (2, 2): F(2, 5), (3, 2): F(8, 15)},
    5: {(3, 1): F(1), (3, 2): F(25, 49), (2, 2): F(6, 7)},
    6: {(3, 2): F(3, 2)},
    7: {(2, 2): F(3), (3, 2): F(18, 7)},
}

# The same coefficients before the alpha_31 - alpha_32 / 2 and 3 alpha_22 + 18/7
# alpha_32 groups are expanded.
J_GROUPED_WEIGHTS = {
    1: [
        (F(1), {(1, 1): F(1)}),
        (F(2, 3), {(2, 1): F(1)}),
        (F(2, 9), {(3, 1): F(1)}),
        (F(-1, 9), {(3, 2): F(1)}),
        (F(1, 5), {(3, 2): F(1)}),
    ],
    2: [
        (F(3, 2), {(1, 2): F(1)}),
        (F(-9, 49), {(3, 2): F(1)}),
        (F(3, 7), {(2, 2): F(1)}),
        (F(18, 49), {(3, 2): F(1)}),
    ],
    3: [(F(35, 8), {(1, 3): F(1)})],
    4: [
        (F(2), {(2, 1): F(1)}),
        (F(4, 3), {(3, 1): F(1), (3, 2): F(-1, 2)}),
        (F(6, 7), {(3, 2): F(1)}),
        (F(2, 15), {(2, 2): F(3), (3, 2): F(18, 7)}),
    ],
    5: [
        (F(1), {(3, 1): F(1), (3, 2): F(-1, 2)}),
        (F(27, 98), {(3, 2): F(1)}),
        (F(2, 7), {(2, 2): F(3), (3, 2): F(18, 7)}),
    ],
    6: [(F(3, 2), {(3, 2): F(1)})],
    7: [(F(1), {(2, 2): F(3), (3, 2): F(18, 7)})],
}

# Fourth-order terms, as weights over (mu11, mu21, mu22); the overall factor is
# pi L^6 D k_BT / 24.
FOURTH_ORDER_WEIGHTS = {
    "q4_q4": (F(0), F(0), F(9)),
    "q2_q2_divergence": (F(0), F(6), F(24, 49)),
    "q2_q2_mixed": (F(0), F(0), F(144, 49)),
    "q2_q2_full": (F(0), F(0), F(9, 49)),
    "c_c": (F(2, 5), F(2, 3), F(8, 75)),
    "q4_q2_divergence": (F(0), F(0), F(72, 7)),
    "q4_q2_laplacian": (F(0), F(0), F(18, 7)),
    "q4_c": (F(2), F(0), F(12, 5)),
    "q2_c": (F(12, 7), F(4), F(44, 35)),
    "q4_trace": (F(0), F(0), F(0)),
}

# Term weights of the three orientational integrals before they are combined with
# 2 mu11, mu21 - mu22 / 2 and 3/2 mu22 respectively; traces of Q2 and Q4 dropped.
FOURTH_ORDER_RAW = {
    "quartic": {"q4_c": F(1), "q2_c": F(6, 7), "c_c": F(1, 5)},
    "mixed": {"q2_q2_divergence": F(6), "q2_c": F(4), "c_c": F(2, 3)},
    "mixed_p2": {
        "q4_q4": F(6),
        "q2_q2_divergence": F(114, 49),
        "q2_q2_mixed": F(96, 49),
        "q2_q2_full": F(6, 49),
        "c_c": F(22, 75),
        "q4_q2_divergence": F(48, 7),
        "q4_q2_laplacian": F(12, 7),
        "q4_c": F(8, 5),
        "q2_c": F(76, 35),
    },
}
FOURTH_ORDER_RAW_FACTORS = {
    "quartic": (F(2), F(0), F(0)),
    "mixed": (F(0), F(1), F(-1, 2)),
    "mixed_p2": (F(0), F(0), F(3, 2)),
}


def bulk_free_energy(c, Q, geom):
    """
    c (ln c + Q : B_Q - ln Z_Q - 15 pi L^3 eta c |Q|^2 / 64) in k_BT units.
    """
    c = validate_positive(c, "c")
    Q = as_q_tensor(Q)
    solution = solve_bingham(Q)
    q_dot_b = float(np.sum(Q.matrix * solution.B))
    interaction = BULK_COEFFICIENT * geom.L**3 * geom.eta * c * Q.norm_sq()
    return c * (math.log(c) + q_dot_b - solution.log_Z - interaction)


def maier_saupe_energy(c, S2, geom):
    """
    bulk_free_energy on the uniaxial state Q = S2 (nn - I/3), computed through the
    one-dimensional closure: c (ln c + phi(S2) - 5 alpha S2^2 / 32) with
    alpha = pi L^2 D c and phi(S2) = (2/3) r S2 - ln Z(r).
    """
    c = validate_positive(c, "c")
    alpha = math.pi * geom.L**2 * geom.D * c
    r = r_from_s2(S2)
    return c * (math.log(c) + reduced_energy(r, alpha, S2))


def reduced_energy(r, alpha, S2=None):
    """
    Orientational free energy per particle without the ln c term.
    """
    S2 = s2_from_r(r) if S2 is None else S2
    entropy = 2.0 * r * S2 / 3 - log_partition(r)
    return entropy - UNIAXIAL_BULK_COEFFICIENT * alpha * S2**2


@dataclass(frozen=True)
class EquilibriumBranch:
    """
    One homogeneous solution of r = 15 alpha S2(r) / 32.

    :param energy (float): free energy per particle in k_BT, without the ln c term
        common to every branch at the same concentration.
    :param stable (bool): True when the branch is a local minimum of the energy.
    """

    r: float
    S2: float
    S4: float
    energy: float
    stable: bool

    @property
    def is_isotropic(self):
        return self.r == 0.0


@dataclass(frozen=True)
class HomogeneousEquilibrium:
    alpha: float
    branches: list

    @property
    def isotropic(self):
        return self.branches[0]

    @property
    def nematic_branches(self):
        return [branch for branch in self.branches if not branch.is_isotropic]

    def preferred_nematic(self):
        """
        The nematic branch with the lowest energy, ties broken toward larger S2; None
        when only the isotropic root exists.
        """
        nematic = self.nematic_branches
        if not nematic:
            return None
        return min(nematic, key=lambda branch: (branch.energy, -branch.S2))

    def ground_state(self):
        nematic = self.preferred_nematic()
        if nematic is not None and nematic.energy < self.isotropic.energy:
            return nematic
        return self.isotropic


def _self_consistency(r, alpha):
    return r - SELF_CONSISTENCY_SLOPE * alpha * s2_from_r(r)


def _branch(r, alpha):
    S2 = s2_from_r(r)
    slope = 1.0 - SELF_CONSISTENCY_SLOPE * alpha * ds2_dr(r)
    return EquilibriumBranch(
        r=float(r),
        S2=S2,
        S4=s4_from_r(r),
        energy=reduced_energy(r, alpha, S2),
        stable=slope > 0,
    )


def _bisect(low, high, alpha, g_low):
    while high - low > ROOT_TOLERANCE:
        middle = 0.5 * (low + high)
        g_middle = _self_consistency(middle, alpha)
        if g_middle == 0:
            return middle
        if (g_middle > 0) == (g_low > 0):
            low, g_low = middle, g_middle
        else:
            high = middle
    return 0.5 * (low + high)


def equilibrium_branches(alpha):
    """
    All roots r >= 0 of r = 15 alpha S2(r) / 32 on [0, R_GUARD]: the isotropic root
    r = 0 and every sign change of the residual on a logarithmic scan.
    """
    alpha = validate_positive(alpha, "alpha")
    grid = np.geomspace(ROOT_SCAN_MIN, R_GUARD, ROOT_SCAN_POINTS)
    residuals = [_self_consistency(r, alpha) for r in grid]
    branches = [_branch(0.0, alpha)]
    for i in range(len(grid) - 1):
        g_low, g_high = residuals[i], residuals[i + 1]
        if g_low == 0:
            branches.append(_branch(grid[i], alpha))
        elif g_low * g_high < 0:
            branches.append(_branch(_bisect(grid[i], grid[i + 1], alpha, g_low), alpha))
    get_logger().debug(
        f"alpha={alpha}: {len(branches) - 1} nematic roots "
        f"{[round(branch.S2, 6) for branch in branches[1:]]}."
    )
    return HomogeneousEquilibrium(alpha=alpha, branches=branches)


def equilibrium_sweep(alpha_grid, workers=None):
    """
    equilibrium_branches over a grid, concurrently, in grid order.
    """
    alpha_grid = list(alpha_grid)
    if not alpha_grid:
        handle_input_error("The alpha grid must not be empty.")
    with ThreadPoolExecutor(max_workers=workers or get_worker_count()) as executor:
        return list(executor.map(equilibrium_branches, alpha_grid))


@dataclass(frozen=True)
class TransitionPoint:
    """
    :param alpha_existence (float): below this alpha only the isotropic root exists.
    :param alpha_transition (float): alpha at which the stable nematic branch and
        the isotropic branch have equal energy.
    :param S2_existence (float), S2_transition (float): nematic S2 at those points.
    """

    alpha_existence: float
    alpha_transition: float
    S2_existence: float
    S2_transition: float


def _alpha_on_branch(r):
    return r / (SELF_CONSISTENCY_SLOPE * s2_from_r(r))


def transition_alpha(r_max=R_GUARD):
    """
    Locates the nematic existence threshold and the first-order transition along the
    nematic branch parametrized by r, where alpha(r) = 32 r / (15 S2(r)). On that
    branch the energy difference to the isotropic state reduces to
    r S2 / 3 - ln Z(r) + ln 4 pi.
    """
    result = minimize_scalar(
        _alpha_on_branch, bounds=(1e-3, r_max), method="bounded",
        options={"xatol": 1e-10},
    )
    r_existence = float(result.x)

    def energy_gap(r):
        return r * s2_from_r(r) / 3 - log_partition(r) + math.log(4 * math.pi)

    r_transition = brentq(energy_gap, r_existence, r_max, xtol=ROOT_TOLERANCE)
    point = TransitionPoint(
        alpha_existence=_alpha_on_branch(r_existence),
        alpha_transition=_alpha_on_branch(r_transition),
        S2_existence=s2_from_r(r_existence),
        S2_transition=s2_from_r(r_transition),
    )
    get_logger().info(f"Homogeneous transition: {point}.")
    return point


@dataclass(frozen=True)
class ElasticCoefficients:
    """
    Coefficients of the second-order tensor elastic energy, in k_BT L^5 units
    (k_BT = 1 internally).
    """

    eta: float
    J1: float
    J2: float
    J3: float
    J4: float
    J5: float
    J6: float
    J7: float

    def as_dict(self):
        return {f"J{n}": getattr(self, f"J{n}") for n in range(1, 8)}


def collect_grouped_weights(groups):
    """
    Expands [(factor, {alpha_key: weight})] into a single {alpha_key: weight} map.
    """
    collected = {}
    for factor, terms in groups:
        for key, weight in terms.items():
            collected[key] = collected.get(key, F(0)) + factor * weight
    return {key: weight for key, weight in collected.items() if weight != 0}


def _combine(weights, alpha):
    return sum(float(weight) * alpha[key] for key, weight in weights.items())


def elastic_J(geom, grouped=False):
    coefficients = expansion_coefficients(geom.eta)
    prefactor = -0.5 * math.pi * geom.L**5 * geom.eta
    values = {}
    for n in range(1, 8):
        weights = (
            collect_grouped_weights(J_GROUPED_WEIGHTS[n]) if grouped else J_WEIGHTS[n]
        )
        values[f"J{n}"] = prefactor * _combine(weights, coefficients.alpha)
    return ElasticCoefficients(eta=geom.eta, **values)


def elastic_energy_density(grad_c, grad_cQ, grad_cQ4, J):
    """
    Second-order elastic energy density. Gradient arrays carry the derivative index
    first: grad_cQ[h, i, j] = d_h (c Q_ij), grad_cQ4[h, i, j, k, l] = d_h (c Q4_ijkl).
    """
    grad_c = np.asarray(grad_c, dtype=float)
    grad_cQ = np.asarray(grad_cQ, dtype=float)
    grad_cQ4 = np.asarray(grad_cQ4, dtype=float)
    for array, shape, name in (
        (grad_c, (3,), "grad_c"),
        (grad_cQ, (3, 3, 3), "grad_cQ"),
        (grad_cQ4, (3,) * 5, "grad_cQ4"),
    ):
        if array.shape != shape:
            handle_input_error(f"{name} must have shape {shape}, got {array.shape}.")

    terms = (
        J.J1 * np.dot(grad_c, grad_c)
        + J.J2 * np.sum(grad_cQ**2)
        + J.J3 * np.sum(grad_cQ4**2)
        + J.J4 * np.einsum("iij,j->", grad_cQ, grad_c)
        + J.J5
        * (
            np.einsum("iik,jjk->", grad_cQ, grad_cQ)
            + np.einsum("ijk,jik->", grad_cQ, grad_cQ)
        )
        + J.J6
        * (
            np.einsum("iikpq,jjkpq->", grad_cQ4, grad_cQ4)
            + np.einsum("ijkpq,jikpq->", grad_cQ4, grad_cQ4)
        )
        + J.J7 * np.einsum("iijkl,jkl->", grad_cQ4, grad_cQ)
    )
    return 0.5 * float(terms)


@dataclass(frozen=True)
class FourthOrderCoefficients:
    """
    Coefficients of the fourth-order elastic energy in k_BT L^7 units. Field names
    give the contracted derivatives:

    :param q4_q4: d_ij(c Q4_ijpq) d_kl(c Q4_klpq)
    :param q2_q2_divergence: d_ij(c Q_ij) d_kl(c Q_kl)
    :param q2_q2_mixed: d_ik(c Q_ip) d_jk(c Q_jp)
    :param q2_q2_full: d_ij(c Q_pq) d_ij(c Q_pq)
    :param c_c: d_ij c d_ij c
    :param q4_q2_divergence: d_ij(c Q4_ijkp) d_kl(c Q_lp)
    :param q4_q2_laplacian: d_ij(c Q4_ijpq) d_kk(c Q_pq)
    :param q4_c: d_ij(c Q4_ijkl) d_kl c
    :param q2_c: d_ij(c Q_ij) d_kk c
    :param q4_trace: couplings through Q4_ijpp, identically zero
    """

    q4_q4: float
    q2_q2_divergence: float
    q2_q2_mixed: float
    q2_q2_full: float
    c_c: float
    q4_q2_divergence: float
    q4_q2_laplacian: float
    q4_c: float
    q2_c: float
    q4_trace: float

    def as_dict(self):
        return {item.name: getattr(self, item.name) for item in fields(self)}


def fourth_order_assembly_raw():
    """
    Combines the raw orientational integrals into weights over (mu11, mu21, mu22).
    """
    weights = {name: [F(0), F(0), F(0)] for name in FOURTH_ORDER_WEIGHTS}
    for integral, terms in FOURTH_ORDER_RAW.items():
        factors = FOURTH_ORDER_RAW_FACTORS[integral]
        for name, weight in terms.items():
            for slot in range(3):
                weights[name][slot] += factors[slot] * weight
    return {name: tuple(values) for name, values in weights.items()}


def fourth_order_coefficients(geom):
    mu = expansion_coefficients(geom.eta)
    scale = math.pi * geom.L**6 * geom.D / 24
    return FourthOrderCoefficients(
        **{
            name: scale
            * (
                float(w11) * mu.mu11
                + float(w21) * mu.mu21
                + float(w22) * mu.mu22
            )
            for name, (w11, w21, w22) in FOURTH_ORDER_WEIGHTS.items()
        }
    )
