"""
Oseen-Frank elastic constants of the hard-rod nematic.

Constants are kept dimensionless, K~ = K / (pi c^2 L^5 eta k_BT), and converted to CGS
(dyn) on request. frank_constants evaluates the closed-form expressions in S2, S4 and
eta; frank_from_tensor_model re-derives them by evaluating the tensor elastic energy
density on director fields that each isolate a single distortion invariant.
"""
import math
from dataclasses import dataclass
from concurrent.futures import ThreadPoolExecutor
from itertools import product

import numpy as np
from scipy import constants

from lcstat.geometry_kernel import RodGeometry
from lcstat.logger import get_logger
from lcstat.lcstat_util import get_worker_count
from lcstat.nematic_model import elastic_energy_density, elastic_J, equilibrium_branches
from lcstat.tensor_algebra import delta_sym
from lcstat.validation import (
    handle_domain_error,
    handle_input_error,
    handle_phase_error,
    validate_positive,
    validate_unit_vector,
)

BOLTZMANN_ERG_PER_K = constants.k * 1e7
SINGULAR_RADIUS = 1e-12

PHASE_NEMATIC = "nematic"
PHASE_ISOTROPIC = "isotropic"


class DirectorField:
    """
    A director field n(x) with its exact gradient, gradient(x)[h, i] = d_h n_i.
    """

    def __init__(self, kind, director, gradient, reference_point=(0.0, 0.0, 0.0)):
        self.kind = kind
        self._director = director
        self._gradient = gradient
        self.reference_point = np.asarray(reference_point, dtype=float)

    def director(self, point):
        return np.asarray(self._director(np.asarray(point, dtype=float)), dtype=float)

    def gradient(self, point):
        return np.asarray(self._gradient(np.asarray(point, dtype=float)), dtype=float)

    @classmethod
    def uniform(cls, n=(0.0, 0.0, 1.0)):
        n = validate_unit_vector(n, "n")
        return cls("uniform", lambda x: n, lambda x: np.zeros((3, 3)))

    @classmethod
    def splay(cls, k=1.0):
        """
        n = (x, y, 0) / rho; the reference point (1/k, 0, 0) has (div n)^2 = k^2.
        """

        def unnormalized(x):
            return np.array([x[0], x[1], 0.0]), np.array(
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]
            )

        return cls._normalized("splay", unnormalized, (1.0 / k, 0.0, 0.0))

    @classmethod
    def twist(cls, k=1.0):
        return cls(
            "twist",
            lambda x: np.array([math.cos(k * x[2]), math.sin(k * x[2]), 0.0]),
            lambda x: np.array(
                [
                    [0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0],
                    [-k * math.sin(k * x[2]), k * math.cos(k * x[2]), 0.0],
                ]
            ),
        )

    @classmethod
    def bend(cls, k=1.0):
        return cls(
            "bend",
            lambda x: np.array([math.sin(k * x[2]), 0.0, math.cos(k * x[2])]),
            lambda x: np.array(
                [
                    [0.0, 0.0, 0.0],
                    [0.0, 0.0, 0.0],
                    [k * math.cos(k * x[2]), 0.0, -k * math.sin(k * x[2])],
                ]
            ),
        )

    @classmethod
    def saddle_splay(cls, k=1.0):
        """
        n = (k x, -k y, 1) / |.|; at the origin only I4 = 2 k^2 is nonzero.
        """

        def unnormalized(x):
            return np.array([k * x[0], -k * x[1], 1.0]), np.diag([k, -k, 0.0])

        return cls._normalized("saddle_splay", unnormalized, (0.0, 0.0, 0.0))

    @classmethod
    def custom(cls, director, gradient, reference_point=(0.0, 0.0, 0.0)):
        return cls("custom", director, gradient, reference_point)

    @classmethod
    def normalized(cls, unnormalized, reference_point=(0.0, 0.0, 0.0)):
        """
        Field u(x) / |u(x)| from a callable returning (u, du) with du[h, i] = d_h u_i.
        """
        return cls._normalized("custom", unnormalized, reference_point)

    @classmethod
    def _normalized(cls, kind, unnormalized, reference_point):
        def director(x):
            u, _ = unnormalized(x)
            return u / _checked_norm(u, x)

        def gradient(x):
            u, du = unnormalized(x)
            norm = _checked_norm(u, x)
            return du / norm - np.outer(du @ u, u) / norm**3

        return cls(kind, director, gradient, reference_point)


def _checked_norm(u, x):
    norm = float(np.linalg.norm(u))
    if norm < SINGULAR_RADIUS:
        handle_domain_error(f"The director field is singular at {tuple(x)}.")
    return norm


def distortion_invariants(field, point=None):
    """
    (I1, I2, I3, I4) = ((div n)^2, (n . curl n)^2, |n x curl n|^2,
    tr(grad n)^2 - (div n)^2).
    """
    point = field.reference_point if point is None else point
    n = field.director(point)
    G = field.gradient(point)
    divergence = float(np.trace(G))
    curl = np.array(
        [G[1, 2] - G[2, 1], G[2, 0] - G[0, 2], G[0, 1] - G[1, 0]]
    )
    i1 = divergence**2
    i2 = float(np.dot(n, curl)) ** 2
    i3 = float(np.sum(np.cross(n, curl) ** 2))
    i4 = float(np.sum(G * G.T)) - i1
    return i1, i2, i3, i4


@dataclass(frozen=True)
class FrankConstants:
    """
    Dimensionless Frank constants K~_i = K_i / (pi c^2 L^5 eta k_BT).

    :param S2 (float), S4 (float): order parameters the constants were evaluated at.
    :param alpha (float): dimensionless concentration, None for formal inputs.
    """

    K1: float
    K2: float
    K3: float
    K4: float
    eta: float
    S2: float
    S4: float
    alpha: float = None

    def as_tuple(self):
        return self.K1, self.K2, self.K3, self.K4

    def dimensional(self, c, L, D, T):
        """
        Constants in dyn (erg/cm) for number density c [cm^-3], lengths L, D [cm] and
        temperature T [K].
        """
        return tuple(dimensional_K(value, c, L, D, T) for value in self.as_tuple())


def frank_from_order_parameters(S2, S4, eta):
    """
    The closed-form constants at given order parameters.
    """
    ln2 = math.log(2.0)
    e2 = eta**2
    cross = -1 / 64 + 5 * e2 / 14 - 3 * e2 * ln2 / 7
    splay_bend_s2 = -(e2 * 299 / 1568 - 15 / (7 * 64) - 12 * ln2 * e2 / 49)
    k1 = (
        S2**2 * splay_bend_s2
        + S4**2 * (15 * e2 / 128 - 115 * e2 / 49 * (1 / 8 - ln2 / 2))
        + S2 * S4 * 15 / 7 * cross
    )
    k2 = (
        -5 * S2**2 * (e2 * 19 / 1568 - 1 / (7 * 64) - 3 * ln2 * e2 / 98)
        + S4**2 * (15 * e2 / 128 - 15 / 49 * e2 * (1 / 8 - ln2 / 2))
        + S2 * S4 * 5 / 7 * cross
    )
    k3 = (
        S2**2 * splay_bend_s2
        + S4**2 * (15 * e2 / 128 - 150 / 49 * e2 * (1 / 8 - ln2 / 2))
        - S2 * S4 * 20 / 7 * cross
    )
    k4 = (
        S2**2 / 2 * (9 * ln2 * e2 / 98 - 51 * e2 / 392 + 5 / (7 * 32))
        - S4**2 * 25 * e2 / 49 * (1 / 4 - ln2)
        + S2 * S4 * 5 / 7 * cross
    )
    return FrankConstants(k1, k2, k3, k4, eta=eta, S2=S2, S4=S4)


def _nematic_state(alpha):
    branch = equilibrium_branches(alpha).preferred_nematic()
    if branch is None:
        handle_phase_error(f"No nematic branch at alpha = {alpha}; isotropic.")
    return branch


def frank_constants(alpha, geom):
    branch = _nematic_state(alpha)
    closed_form = frank_from_order_parameters(branch.S2, branch.S4, geom.eta)
    return FrankConstants(
        *closed_form.as_tuple(), geom.eta, branch.S2, branch.S4, alpha
    )


def xi4_gradient(n, G):
    """
    d_h Xi_4(n)_ijkl for a director with gradient G[h, i] = d_h n_i.
    """
    gradient = np.zeros((3,) * 5)
    for h in range(3):
        dn = G[h]
        quartic = (
            np.einsum("i,j,k,l->ijkl", dn, n, n, n)
            + np.einsum("i,j,k,l->ijkl", n, dn, n, n)
            + np.einsum("i,j,k,l->ijkl", n, n, dn, n)
            + np.einsum("i,j,k,l->ijkl", n, n, n, dn)
        )
        quadratic = delta_sym(np.outer(dn, n) + np.outer(n, dn))
        gradient[h] = quartic - quadratic / 7
    return gradient


def _uniaxial_density(field, S2, S4, J):
    point = field.reference_point
    n = field.director(point)
    G = field.gradient(point)
    grad_cQ = S2 * (np.einsum("hi,j->hij", G, n) + np.einsum("i,hj->hij", n, G))
    grad_cQ4 = S4 * xi4_gradient(n, G)
    return elastic_energy_density(np.zeros(3), grad_cQ, grad_cQ4, J)


def frank_from_tensor_model(alpha, geom, k=1.0):
    """
    Extracts K1, K2, K3 from the tensor density on splay, twist and bend fields, and
    K4 from the saddle-splay field, whose density is (K2 + K4) k^2.
    """
    validate_positive(k, "k")
    branch = _nematic_state(alpha)
    J = elastic_J(RodGeometry(L=1.0, D=geom.eta))
    scale = math.pi * geom.eta
    densities = {
        name: _uniaxial_density(field, branch.S2, branch.S4, J) / scale
        for name, field in (
            ("splay", DirectorField.splay(k)),
            ("twist", DirectorField.twist(k)),
            ("bend", DirectorField.bend(k)),
            ("saddle_splay", DirectorField.saddle_splay(k)),
        )
    }
    k1 = 2 * densities["splay"] / k**2
    k2 = 2 * densities["twist"] / k**2
    k3 = 2 * densities["bend"] / k**2
    k4 = densities["saddle_splay"] / k**2 - k2
    return FrankConstants(k1, k2, k3, k4, geom.eta, branch.S2, branch.S4, alpha)


def frank_energy_density(K, invariants):
    """
    (1/2) (K1 I1 + K2 I2 + K3 I3 + (K2 + K4) I4).
    """
    k1, k2, k3, k4 = K.as_tuple() if isinstance(K, FrankConstants) else K
    i1, i2, i3, i4 = invariants
    return 0.5 * (k1 * i1 + k2 * i2 + k3 * i3 + (k2 + k4) * i4)


@dataclass(frozen=True)
class ElasticSweepRow:
    """
    One (eta, alpha) point of the elastic-constant sweep. Constants and order
    parameters are None when the point is isotropic.
    """

    eta: float
    alpha: float
    phase: str
    S2: float = None
    S4: float = None
    K1: float = None
    K2: float = None
    K3: float = None
    K4: float = None


def _sweep_point(eta, alpha, L):
    branch = equilibrium_branches(alpha).preferred_nematic()
    if branch is None:
        get_logger().info(f"eta={eta}, alpha={alpha}: isotropic.")
        return ElasticSweepRow(eta, alpha, PHASE_ISOTROPIC)
    K = frank_from_order_parameters(branch.S2, branch.S4, eta)
    return ElasticSweepRow(
        eta, alpha, PHASE_NEMATIC, branch.S2, branch.S4, *K.as_tuple()
    )


def elastic_constant_sweep(eta_list, alpha_grid, geom=None, workers=None):
    """
    Frank constants over an (eta, alpha) grid in row-major order (eta outer).
    """
    eta_list, alpha_grid = list(eta_list), list(alpha_grid)
    if not eta_list or not alpha_grid:
        handle_input_error("elastic_constant_sweep needs nonempty eta and alpha grids.")
    L = geom.L if geom is not None else 1.0
    for eta in eta_list:
        RodGeometry.from_eta(eta, L)
    points = list(product(eta_list, alpha_grid))
    with ThreadPoolExecutor(max_workers=workers or get_worker_count()) as executor:
        return list(executor.map(lambda point: _sweep_point(*point, L), points))


def dimensional_K(K_dimensionless, c, L, D, T):
    """
    K = K~ pi c^2 L^5 eta k_B T in dyn, with c in cm^-3, L and D in cm, T in kelvin.
    """
    for value, name in ((c, "c"), (L, "L"), (D, "D"), (T, "T")):
        validate_positive(value, name)
    return K_dimensionless * math.pi * c**2 * L**5 * (D / L) * BOLTZMANN_ERG_PER_K * T


def alpha_from_volume_fraction(phi, eta):
    """
    alpha = pi L^2 D c for volume fraction phi = c pi L D^2 / 4, i.e. 4 phi / eta.
    """
    validate_positive(phi, "phi")
    validate_positive(eta, "eta")
    return 4.0 * phi / eta


def density_from_volume_fraction(phi, L, D):
    validate_positive(phi, "phi")
    return 4.0 * phi / (math.pi * L * D**2)
