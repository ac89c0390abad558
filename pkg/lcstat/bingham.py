"""
The Bingham closure: an orientation density exp(B : mm) / Z matching a given Q.

Uniaxial quantities are one-dimensional integrals over z = m.n in [0, 1] with the
weight exp(r z^2); biaxial solves use a product quadrature on the sphere and a Newton
iteration on the two free eigenvalues of B in the eigenframe of Q. B is always
traceless; Z is reported in that gauge.
"""
import math
import numbers
from dataclasses import dataclass, field
from threading import Lock

import numpy as np
from cachetools import LRUCache, cached
from scipy.interpolate import CubicSpline
from scipy.special import dawsn, erf

from lcstat.logger import get_logger
from lcstat.tensor_algebra import (
    TracelessTensor,
    delta_sym,
    gauss_legendre_integrate,
    gauss_legendre_nodes,
    legendre_P,
    sigma_tensor,
)
from lcstat.validation import (
    handle_domain_error,
    handle_input_error,
    handle_numeric_error,
    validate_positive,
    validate_unit_vector,
)

R_GUARD = 200.0
UNIAXIAL_RTOL = 1e-13
UNIAXIAL_ATOL = 1e-16
SERIES_R_LIMIT = 2.0
SERIES_TERMS = 30
LEGENDRE_SPLIT_EXPONENT = 40.0
INVERSION_TOLERANCE = 1e-14
INVERSION_MAX_ITERATIONS = 200
BINGHAM_TOLERANCE = 1e-12
BINGHAM_ACCEPT_TOLERANCE = 1e-10
BINGHAM_MAX_ITERATIONS = 100
MAX_STEP_HALVINGS = 30
SPHERE_THETA_NODES = 64
SPHERE_PHI_NODES = 128
SPHERE_MAX_THETA_NODES = 512
SPHERE_STABILITY_TOLERANCE = 1e-13
SYMMETRY_TOLERANCE = 1e-12

SPLINE_R_MIN = -80.0
SPLINE_R_MAX = 200.0
SPLINE_KNOTS = 2048


@dataclass(frozen=True)
class QTensor:
    """
    Symmetric traceless 3x3 order-parameter tensor.

    :param matrix (np.ndarray): the full 3x3 matrix.
    """

    matrix: np.ndarray = field(repr=False)

    def __post_init__(self):
        matrix = np.asarray(self.matrix, dtype=float)
        if matrix.shape != (3, 3):
            handle_input_error(f"Q must be a 3x3 matrix, got shape {matrix.shape}.")
        if np.max(np.abs(matrix - matrix.T)) > SYMMETRY_TOLERANCE:
            handle_input_error("Q must be symmetric.")
        if abs(np.trace(matrix)) > SYMMETRY_TOLERANCE:
            handle_input_error(f"Q must be traceless, trace = {np.trace(matrix)}.")
        object.__setattr__(self, "matrix", 0.5 * (matrix + matrix.T))

    @classmethod
    def zero(cls):
        return cls(np.zeros((3, 3)))

    @classmethod
    def uniaxial(cls, S2, n):
        n = validate_unit_vector(n, "n")
        return cls(S2 * (np.outer(n, n) - np.eye(3) / 3))

    @property
    def components(self):
        return TracelessTensor.from_full(self.matrix)

    def eigenvalues(self):
        return np.linalg.eigvalsh(self.matrix)

    def is_physical(self):
        values = self.eigenvalues()
        return bool(np.all(values > -1.0 / 3) and np.all(values < 2.0 / 3))

    def rotated(self, rotation):
        rotation = np.asarray(rotation, dtype=float)
        return QTensor(rotation @ self.matrix @ rotation.T)

    def norm_sq(self):
        return float(np.sum(self.matrix * self.matrix))


def as_q_tensor(Q):
    return Q if isinstance(Q, QTensor) else QTensor(np.asarray(Q, dtype=float))


@dataclass(frozen=True)
class BinghamSolution:
    """
    :param B (np.ndarray): traceless symmetric dual field.
    :param log_Z (float): ln of the integral of exp(B : mm) over the sphere.
    :param residual (float): max-norm moment residual on the solving quadrature.
    :param Q (QTensor): the tensor that was matched.
    """

    B: np.ndarray = field(repr=False)
    log_Z: float
    residual: float
    Q: QTensor = field(repr=False)

    @property
    def Z(self):
        return math.exp(self.log_Z)


@dataclass(frozen=True)
class UniaxialState:
    """
    :param S2 (float): second Legendre order parameter.
    :param S4 (float): fourth Legendre order parameter.
    :param r (float): Bingham concentration parameter, B = r (nn - I/3).
    :param n (np.ndarray): director.
    """

    S2: float
    S4: float
    r: float
    n: np.ndarray = field(
        default_factory=lambda: np.array([0.0, 0.0, 1.0]), repr=False
    )

    @classmethod
    def from_r(cls, r, n=(0.0, 0.0, 1.0)):
        return cls(s2_from_r(r), s4_from_r(r), float(r), validate_unit_vector(n, "n"))

    @classmethod
    def from_s2(cls, S2, n=(0.0, 0.0, 1.0)):
        return cls.from_r(r_from_s2(S2), n)

    def q_tensor(self):
        return QTensor.uniaxial(self.S2, self.n)


@dataclass(frozen=True)
class BinghamMoments:
    """
    Moments of z^2 under the density proportional to exp(r z^2) on [0, 1].

    :param log_integral (float): ln of the integral of exp(r z^2) over [0, 1].
    """

    r: float
    z2: float
    z4: float
    z6: float
    log_integral: float


def _validate_r(r):
    if not (isinstance(r, numbers.Real) and math.isfinite(r)):
        handle_input_error(f"r must be a finite number, got {r!r}.")
    if abs(r) > R_GUARD:
        handle_input_error(f"|r| must not exceed {R_GUARD}, got {r}.")
    return float(r)


def _series_integrals(r):
    # integral of z^(2n) exp(r z^2) over [0, 1] = sum_k r^k / (k! (2n + 2k + 1))
    k = np.arange(SERIES_TERMS)
    terms = np.cumprod(np.concatenate(([1.0], r / k[1:])))
    return [float(np.sum(terms / (2 * n + 2 * k + 1))) for n in range(4)]


@cached(cache=LRUCache(maxsize=8192))
def bingham_moments(r):
    """
    Closed form for the uniaxial moments. With I_n the integral of z^(2n) exp(r z^2)
    over [0, 1], integration by parts gives I_n = (e^r - (2n - 1) I_(n-1)) / (2r), and
    I_0 is a Dawson integral for r > 0 or an error function for r < 0. Near r = 0 the
    recurrence cancels, so the power series is summed instead.
    """
    r = _validate_r(r)
    if abs(r) < SERIES_R_LIMIT:
        integrals = _series_integrals(r)
        return BinghamMoments(
            r=r,
            z2=integrals[1] / integrals[0],
            z4=integrals[2] / integrals[0],
            z6=integrals[3] / integrals[0],
            log_integral=math.log(integrals[0]),
        )
    if r > 0:
        root = math.sqrt(r)
        dawson = float(dawsn(root))
        log_integral = r + math.log(dawson / root)
        # e^r / I_0
        edge_ratio = root / dawson
    else:
        root = math.sqrt(-r)
        integral = math.sqrt(math.pi) * float(erf(root)) / (2.0 * root)
        log_integral = math.log(integral)
        edge_ratio = math.exp(r) / integral
    moments = [1.0]
    for n in range(1, 4):
        moments.append((edge_ratio - (2 * n - 1) * moments[-1]) / (2.0 * r))
    return BinghamMoments(
        r=r, z2=moments[1], z4=moments[2], z6=moments[3], log_integral=log_integral
    )


def s2_from_r(r):
    return 1.5 * bingham_moments(r).z2 - 0.5


def s4_from_r(r):
    """
    S4 = 35 <z^4> / 8 - 5 S2 / 2 - 7 / 8.
    """
    moments = bingham_moments(r)
    return 35 * moments.z4 / 8 - 2.5 * (1.5 * moments.z2 - 0.5) - 7 / 8


def s4_from_r_legendre(r):
    """
    S4 as the average of P4(z) under exp(r z^2), integrated by quadrature. For r > 0
    the weight is taken in t = 1 - z as exp(-r t (2 - t)), which keeps the boundary
    layer at z = 1 resolved. The interval is split where the exponent reaches
    -LEGENDRE_SPLIT_EXPONENT.
    """
    r = _validate_r(r)
    if r > 0:

        def integrand(t):
            weight = np.exp(-r * t * (2.0 - t))
            return np.stack([weight, weight * legendre_P(4, 1.0 - t)], axis=-1)

        split = 1.0 - math.sqrt(max(0.0, 1.0 - LEGENDRE_SPLIT_EXPONENT / r))
    else:

        def integrand(z):
            weight = np.exp(r * z * z)
            return np.stack([weight, weight * legendre_P(4, z)], axis=-1)

        split = math.sqrt(LEGENDRE_SPLIT_EXPONENT / -r) if r < 0 else 1.0
    split = min(split, 1.0)
    integrals = sum(
        gauss_legendre_integrate(
            integrand, low, high, atol=UNIAXIAL_ATOL, rtol=UNIAXIAL_RTOL
        )
        for low, high in ((0.0, split), (split, 1.0))
        if high > low
    )
    return float(integrals[1] / integrals[0])


def ds2_dr(r):
    moments = bingham_moments(r)
    return 1.5 * (moments.z4 - moments.z2**2)


def ds4_dr(r):
    moments = bingham_moments(r)
    return 35 / 8 * (moments.z6 - moments.z4 * moments.z2) - 2.5 * ds2_dr(r)


def log_partition(r):
    """
    ln of the integral over the sphere of exp(r ((m.n)^2 - 1/3)), the traceless gauge.
    """
    return math.log(4 * math.pi) + bingham_moments(r).log_integral - r / 3


def r_from_s2(S2):
    """
    Inverts S2(r) by Newton steps kept inside a shrinking bracket, bisecting whenever a
    step would leave it.
    """
    if not (isinstance(S2, numbers.Real) and -0.5 < S2 < 1.0):
        handle_domain_error(f"S2 must lie strictly inside (-1/2, 1), got {S2}.")
    if S2 == 0:
        return 0.0
    low, high = -R_GUARD, R_GUARD
    if not (s2_from_r(low) <= S2 <= s2_from_r(high)):
        handle_domain_error(
            f"S2 = {S2} is not reached for |r| <= {R_GUARD}; "
            f"last bracket [{low}, {high}]."
        )

    r = min(max(7.5 * S2, low), high)
    for iteration in range(INVERSION_MAX_ITERATIONS):
        residual = s2_from_r(r) - S2
        if abs(residual) <= INVERSION_TOLERANCE:
            return r
        if residual > 0:
            high = r
        else:
            low = r
        slope = ds2_dr(r)
        candidate = r - residual / slope if slope > 0 else low - 1.0
        if not low < candidate < high:
            candidate = 0.5 * (low + high)
        if abs(candidate - r) <= INVERSION_TOLERANCE * max(1.0, abs(r)):
            return candidate
        r = candidate
    return handle_numeric_error(
        f"r_from_s2({S2}) did not converge; bracket [{low}, {high}].", estimate=r
    )


@dataclass(frozen=True)
class SphereQuadrature:
    """
    Product rule: Gauss-Legendre in cos(theta) times the trapezoid rule in phi.

    :param nodes (np.ndarray): (N, 3) unit vectors.
    :param weights (np.ndarray): (N,) positive weights summing to 4 pi.
    :param n_theta (int), n_phi (int): node counts per direction.
    """

    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    n_theta: int
    n_phi: int

    @property
    def degree(self):
        """
        Polynomial degree integrated exactly.
        """
        return min(2 * self.n_theta - 1, self.n_phi - 1)

    def refined(self):
        return sphere_quadrature(2 * self.n_theta, 2 * self.n_phi)


@cached(cache=LRUCache(maxsize=16))
def sphere_quadrature(n_theta=SPHERE_THETA_NODES, n_phi=SPHERE_PHI_NODES):
    cos_theta, theta_weights = gauss_legendre_nodes(n_theta)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    sin_theta = np.sqrt(1.0 - cos_theta**2)
    nodes = np.stack(
        [
            np.outer(sin_theta, np.cos(phi)).ravel(),
            np.outer(sin_theta, np.sin(phi)).ravel(),
            np.repeat(cos_theta, n_phi),
        ],
        axis=1,
    )
    weights = np.repeat(theta_weights, n_phi) * (2 * math.pi / n_phi)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return SphereQuadrature(nodes, weights, n_theta, n_phi)


def _log_partition_on(B, quad):
    exponent = np.einsum("ni,ij,nj->n", quad.nodes, B, quad.nodes)
    shift = float(np.max(exponent))
    return math.log(float(np.dot(quad.weights, np.exp(exponent - shift)))) + shift


def stable_sphere_quadrature(B):
    """
    The coarsest sphere quadrature on which ln Z for the field B agrees with the next
    refinement to SPHERE_STABILITY_TOLERANCE.
    """
    B = np.asarray(B, dtype=float)
    quad = sphere_quadrature()
    current = _log_partition_on(B, quad)
    while quad.n_theta < SPHERE_MAX_THETA_NODES:
        refined = quad.refined()
        following = _log_partition_on(B, refined)
        if abs(following - current) <= SPHERE_STABILITY_TOLERANCE * max(
            1.0, abs(current)
        ):
            return quad
        quad, current = refined, following
    get_logger().warning(
        f"Sphere quadrature not stable at {quad.n_theta}x{quad.n_phi} nodes."
    )
    return quad


def _eigenframe_state(b, squares, weights):
    """
    Log partition, second moments and covariance of the eigenframe density
    exp(sum_i b_i m_i^2).
    """
    exponent = squares @ b
    shift = float(np.max(b))
    w = weights * np.exp(exponent - shift)
    total = float(np.sum(w))
    mean = (w @ squares) / total
    centered = squares - mean
    covariance = (centered * w[:, None]).T @ centered / total
    return math.log(total) + shift, mean, covariance


def _solve_eigenframe(eigenvalues, quad):
    """
    Newton iteration on (b1, b2), b3 = -b1 - b2, for the convex dual
    psi(b) = ln Z(b) - sum_i b_i (lambda_i + 1/3).
    """
    squares = quad.nodes**2
    target = eigenvalues + 1.0 / 3
    # d b / d (b1, b2)
    lift = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -1.0]])

    def evaluate(free):
        b = lift @ free
        log_z, mean, covariance = _eigenframe_state(b, squares, quad.weights)
        psi = log_z - float(b @ target)
        gradient = lift.T @ (mean - target)
        hessian = lift.T @ covariance @ lift
        return psi, gradient, hessian, log_z, float(np.max(np.abs(mean - target)))

    free = np.zeros(2)
    psi, gradient, hessian, log_z, residual = evaluate(free)
    for iteration in range(BINGHAM_MAX_ITERATIONS):
        if residual <= BINGHAM_TOLERANCE:
            break
        step = np.linalg.solve(hessian, -gradient)
        scale = 1.0
        for halving in range(MAX_STEP_HALVINGS):
            trial = evaluate(free + scale * step)
            decrease = trial[0] <= psi + 1e-4 * scale * float(gradient @ step)
            if decrease or trial[4] < residual:
                break
            scale *= 0.5
        else:
            get_logger().debug(
                f"Bingham line search exhausted at iteration {iteration}."
            )
            break
        free = free + scale * step
        psi, gradient, hessian, log_z, residual = trial
    return lift @ free, log_z, residual


def solve_bingham(Q, quad=None):
    """
    Finds the traceless B with integral (mm - I/3) exp(B : mm) / Z dm = Q.

    Without an explicit quadrature the solve is repeated on refined sphere rules
    until the moment residual on the next refinement is below BINGHAM_TOLERANCE.
    """
    Q = as_q_tensor(Q)
    eigenvalues, frame = np.linalg.eigh(Q.matrix)
    if not Q.is_physical():
        handle_domain_error(
            f"Q is not physical: eigenvalues {eigenvalues} must lie in (-1/3, 2/3)."
        )

    explicit = quad is not None
    quad = quad or sphere_quadrature()
    while True:
        b, log_z, residual = _solve_eigenframe(eigenvalues, quad)
        if explicit or quad.n_theta >= SPHERE_MAX_THETA_NODES:
            break
        refined = quad.refined()
        squares = refined.nodes**2
        _, mean, _ = _eigenframe_state(b, squares, refined.weights)
        if np.max(np.abs(mean - eigenvalues - 1.0 / 3)) <= BINGHAM_TOLERANCE:
            break
        quad = refined

    if residual > BINGHAM_ACCEPT_TOLERANCE:
        handle_numeric_error(
            f"Bingham Newton iteration stagnated with residual {residual}.",
            estimate=residual,
        )
    B = frame @ np.diag(b) @ frame.T
    get_logger().debug(
        f"Solved Bingham closure on {quad.n_theta}x{quad.n_phi} nodes, "
        f"residual {residual:.3e}."
    )
    return BinghamSolution(B=0.5 * (B + B.T), log_Z=log_z, residual=residual, Q=Q)


def _density_weights(B, quad):
    exponent = np.einsum("ni,ij,nj->n", quad.nodes, B, quad.nodes)
    w = quad.weights * np.exp(exponent - np.max(exponent))
    return w / np.sum(w)


def moment_residual(solution, quad=None):
    """
    Max-norm difference between the second moment of exp(B : mm) / Z and Q.
    """
    quad = quad or stable_sphere_quadrature(solution.B)
    w = _density_weights(solution.B, quad)
    second = np.einsum("n,ni,nj->ij", w, quad.nodes, quad.nodes)
    return float(np.max(np.abs(second - np.eye(3) / 3 - solution.Q.matrix)))


def q4_from_bingham(solution, quad=None):
    """
    Q4 = <Xi_4(m)> under the Bingham density, from the averaged second and fourth
    powers of m.
    """
    quad = quad or stable_sphere_quadrature(solution.B)
    w = _density_weights(solution.B, quad)
    nodes = quad.nodes
    fourth = np.einsum("n,ni,nj,nk,nl->ijkl", w, nodes, nodes, nodes, nodes)
    second = np.einsum("n,ni,nj->ij", w, nodes, nodes)
    average = fourth - delta_sym(second) / 7 + sigma_tensor(np.zeros(3), 0, 2) / 35
    return TracelessTensor.from_full(average)


def bingham_entropy(c, Q, quad=None):
    """
    c (ln c + Q : B_Q - ln Z_Q), the orientational entropy density in k_BT units.
    """
    c = validate_positive(c, "c")
    solution = solve_bingham(Q, quad)
    q_dot_b = float(np.sum(solution.Q.matrix * solution.B))
    return c * (math.log(c) + q_dot_b - solution.log_Z)


def landau_invariants(Q):
    """
    (tr Q^2, tr Q^3, biaxiality) with biaxiality 1 - 6 (tr Q^3)^2 / (tr Q^2)^3, which
    is 0 for uniaxial Q and 1 for maximally biaxial Q.
    """
    matrix = as_q_tensor(Q).matrix
    tr2 = float(np.trace(matrix @ matrix))
    tr3 = float(np.trace(matrix @ matrix @ matrix))
    biaxiality = 0.0 if tr2 == 0 else 1.0 - 6.0 * tr3**2 / tr2**3
    return tr2, tr3, biaxiality


@dataclass(frozen=True)
class BinghamSplineCache:
    """
    Cubic splines over S2 of the uniaxial closure: r(S2), S4(S2) and the entropy
    phi(S2) = (2/3) r S2 - ln Z(r) (traceless gauge). Built from direct quadrature on an
    equispaced r grid and read-only afterwards.
    """

    s2_min: float
    s2_max: float
    r_spline: CubicSpline = field(repr=False)
    s4_spline: CubicSpline = field(repr=False)
    phi_spline: CubicSpline = field(repr=False)

    @classmethod
    def build(cls, r_min=SPLINE_R_MIN, r_max=SPLINE_R_MAX, n_knots=SPLINE_KNOTS):
        r_grid = np.linspace(r_min, r_max, n_knots)
        s2 = np.array([s2_from_r(r) for r in r_grid])
        s4 = np.array([s4_from_r(r) for r in r_grid])
        phi = np.array(
            [2.0 * r * value / 3 - log_partition(r) for r, value in zip(r_grid, s2)]
        )
        get_logger().info(
            f"Built Bingham spline cache on r in [{r_min}, {r_max}] "
            f"with {n_knots} knots."
        )
        return cls(
            s2_min=float(s2[0]),
            s2_max=float(s2[-1]),
            r_spline=CubicSpline(s2, r_grid),
            s4_spline=CubicSpline(s2, s4),
            phi_spline=CubicSpline(s2, phi),
        )

    def _checked(self, S2):
        S2 = np.asarray(S2, dtype=float)
        if np.any(S2 < self.s2_min) or np.any(S2 > self.s2_max):
            handle_domain_error(
                f"S2 outside the tabulated range [{self.s2_min}, {self.s2_max}]."
            )
        return S2

    def r(self, S2, derivative=0):
        return self.r_spline(self._checked(S2), derivative)

    def s4(self, S2, derivative=0):
        return self.s4_spline(self._checked(S2), derivative)

    def phi(self, S2, derivative=0):
        return self.phi_spline(self._checked(S2), derivative)


spline_cache = None
spline_cache_lock = Lock()


def get_spline_cache():
    global spline_cache
    if spline_cache is None:
        with spline_cache_lock:
            if spline_cache is None:
                spline_cache = BinghamSplineCache.build()
    return spline_cache
