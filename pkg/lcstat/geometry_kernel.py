"""
Hard-core kernel of two spherocylinders: the overlap predicate, closed-form moments of
the excluded region and a Monte Carlo estimator of the same moments.

Moments are taken in the pair frame (n1, n2, n3) where n1 bisects m and m', n2 bisects
m and -m' and n3 = n1 x n2. The excluded region is split into a prism (A), four
half-cylinders along its edges (B) and the sphere wedges at the corners (CI at the two
corners along n2, CII at the two corners along n1).
"""
import math
from dataclasses import dataclass, field
from itertools import permutations
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from lcstat.logger import get_logger
from lcstat.lcstat_util import get_int_value_for_env_var, get_worker_count
from lcstat.tensor_algebra import (
    arcsin_over_x,
    delta_sym,
    mu_coefficients,
    sigma_tensor,
)
from lcstat.validation import (
    handle_domain_error,
    handle_input_error,
    validate_positive,
    validate_unit_vector,
)

NEAR_PARALLEL_GUARD = 1e-6
DEGENERATE_FRAME_TOLERANCE = 1e-12
SEGMENT_PARALLEL_TOLERANCE = 1e-6
MC_CHUNK_SIZE = get_int_value_for_env_var("LCSTAT_MC_CHUNK", 200000, min_value=1)
MAX_MC_ORDER = 4

FOURTH_MOMENT_COMPONENTS = ("x4", "y4", "z4", "x2y2", "y2z2", "x2z2")


@dataclass(frozen=True)
class RodGeometry:
    """
    Spherocylinder dimensions. Lengths are in units of L inside the package (L = 1).

    :param L (float): rod length.
    :param D (float): cap diameter; two rods overlap when their axes come closer
        than D.
    """

    L: float
    D: float

    def __post_init__(self):
        validate_positive(self.L, "L")
        validate_positive(self.D, "D")
        if self.D > self.L:
            handle_input_error(
                f"eta = D/L must not exceed 1, got D={self.D}, L={self.L}."
            )

    @property
    def eta(self):
        return self.D / self.L

    @classmethod
    def from_eta(cls, eta, L=1.0):
        validate_positive(eta, "eta")
        return cls(L=L, D=eta * L)


@dataclass(frozen=True)
class PairFrame:
    """
    Orthonormal frame attached to a pair of rod directions.

    :param m (np.ndarray), m2 (np.ndarray): the two unit directions.
    :param gamma (float): angle between m and m2.
    :param cos_beta (float), sin_beta (float): half-angle, gamma = 2 beta.
    :param n1, n2, n3 (np.ndarray): frame vectors.
    """

    m: np.ndarray = field(repr=False)
    m2: np.ndarray = field(repr=False)
    gamma: float
    cos_beta: float
    sin_beta: float
    n1: np.ndarray = field(repr=False)
    n2: np.ndarray = field(repr=False)
    n3: np.ndarray = field(repr=False)

    @classmethod
    def from_vectors(cls, m, m2):
        m = validate_unit_vector(m, "m")
        m2 = validate_unit_vector(m2, "m2")
        sin_gamma = float(np.linalg.norm(np.cross(m, m2)))
        if sin_gamma < DEGENERATE_FRAME_TOLERANCE:
            handle_domain_error("The pair frame is undefined for parallel rods.")
        gamma = math.atan2(sin_gamma, float(np.dot(m, m2)))
        cos_beta, sin_beta = math.cos(gamma / 2), math.sin(gamma / 2)
        n1 = (m + m2) / (2 * cos_beta)
        n2 = (m - m2) / (2 * sin_beta)
        return cls(m, m2, gamma, cos_beta, sin_beta, n1, n2, np.cross(n1, n2))

    @classmethod
    def from_angle(cls, gamma):
        """
        The frame of the pair m = (cos b, sin b, 0), m2 = (cos b, -sin b, 0).
        """
        beta = 0.5 * gamma
        m = np.array([math.cos(beta), math.sin(beta), 0.0])
        m2 = np.array([math.cos(beta), -math.sin(beta), 0.0])
        return cls.from_vectors(m, m2)

    @property
    def basis(self):
        """
        Rows are n1, n2, n3, so basis @ r gives frame coordinates of r.
        """
        return np.vstack([self.n1, self.n2, self.n3])

    def to_lab(self, frame_tensor):
        """
        Rotates a tensor of any order from frame components to lab components.
        """
        tensor = np.asarray(frame_tensor, dtype=float)
        for axis in range(tensor.ndim):
            tensor = np.moveaxis(
                np.tensordot(self.basis, tensor, axes=([0], [axis])), 0, axis
            )
        return tensor


def rods_overlap(r, m, m2, geom):
    """
    True when the segment {t m} and the segment {r + t' m2}, t, t' in [-L/2, L/2], come
    closer than D.
    """
    m = validate_unit_vector(m, "m")
    m2 = validate_unit_vector(m2, "m2")
    r = np.asarray(r, dtype=float).reshape(1, 3)
    return bool(_overlap_mask(r, m, m2, geom)[0])


def segment_distance_sq(r, m, m2, half_length):
    """
    Squared minimum distances between the segment centered at the origin along m and
    the segments centered at each row of r along m2.
    """
    rij = -np.asarray(r, dtype=float)
    rij_sq = np.sum(rij**2, axis=1)
    rei = rij @ m
    rej = rij @ m2
    eij = float(np.dot(m, m2))
    sin_sq = 1.0 - eij**2

    if sin_sq > SEGMENT_PARALLEL_TOLERANCE:
        ci = (-rei + eij * rej) / sin_sq
        cj = (rej - eij * rei) / sin_sq
    else:
        ci, cj = -rei, rej.copy()

    ai, aj = np.abs(ci), np.abs(cj)
    ci = np.where(ai > half_length, half_length * np.sign(ci), ci)
    cj = np.where(aj > half_length, half_length * np.sign(cj), cj)
    i_dominates = ai > aj
    cj = np.where(i_dominates, rej + ci * eij, cj)
    ci = np.where(i_dominates, ci, -rei + cj * eij)

    ci = np.clip(ci, -half_length, half_length)
    cj = np.clip(cj, -half_length, half_length)

    di = 2.0 * rei + ci - cj * eij
    dj = -2.0 * rej + cj - ci * eij
    return rij_sq + ci * di + cj * dj


def _overlap_mask(r, m, m2, geom):
    return segment_distance_sq(r, m, m2, 0.5 * geom.L) < geom.D**2


def excluded_volume(gamma, geom):
    L, D = geom.L, geom.D
    return (
        2 * L**2 * D * math.sin(gamma)
        + 2 * math.pi * D**2 * L
        + 4 * math.pi * D**3 / 3
    )


def _validate_open_angle(gamma):
    if not (0.0 < gamma < math.pi) or math.sin(gamma) < DEGENERATE_FRAME_TOLERANCE:
        handle_domain_error(
            f"gamma must lie strictly inside (0, pi) for the pair frame, got {gamma}."
        )


def second_moment_regions(gamma, geom):
    """
    Region contributions (A, B, CI, CII) to (r1^2, r2^2, r3^2); B counts all four
    half-cylinders, CI and CII count both corners.
    """
    _validate_open_angle(gamma)
    L, D, pi = geom.L, geom.D, math.pi
    c, s = math.cos(gamma / 2), math.sin(gamma / 2)
    sin_g = math.sin(gamma)
    return {
        "A": np.array(
            [L**4 * D * c**2 * sin_g / 3, L**4 * D * s**2 * sin_g / 3,
             2 * L**2 * D**3 * sin_g / 3]
        ),
        "B": np.array(
            [
                2 * pi * L**3 * D**2 * c**2 / 3 + 4 * L**2 * D**3 * sin_g / 3
                + pi * L * D**4 * s**2 / 2,
                2 * pi * L**3 * D**2 * s**2 / 3 + 4 * L**2 * D**3 * sin_g / 3
                + pi * L * D**4 * c**2 / 2,
                pi * L * D**4 / 2,
            ]
        ),
        "CI": 2 * np.array(
            [
                2 * D**5 * (gamma - sin_g) / 15,
                2 * L**2 * D**3 * s**2 * gamma / 3 + pi * L * D**4 * s**2 / 2
                + 2 * D**5 * (gamma + sin_g) / 15,
                2 * D**5 * gamma / 15,
            ]
        ),
        "CII": 2 * np.array(
            [
                2 * L**2 * D**3 * c**2 * (pi - gamma) / 3 + pi * L * D**4 * c**2 / 2
                + 2 * D**5 * (pi - gamma + sin_g) / 15,
                2 * D**5 * (pi - gamma - sin_g) / 15,
                2 * D**5 * (pi - gamma) / 15,
            ]
        ),
    }


def second_moment_diag(gamma, geom):
    """
    (M1, M2, M3): the second moment of the excluded region in the pair frame.
    """
    total = sum(second_moment_regions(gamma, geom).values())
    return tuple(float(value) for value in total)


def fourth_moment_regions(gamma, geom):
    """
    Region contributions to the six nonzero frame components of the fourth moment, in
    the order of FOURTH_MOMENT_COMPONENTS.
    """
    _validate_open_angle(gamma)
    L, D, pi = geom.L, geom.D, math.pi
    beta = gamma / 2
    w = pi / 2 - beta
    c, s = math.cos(beta), math.sin(beta)
    sin_g = math.sin(gamma)
    cs = c * s
    skew = c**3 * s - c * s**3
    d7 = 16 * D**7 / 105

    region_a = [
        2 * L**6 * D * c**4 * sin_g / 15,
        2 * L**6 * D * s**4 * sin_g / 15,
        2 * L**2 * D**5 * sin_g / 5,
        L**6 * D * c**2 * s**2 * sin_g / 45,
        L**4 * D**3 * s**2 * sin_g / 9,
        L**4 * D**3 * c**2 * sin_g / 9,
    ]
    region_b = [
        2 * pi * L**5 * D**2 * c**4 / 5 + 8 * L**4 * D**3 * c**3 * s / 3
        + pi * L**3 * D**4 * c**2 * s**2 + 32 * L**2 * D**5 * c * s**3 / 15
        + pi * L * D**6 * s**4 / 4,
        2 * pi * L**5 * D**2 * s**4 / 5 + 8 * L**4 * D**3 * s**3 * c / 3
        + pi * L**3 * D**4 * c**2 * s**2 + 32 * L**2 * D**5 * s * c**3 / 15
        + pi * L * D**6 * c**4 / 4,
        pi * L * D**6 / 4,
        pi * L**5 * D**2 * c**2 * s**2 / 15 + 4 * L**4 * D**3 * cs / 9
        + pi * L**3 * D**4 * (c**4 + s**4) / 6 + pi * L**3 * D**4 * c**2 * s**2 / 3
        + 16 * L**2 * D**5 * cs / 15 + pi * L * D**6 * c**2 * s**2 / 4,
        pi * L**3 * D**4 * s**2 / 6 + 8 * L**2 * D**5 * cs / 15
        + pi * L * D**6 * c**2 / 12,
        pi * L**3 * D**4 * c**2 / 6 + 8 * L**2 * D**5 * cs / 15
        + pi * L * D**6 * s**2 / 12,
    ]
    corner_i = [
        d7 * (3 * beta / 4 - cs + skew / 4),
        4 * L**4 * D**3 * s**4 * beta / 3 + pi * L**3 * D**4 * s**4
        + 8 * L**2 * D**5 * s**2 * (beta + cs) / 5
        + pi * L * D**6 * s**2 * (3 - s**2) / 6 + d7 * (3 * beta / 4 + cs + skew / 4),
        4 * D**7 * beta / 35,
        4 * L**2 * D**5 * s**2 * (beta - cs) / 15 + pi * L * D**6 * s**4 / 12
        + d7 * (beta / 4 - skew / 4),
        4 * L**2 * D**5 * s**2 * beta / 15 + pi * L * D**6 * s**2 / 12
        + 4 * D**7 * (beta + cs) / 105,
        4 * D**7 * (beta - cs) / 105,
    ]
    corner_ii = [
        4 * L**4 * D**3 * c**4 * w / 3 + pi * L**3 * D**4 * c**4
        + 8 * L**2 * D**5 * c**2 * (w + cs) / 5
        + pi * L * D**6 * c**2 * (3 - c**2) / 6 + d7 * (3 * w / 4 + cs - skew / 4),
        d7 * (3 * w / 4 - cs - skew / 4),
        4 * D**7 * w / 35,
        4 * L**2 * D**5 * c**2 * (w - cs) / 15 + pi * L * D**6 * c**4 / 12
        + d7 * (w / 4 + skew / 4),
        4 * D**7 * (w - cs) / 105,
        4 * L**2 * D**5 * c**2 * w / 15 + pi * L * D**6 * c**2 / 12
        + 4 * D**7 * (w + cs) / 105,
    ]
    return {
        "A": np.array(region_a),
        "B": np.array(region_b),
        "CI": 2 * np.array(corner_i),
        "CII": 2 * np.array(corner_ii),
    }


def fourth_moment_diag(gamma, geom):
    """
    Frame components of the fourth moment keyed by FOURTH_MOMENT_COMPONENTS
    (x = r1, y = r2, z = r3).
    """
    total = sum(fourth_moment_regions(gamma, geom).values())
    return dict(zip(FOURTH_MOMENT_COMPONENTS, (float(value) for value in total)))


def fourth_moment_frame_tensor(components):
    """
    Expands the six frame components into a full 3x3x3x3 array.
    """
    tensor = np.zeros((3, 3, 3, 3))
    tensor[0, 0, 0, 0] = components["x4"]
    tensor[1, 1, 1, 1] = components["y4"]
    tensor[2, 2, 2, 2] = components["z4"]
    for (a, b), key in (((0, 1), "x2y2"), ((1, 2), "y2z2"), ((0, 2), "x2z2")):
        for index in set(permutations((a, a, b, b))):
            tensor[index] = components[key]
    return tensor


def _validate_cosine(x):
    if not (-1.0 <= x <= 1.0):
        handle_input_error(f"m.m' must lie in [-1, 1], got {x}.")
    if abs(x) > 1.0 - NEAR_PARALLEL_GUARD:
        handle_domain_error(
            f"Kernel coefficients diverge for nearly parallel rods "
            f"(|m.m'| = {abs(x)}); "
            "use their Legendre coefficients instead."
        )


def kernel_B(x, geom):
    """
    (B1, B2, B3) with M2 = B1 I + B2 (mm + m'm') + B3 (mm' + m'm)(m.m').
    """
    _validate_cosine(x)
    eta, pi = geom.eta, math.pi
    scale = geom.L**4 * geom.D
    s = math.sqrt(1.0 - x * x)
    b1 = 2 * s * eta**2 / 3 + pi * eta**3 / 2 + 4 * pi * eta**4 / 15
    b2 = s / 6 + pi * eta * (1 + eta) / 3 + pi * eta**3 / 4 + 2 * eta**2 / (3 * s)
    b3 = eta**2 * (2 * float(arcsin_over_x(x)) / 3 - 2 / (3 * s))
    return scale * b1, scale * b2, scale * b3


def kernel_R(x, geom):
    """
    (R1, ..., R6) of the fourth-moment decomposition

        M4 = R1 (dd)_sym + R2 (d mm + d m'm')_sym + R3 (d mm')_sym
             + R4 (mmmm + m'm'm'm') + R5 (mmm'm')_sym + R6 (mmmm' + m'm'm'm)_sym.
    """
    _validate_cosine(x)
    eta, pi = geom.eta, math.pi
    scale = geom.L**6 * geom.D
    s = math.sqrt(1.0 - x * x)
    gamma = math.acos(x)
    r1 = 2 * s * eta**4 / 15 + pi * eta**5 / 12 + 4 * pi * eta**6 / 105
    r2 = (
        s * eta**2 / 18 + pi * eta**3 / 12 + pi * eta**4 / 15 + pi * eta**5 / 24
        + 2 * eta**4 / (15 * s)
    )
    r3 = (pi - 2 * gamma) * eta**4 / 15 - 2 * eta**4 * x / (15 * s)
    r4 = (
        s / 40 + 3 * pi * eta / 40 + pi * eta**2 / 12 + pi * eta**3 / 8
        - pi * eta**5 / 24 + eta**2 / (3 * s) - 2 * eta**4 / (15 * s**3)
    )
    r5 = (
        s / 72 + pi * eta / 24 + pi * eta**2 / 12 + pi * eta**3 / 8
        + (eta**2 / 9 + 2 * eta**4 / 15) / s - 2 * eta**4 * x**2 / (15 * s**3)
    )
    r6 = (
        (pi - 2 * gamma) * eta**2 / 12 - eta**2 * x / (6 * s)
        + 2 * eta**4 * x**3 / (15 * s**3)
    )
    return tuple(scale * value for value in (r1, r2, r3, r4, r5, r6))


def _symmetrized_outer(pattern, vectors):
    """
    Sum of outer products over the distinct orderings of pattern, whose entries index
    into vectors; (0, 0, 1, 1) with (m, m2) gives (mmm'm')_sym.
    """
    total = 0.0
    for ordering in set(permutations(pattern)):
        term = vectors[ordering[0]]
        for index in ordering[1:]:
            term = np.multiply.outer(term, vectors[index])
        total = total + term
    return total


def fourth_moment_basis(m, m2):
    """
    The six tensors multiplying R1..R6, as full arrays.
    """
    m = np.asarray(m, dtype=float)
    m2 = np.asarray(m2, dtype=float)
    pair = (m, m2)
    cross = np.outer(m, m2) + np.outer(m2, m)
    return (
        sigma_tensor(m, 0, 2),
        sigma_tensor(m, 2, 1) + sigma_tensor(m2, 2, 1),
        delta_sym(cross),
        _symmetrized_outer((0, 0, 0, 0), pair)
        + _symmetrized_outer((1, 1, 1, 1), pair),
        _symmetrized_outer((0, 0, 1, 1), pair),
        _symmetrized_outer((0, 0, 0, 1), pair)
        + _symmetrized_outer((1, 1, 1, 0), pair),
    )


def second_moment_tensor(m, m2, geom):
    m = validate_unit_vector(m, "m")
    m2 = validate_unit_vector(m2, "m2")
    x = float(np.dot(m, m2))
    b1, b2, b3 = kernel_B(x, geom)
    return (
        b1 * np.eye(3)
        + b2 * (np.outer(m, m) + np.outer(m2, m2))
        + b3 * x * (np.outer(m, m2) + np.outer(m2, m))
    )


def fourth_moment_tensor(m, m2, geom):
    m = validate_unit_vector(m, "m")
    m2 = validate_unit_vector(m2, "m2")
    coefficients = kernel_R(float(np.dot(m, m2)), geom)
    return sum(
        coefficient * basis
        for coefficient, basis in zip(coefficients, fourth_moment_basis(m, m2))
    )


def legendre_fourth_moment(m, m2, geom):
    """
    Truncated Legendre form of the fourth moment used by the fourth-order elastic
    energy: pi L^6 D [mu11 (m^4 + m'^4) + (mu21 + mu22 P2(m.m')^2) (mmm'm')_sym].
    """
    m = validate_unit_vector(m, "m")
    m2 = validate_unit_vector(m2, "m2")
    mu11, mu21, mu22 = mu_coefficients(geom.eta)
    p2 = 1.5 * float(np.dot(m, m2)) ** 2 - 0.5
    pair = (m, m2)
    quartic = _symmetrized_outer((0, 0, 0, 0), pair) + _symmetrized_outer(
        (1, 1, 1, 1), pair
    )
    mixed = _symmetrized_outer((0, 0, 1, 1), pair)
    scale = math.pi * geom.L**6 * geom.D
    return scale * (mu11 * quartic + (mu21 + mu22 * p2**2) * mixed)


@dataclass(frozen=True)
class MomentEstimate:
    """
    Monte Carlo estimate of a kernel moment.

    :param value (float or np.ndarray): estimate of the integral of G r...r.
    :param stderr (float or np.ndarray): standard error of each entry.
    :param n_samples (int): number of sampled offsets.
    :param seed (int): seed of the sampling streams.
    """

    value: object
    stderr: object
    n_samples: int
    seed: int

    def z_scores(self, reference):
        reference = np.asarray(reference, dtype=float)
        stderr = np.asarray(self.stderr, dtype=float)
        delta = np.asarray(self.value, dtype=float) - reference
        safe = np.where(stderr > 0, stderr, 1.0)
        return np.where(stderr > 0, delta / safe, np.where(delta == 0, 0.0, np.inf))


def _chunk_sums(m, m2, geom, order, n_chunk, seed_sequence):
    generator = np.random.Generator(np.random.Philox(seed_sequence))
    half_width = geom.L + geom.D
    r = generator.uniform(-half_width, half_width, size=(n_chunk, 3))
    hits = r[_overlap_mask(r, m, m2, geom)]
    if order == 0:
        count = float(hits.shape[0])
        return np.array(count), np.array(count)
    subscripts = ",".join(f"n{axis}" for axis in "ijkl"[:order])
    subscripts += "->" + "ijkl"[:order]
    sums = np.einsum(subscripts, *([hits] * order))
    squares = np.einsum(subscripts, *([hits**2] * order))
    return sums, squares


def moment_mc(m, m2, geom, order, n_samples, seed, workers=None):
    """
    Estimates the integral of G(r) r...r (order copies of r) by uniform sampling of r in
    the cube [-(L+D), L+D]^3. Samples are drawn in fixed-size chunks, each from its own
    Philox stream spawned from the seed, so the result does not depend on the worker
    count.
    """
    m = validate_unit_vector(m, "m")
    m2 = validate_unit_vector(m2, "m2")
    if not isinstance(order, int) or not 0 <= order <= MAX_MC_ORDER:
        handle_input_error(f"Monte Carlo moment order must lie in 0..{MAX_MC_ORDER}.")
    if not isinstance(n_samples, (int, np.integer)) or n_samples < 1:
        handle_input_error(f"n_samples must be a positive integer, got {n_samples}.")

    chunk_sizes = [MC_CHUNK_SIZE] * (n_samples // MC_CHUNK_SIZE)
    if n_samples % MC_CHUNK_SIZE:
        chunk_sizes.append(n_samples % MC_CHUNK_SIZE)
    streams = np.random.SeedSequence(seed).spawn(len(chunk_sizes))

    with ThreadPoolExecutor(max_workers=workers or get_worker_count()) as executor:
        results = list(
            executor.map(
                lambda args: _chunk_sums(m, m2, geom, order, *args),
                zip(chunk_sizes, streams),
            )
        )

    total = sum(result[0] for result in results)
    total_sq = sum(result[1] for result in results)
    volume = (2 * (geom.L + geom.D)) ** 3
    mean = total / n_samples
    variance = np.maximum(total_sq / n_samples - mean**2, 0.0)
    stderr = volume * np.sqrt(variance / max(n_samples - 1, 1))
    get_logger().debug(
        f"Monte Carlo order-{order} moment with {n_samples} samples, seed {seed}."
    )
    value = volume * mean
    if order == 0:
        return MomentEstimate(float(value), float(stderr), int(n_samples), seed)
    return MomentEstimate(value, stderr, int(n_samples), seed)
