"""
Symmetric traceless tensors built from a unit vector, the symmetrized products they are
made of, Legendre polynomials and the expansion coefficients of the hard-core kernel.

Symmetric tensors are stored by canonical multi-index (sorted index tuples); the full
3^k array is produced on demand. Every builder also runs in an exact mode where the
vector components are fractions.Fraction and the arrays hold Python objects, which is
how the combinatorial identities are checked without rounding.
"""
import math
from fractions import Fraction
from dataclasses import dataclass, field
from itertools import (
    combinations,
    combinations_with_replacement,
    permutations,
    product,
)

import numpy as np
from cachetools import LRUCache, cached

from lcstat.logger import get_logger
from lcstat.validation import (
    validate_eta,
    handle_input_error,
    handle_numeric_error,
    validate_unit_vector,
)

MAX_SIGMA_ORDER = 4
MAX_LEGENDRE_DEGREE = 6
QUADRATURE_START_NODES = 16
QUADRATURE_MAX_NODES = 512
LEGENDRE_PROJECTION_TOLERANCE = 1e-10

# Leading coefficients of P_n, so that P_n(m.m') = b_n Xi_n(m) : Xi_n(m').
LEADING_LEGENDRE_COEFFICIENTS = {
    1: Fraction(1),
    2: Fraction(3, 2),
    3: Fraction(5, 2),
    4: Fraction(35, 8),
}


def canonical_indices(order):
    return list(combinations_with_replacement(range(3), order))


def index_multiplicity(index):
    """
    Number of distinct permutations of a canonical multi-index.
    """
    count = math.factorial(len(index))
    for axis in range(3):
        count //= math.factorial(index.count(axis))
    return count


@dataclass(frozen=True)
class TracelessTensor:
    """
    A fully symmetric tensor of order 1 to 4 in canonical storage.

    :param order (int): tensor order k.
    :param components (np.ndarray): one entry per canonical multi-index, in the order
        given by canonical_indices(k) (6 entries for k=2, 15 for k=4).
    """

    order: int
    components: np.ndarray = field(repr=False)

    def full(self):
        dtype = self.components.dtype
        array = np.zeros((3,) * self.order, dtype=dtype)
        if dtype == object:
            array[...] = Fraction(0)
        for value, index in zip(self.components, canonical_indices(self.order)):
            for permutation in set(permutations(index)):
                array[permutation] = value
        return array

    @classmethod
    def from_full(cls, array):
        array = np.asarray(array)
        order = array.ndim
        components = np.array(
            [array[index] for index in canonical_indices(order)], dtype=array.dtype
        )
        return cls(order=order, components=components)

    def double_dot(self, other):
        """
        Full contraction over every index, computed on canonical storage.
        """
        if self.order != other.order:
            handle_input_error(
                f"Cannot contract tensors of order {self.order} and {other.order}."
            )
        weights = [index_multiplicity(i) for i in canonical_indices(self.order)]
        return sum(
            w * a * b for w, a, b in zip(weights, self.components, other.components)
        )

    def scaled(self, factor):
        return TracelessTensor(self.order, self.components * factor)

    def max_pair_trace(self):
        """
        Largest absolute entry over all pair-contractions of the tensor.
        """
        if self.order < 2:
            return 0.0
        full = self.full()
        return max(
            float(np.max(np.abs(np.asarray(contract(full, i, j), dtype=float))))
            for i, j in combinations(range(self.order), 2)
        )


def contract(array, i=0, j=1):
    """
    Contracts the index pair (i, j) of a full array; works on object arrays too.
    """
    if i == j:
        handle_input_error("Contraction needs two distinct indices.")
    i, j = sorted((i, j))
    return sum(
        np.take(np.take(array, a, axis=j), a, axis=i) for a in range(3)
    )


def sigma_terms(k, l):
    """
    The distinct index layouts of sigma(k, 2l): a list of (m_slots, delta_pairs).
    Their number is (k+2l)! / (k! l! 2^l).
    """
    if k < 0 or l < 0 or k + 2 * l > MAX_SIGMA_ORDER:
        handle_input_error(
            f"sigma tensors are supported for k, l >= 0 and k + 2l <= "
            f"{MAX_SIGMA_ORDER}, got k={k}, l={l}."
        )
    slots = tuple(range(k + 2 * l))
    layouts = []
    for delta_slots in combinations(slots, 2 * l):
        m_slots = tuple(s for s in slots if s not in delta_slots)
        for pairing in _perfect_matchings(delta_slots):
            layouts.append((m_slots, pairing))
    return layouts


def _perfect_matchings(slots):
    if not slots:
        return [()]
    first, rest = slots[0], slots[1:]
    matchings = []
    for position, partner in enumerate(rest):
        remaining = rest[:position] + rest[position + 1 :]
        for matching in _perfect_matchings(remaining):
            matchings.append(((first, partner),) + matching)
    return matchings


def sigma_term_count(k, l):
    return math.factorial(k + 2 * l) // (
        math.factorial(k) * math.factorial(l) * 2**l
    )


def sigma_tensor(m, k, l, exact=False):
    """
    Symmetrized product of k copies of m and l Kronecker deltas, as a full array of
    order k + 2l. In exact mode m holds Fractions and the result is an object array.
    """
    terms = sigma_terms(k, l)
    order = k + 2 * l
    m = np.asarray(m, dtype=object if exact else float)
    zero = Fraction(0) if exact else 0.0
    if order == 0:
        return np.array(Fraction(len(terms)) if exact else float(len(terms)))
    array = np.empty((3,) * order, dtype=object if exact else float)
    for index in product(range(3), repeat=order):
        total = zero
        for m_slots, pairs in terms:
            if any(index[a] != index[b] for a, b in pairs):
                continue
            value = Fraction(1) if exact else 1.0
            for slot in m_slots:
                value = value * m[index[slot]]
            total = total + value
        array[index] = total
    return array


def delta_sym(matrix):
    """
    (d_ij A_kl)_sym over the six index pairings for a symmetric 3x3 matrix A. With
    A = mm this is sigma(m, 2, 1).
    """
    delta = np.eye(3)
    return (
        np.einsum("ij,kl->ijkl", delta, matrix)
        + np.einsum("ik,jl->ijkl", delta, matrix)
        + np.einsum("il,jk->ijkl", delta, matrix)
        + np.einsum("jk,il->ijkl", delta, matrix)
        + np.einsum("jl,ik->ijkl", delta, matrix)
        + np.einsum("kl,ij->ijkl", delta, matrix)
    )


def xi_coefficients(k, exact=False):
    """
    Weights of sigma(k-2j, 2j) in Xi_k, j = 0, 1, 2, ...
    """
    weights = []
    weight = Fraction(1)
    for j in range(k // 2 + 1):
        weights.append(weight if exact else float(weight))
        weight = -weight / (2 * k - 1 - 2 * j)
    return weights


def xi_tensor(k, m, exact=False):
    """
    The k-th order symmetric traceless tensor Xi_k(m) for a unit vector m.
    """
    if k not in (1, 2, 3, 4):
        handle_input_error(f"xi_tensor supports orders 1 to 4, got {k}.")
    m = validate_unit_vector(m, exact=exact)
    full = None
    for j, weight in enumerate(xi_coefficients(k, exact=exact)):
        term = sigma_tensor(m, k - 2 * j, j, exact=exact) * weight
        full = term if full is None else full + term
    return TracelessTensor.from_full(full)


def legendre_power_coefficients(n):
    """
    Power-basis coefficients of P_n (index = power of x), as exact rationals, from
    P_n(x) = sum_k (-1)^k (2n-2k-1)!! / ((n-2k)! k! 2^k) x^(n-2k).
    """
    if not 0 <= n <= MAX_LEGENDRE_DEGREE:
        handle_input_error(f"Legendre degree must lie in [0, {MAX_LEGENDRE_DEGREE}].")
    coefficients = [Fraction(0)] * (n + 1)
    for k in range(n // 2 + 1):
        double_factorial = math.prod(range(2 * n - 2 * k - 1, 0, -2))
        coefficients[n - 2 * k] = Fraction(
            (-1) ** k * double_factorial,
            math.factorial(n - 2 * k) * math.factorial(k) * 2**k,
        )
    return coefficients


def legendre_P(n, x):
    x_array = np.asarray(x, dtype=float)
    if np.any(np.abs(x_array) > 1.0):
        handle_input_error(f"Legendre argument must lie in [-1, 1], got {x}.")
    coefficients = [float(c) for c in legendre_power_coefficients(n)]
    value = np.polynomial.polynomial.polyval(x_array, coefficients)
    return float(value) if np.ndim(value) == 0 else value


@cached(cache=LRUCache(maxsize=32))
def gauss_legendre_nodes(n_nodes):
    nodes, weights = np.polynomial.legendre.leggauss(n_nodes)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre_integrate(
    f,
    a,
    b,
    atol=LEGENDRE_PROJECTION_TOLERANCE,
    rtol=0.0,
    start_nodes=QUADRATURE_START_NODES,
    max_nodes=QUADRATURE_MAX_NODES,
):
    """
    Integrates a vectorized f over [a, b], doubling the Gauss-Legendre node count until
    two successive estimates agree within max(atol, rtol * |estimate|). f may return
    an (n_nodes, k) array, in which case all k integrals are taken together and the
    largest entry drives convergence.
    """
    half_width, center = 0.5 * (b - a), 0.5 * (b + a)

    def estimate(n_nodes):
        nodes, weights = gauss_legendre_nodes(n_nodes)
        return half_width * np.dot(weights, f(center + half_width * nodes))

    previous = estimate(start_nodes)
    n_nodes = start_nodes
    while n_nodes < max_nodes:
        n_nodes *= 2
        current = estimate(n_nodes)
        change = np.max(np.abs(current - previous))
        if change <= max(atol, rtol * np.max(np.abs(current))):
            return current
        previous = current
    return handle_numeric_error(
        f"Gauss-Legendre quadrature did not converge with {max_nodes} nodes on "
        f"[{a}, {b}]; last estimate {previous}.",
        estimate=previous,
    )


def legendre_project(f, n):
    """
    Legendre coefficient a_n = (2n+1)/2 * integral_{-1}^{1} f(x) P_n(x) dx.

    The integral is taken in theta with x = cos(theta), so square-root endpoint
    singularities become smooth integrands.
    """
    if not 0 <= n <= MAX_LEGENDRE_DEGREE:
        handle_input_error(f"Projection degree must lie in [0, {MAX_LEGENDRE_DEGREE}].")

    def integrand(theta):
        x = np.cos(theta)
        return f(x) * legendre_P(n, np.clip(x, -1.0, 1.0)) * np.sin(theta)

    integral = gauss_legendre_integrate(integrand, 0.0, math.pi)
    return 0.5 * (2 * n + 1) * integral


def arcsin_over_x(x):
    x = np.asarray(x, dtype=float)
    safe = np.where(x == 0.0, 1.0, x)
    return np.where(x == 0.0, 1.0, np.arcsin(np.clip(safe, -1.0, 1.0)) / safe)


def legendre_coefficient_table():
    """
    Legendre coefficients of the special functions appearing in the kernel moments,
    keyed by (function name, degree).
    """
    pi, ln2 = math.pi, math.log(2.0)
    return {
        ("sqrt_one_minus_x2", 0): pi / 4,
        ("sqrt_one_minus_x2", 2): -5 * pi / 32,
        ("sqrt_one_minus_x2", 4): -9 * pi / 256,
        ("inverse_sqrt_one_minus_x2", 0): pi / 2,
        ("inverse_sqrt_one_minus_x2", 2): 5 * pi / 8,
        ("arcsin_over_x", 0): pi * ln2 / 2,
        ("arcsin_over_x", 2): 5 * pi / 16 * (3 - 4 * ln2),
    }


LEGENDRE_TABLE_FUNCTIONS = {
    "sqrt_one_minus_x2": lambda x: np.sqrt(np.clip(1.0 - x * x, 0.0, None)),
    "inverse_sqrt_one_minus_x2": lambda x: 1.0 / np.sqrt(1.0 - x * x),
    "arcsin_over_x": arcsin_over_x,
}


@dataclass(frozen=True)
class ExpansionCoefficients:
    """
    Coefficients of the Legendre expansion of the hard-core kernel moments at a given
    aspect ratio.

    :param eta (float): aspect ratio D/L.
    :param alpha (dict): (i, j) -> alpha_ij for the seven second-moment coefficients.
    :param mu11 (float), mu21 (float), mu22 (float): fourth-moment coefficients.
    :param legendre_table (dict): see legendre_coefficient_table().
    :param b (dict): n -> leading Legendre coefficient b_n, n = 1..4.
    """

    eta: float
    alpha: dict
    mu11: float
    mu21: float
    mu22: float
    legendre_table: dict
    b: dict


def alpha_coefficients(eta):
    ln2 = math.log(2.0)
    eta2, eta3, eta4 = eta**2, eta**3, eta**4
    return {
        (1, 1): eta2 / 6 + eta3 / 2 + 4 * eta4 / 15,
        (1, 2): -(2 * eta2 / 3) * (5 / 32),
        (1, 3): -(2 * eta2 / 3) * (9 / 256),
        (2, 1): 1 / 24 + eta * (1 + 2 * eta) / 3 + eta3 / 4,
        (2, 2): -5 / 192 + 5 * eta2 / 12,
        (3, 1): eta2 * (ln2 / 3 - 1 / 3),
        (3, 2): eta2 * (5 / 24 - 5 * ln2 / 6),
    }


def mu_coefficients(eta):
    return 1 / 160 + 3 * eta / 40, 1 / 288 + eta / 24, -5 / 2304


@cached(cache=LRUCache(maxsize=256))
def expansion_coefficients(eta):
    eta = validate_eta(eta)
    mu11, mu21, mu22 = mu_coefficients(eta)
    get_logger().debug(f"Computed expansion coefficients for eta={eta}.")
    return ExpansionCoefficients(
        eta=eta,
        alpha=alpha_coefficients(eta),
        mu11=mu11,
        mu21=mu21,
        mu22=mu22,
        legendre_table=legendre_coefficient_table(),
        b={n: float(value) for n, value in LEADING_LEGENDRE_COEFFICIENTS.items()},
    )
