"""
One-dimensional smectic-A model.

The density c(x) and the order density c(x) S2(x) are even Fourier series of period d
(lengths in units of L):

    c(x)       = 1 + sum_{n=1..n1} u_n cos(2 n pi x / d)
    c(x) S2(x) =     sum_{n=0..n2} v_n cos(2 n pi x / d)

so the mean density is fixed to 1. The orientational entropy is evaluated pointwise on
an equispaced collocation grid through the uniaxial Bingham closure, c S4 is projected
back onto its first n3 + 1 modes, and every derivative term of the energy is a
diagonal quadratic form in the mode amplitudes. The energy per unit length is
minimized over (u, v) at fixed d by preconditioned steepest descent and over d by a
bounded scalar search.
"""
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.fft import dct
from scipy.optimize import minimize_scalar

from lcstat.bingham import (
    ds2_dr,
    ds4_dr,
    get_spline_cache,
    log_partition,
    r_from_s2,
    s4_from_r,
)
from lcstat.logger import get_logger
from lcstat.lcstat_exceptions import LcstatException
from lcstat.lcstat_util import get_int_value_for_env_var
from lcstat.nematic_model import equilibrium_branches
from lcstat.validation import (
    handle_domain_error,
    handle_input_error,
    handle_optimization_error,
    validate_eta,
    validate_positive,
)

PHASE_ISOTROPIC = "isotropic"
PHASE_NEMATIC = "nematic"
PHASE_SMECTIC = "smectic-A"

# Higher-order couplings used for the layered phase diagram at eta = 0.1.
TUNED_HIGHER_ORDER = 0.00089

DEFAULT_MODES = (8, 8, 8)
DEFAULT_D_RANGE = (1.0, 2.5)
GRID_OVERSAMPLING = 4
PERIOD_TOLERANCE = 1e-4

# Accepted profiles keep every collocation value inside these bounds.
S2_LOWER_BOUND = -0.49
S2_UPPER_BOUND = 0.99

MAX_DESCENT_ITERATIONS = get_int_value_for_env_var(
    "LCSTAT_SMECTIC_MAX_ITERATIONS", 2000, min_value=1
)
GRADIENT_TOLERANCE = 1e-10
ENERGY_TOLERANCE = 1e-14
ARMIJO_FRACTION = 1e-4
INITIAL_STEP = 1.0
MAX_STEP = 4.0
MIN_STEP = 1e-12

SINGLE_MODE_AMPLITUDES = (0.1, 0.25)
RANDOM_PERTURBATION = 1e-3


@dataclass(frozen=True)
class SmecticCoefficients:
    """
    Coefficients of the one-dimensional energy functional at a given eta.

    :param N31 (float): weight of (c'')^2; must be positive.
    :param N32 (float): weight of ((c S2)'')^2; must be positive.
    """

    eta: float
    N11: float
    N12: float
    N13: float
    N21: float
    N22: float
    N23: float
    N24: float
    N25: float
    N31: float
    N32: float

    def as_dict(self):
        return {
            name: getattr(self, name)
            for name in (
                "N11", "N12", "N13", "N21", "N22", "N23", "N24", "N25", "N31", "N32"
            )
        }


def smectic_N(eta, n31=None, n32=None):
    """
    Evaluates the coefficient formulas at eta. n31 and n32 override the printed
    second-derivative weights (see tuned_coefficients).
    """
    eta = validate_eta(eta)
    ln2 = math.log(2.0)
    N31 = 11 / 57600 + 13 * eta / 5400 if n31 is None else validate_positive(n31, "N31")
    N32 = 107 / 451584 + eta / 216 if n32 is None else validate_positive(n32, "N32")
    return SmecticCoefficients(
        eta=eta,
        N11=0.5 + 2 * eta + 4 * eta**2 / 3,
        N12=-5 / 16,
        N13=-9 / 128,
        N21=1 / 72 + eta / 9 + 5 * eta**2 / 18 + eta**3 / 3 + 2 * eta**4 / 15,
        N22=-55 / 4032 - (432 * ln2 - 367) * eta**2 / 4704,
        N23=(365 - 2048 * ln2) * eta**2 / 12544,
        N24=7 / 288 + 2 * eta / 9 + 7 * eta**2 / 18 + eta**3 / 6,
        N25=-1 / 112 - (12 * ln2 - 10) * eta**2 / 49,
        N31=N31,
        N32=N32,
    )


def tuned_coefficients(eta=0.1):
    return smectic_N(eta, TUNED_HIGHER_ORDER, TUNED_HIGHER_ORDER)


@dataclass(frozen=True)
class ProfileGrid:
    """
    Collocation values of a profile and the spectra of c S4 (w, modes 0..n3) and of
    the entropy integrand ln c + (2/3) r S2 - ln Z (t, modes 0..n1).
    """

    x: np.ndarray
    c: np.ndarray
    S2: np.ndarray
    r: np.ndarray
    S4: np.ndarray
    w: np.ndarray
    t: np.ndarray


@dataclass(frozen=True, eq=False)
class SmecticProfile:
    """
    A periodic profile in the cosine basis.

    :param d (float): the period in units of L.
    :param u (np.ndarray): density amplitudes of modes 1..n1 (mode 0 is fixed to 1).
    :param v (np.ndarray): amplitudes of c S2 for modes 0..n2.
    :param n3 (int): number of modes kept in the projection of c S4.
    :param shift (float): translation of the whole profile along x.
    """

    d: float
    u: np.ndarray
    v: np.ndarray
    n3: int
    shift: float = 0.0

    def __post_init__(self):
        validate_positive(self.d, "d")
        u = np.atleast_1d(np.asarray(self.u, dtype=float))
        v = np.atleast_1d(np.asarray(self.v, dtype=float))
        if u.ndim != 1 or u.size < 1 or v.ndim != 1 or v.size < 2:
            handle_input_error(
                "A profile needs at least one density and one order mode."
            )
        if int(self.n3) < 1:
            handle_input_error(f"n3 must be at least 1, got {self.n3}.")
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "n3", int(self.n3))

    @property
    def n_modes(self):
        return self.u.size, self.v.size - 1, self.n3

    @property
    def modulation(self):
        return float(np.max(np.abs(self.u)))

    def grid_size(self, n_points=None):
        n_max = max(self.n_modes)
        if n_points is None:
            return GRID_OVERSAMPLING * n_max
        if n_points % 2 or n_points < 2 * n_max + 2:
            handle_input_error(
                f"n_points must be even and at least {2 * n_max + 2}, got {n_points}."
            )
        return int(n_points)

    def with_period(self, d):
        return replace(self, d=d)

    def resized(self, n_modes):
        """
        Truncates or zero-pads the amplitudes to n_modes = (n1, n2, n3).
        """
        n1, n2, n3 = n_modes
        u = np.zeros(n1)
        v = np.zeros(n2 + 1)
        u[: min(n1, self.u.size)] = self.u[:n1]
        v[: min(n2 + 1, self.v.size)] = self.v[: n2 + 1]
        return replace(self, u=u, v=v, n3=n3)

    def collocation(self, n_points=None):
        """
        Returns the grid x and the values of c and c S2 on it.
        """
        basis = _Basis(self, self.grid_size(n_points))
        return basis.x, basis.density(self), basis.order_density(self)

    def is_feasible(self, n_points=None):
        _, c, p = self.collocation(n_points)
        if np.any(c <= 0):
            return False
        S2 = p / c
        return bool(np.all((S2 > S2_LOWER_BOUND) & (S2 < S2_UPPER_BOUND)))

    def mean_s2(self, n_points=None):
        _, c, p = self.collocation(n_points)
        return float(np.mean(p / c))

    def on_grid(self, n_points=None, exact=False):
        if self.shift:
            handle_input_error("Spectra are only defined for untranslated profiles.")
        M = self.grid_size(n_points)
        x, c, p = self.collocation(M)
        _check_feasible(x, c, p)
        S2 = p / c
        if exact:
            r = np.array([r_from_s2(value) for value in S2])
            S4 = np.array([s4_from_r(value) for value in r])
            phi = 2.0 * r * S2 / 3 - np.array([log_partition(value) for value in r])
        else:
            cache = get_spline_cache()
            r, S4, phi = cache.r(S2), cache.s4(S2), cache.phi(S2)
        n1, _, n3 = self.n_modes
        return ProfileGrid(
            x=x,
            c=c,
            S2=S2,
            r=r,
            S4=S4,
            w=even_spectrum(c * S4, n3),
            t=even_spectrum(np.log(c) + phi, n1),
        )


def even_spectrum(values, n_modes):
    """
    Cosine amplitudes a_0..a_n of an even periodic sequence sampled at x_j = j d / M,
    from a type-I DCT of the half period.
    """
    values = np.asarray(values, dtype=float)
    M = values.size
    spectrum = dct(values[: M // 2 + 1], type=1)[: n_modes + 1] / M
    spectrum[1:] *= 2.0
    return spectrum


def homogeneous_profile(S2=0.0, d=1.5, n_modes=DEFAULT_MODES):
    n1, n2, n3 = n_modes
    v = np.zeros(n2 + 1)
    v[0] = S2
    return SmecticProfile(d=d, u=np.zeros(n1), v=v, n3=n3)


def single_mode_profile(amplitude, S2=0.0, d=1.5, n_modes=DEFAULT_MODES):
    """
    Density wave of the first mode with the order density modulated in phase.
    """
    profile = homogeneous_profile(S2, d, n_modes)
    profile.u[0] = amplitude
    profile.v[1] = amplitude * S2
    return profile


def translate_profile(profile, shift):
    return replace(profile, shift=profile.shift + shift)


class _Basis:
    """
    Mode and grid tables for one (profile layout, grid size) pair. The profile is
    expanded in cos(k_n (x - shift)); projections use the plain cos/sin basis.
    """

    def __init__(self, profile, n_points):
        n1, n2, n3 = profile.n_modes
        self.n_modes = (n1, n2, n3)
        self.n_max = max(n1, n2, n3)
        self.M = n_points
        self.k = 2.0 * math.pi * np.arange(self.n_max + 1) / profile.d
        self.x = profile.d * np.arange(n_points) / n_points
        phases = np.outer(self.k, self.x)
        self.cos = np.cos(phases)
        self.sin = np.sin(phases)
        self.rot_cos = np.cos(self.k * profile.shift)
        self.rot_sin = np.sin(self.k * profile.shift)
        self.shifted = (
            self.cos * self.rot_cos[:, None] + self.sin * self.rot_sin[:, None]
        )
        # Parseval weights: mean of cos^2 is 1/2 for n >= 1.
        self.parseval = np.full(self.n_max + 1, 0.5)
        self.parseval[0] = 1.0
        self.projection = np.full(self.n_max + 1, 2.0 / n_points)
        self.projection[0] = 1.0 / n_points

    def padded(self, values, start):
        out = np.zeros(self.n_max + 1)
        out[start : start + values.size] = values
        return out

    def density(self, profile):
        return 1.0 + profile.u @ self.shifted[1 : profile.u.size + 1]

    def order_density(self, profile):
        return profile.v @ self.shifted[: profile.v.size]


def _spline_closure(S2):
    cache = get_spline_cache()
    return cache.phi(S2), cache.phi(S2, 1), cache.s4(S2), cache.s4(S2, 1)


def _exact_closure(S2):
    r = np.array([r_from_s2(value) for value in S2])
    phi = 2.0 * r * S2 / 3 - np.array([log_partition(value) for value in r])
    s4 = np.array([s4_from_r(value) for value in r])
    ds4 = np.array([ds4_dr(value) / ds2_dr(value) for value in r])
    return phi, 2.0 * r / 3, s4, ds4


def _check_feasible(x, c, p):
    bad = np.flatnonzero(c <= 0)
    if bad.size:
        j = bad[0]
        handle_domain_error(f"Density c = {c[j]} is not positive at x = {x[j]}.")
    S2 = p / c
    bad = np.flatnonzero((S2 <= S2_LOWER_BOUND) | (S2 >= S2_UPPER_BOUND))
    if bad.size:
        j = bad[0]
        handle_domain_error(
            f"S2 = {S2[j]} at x = {x[j]} is outside "
            f"({S2_LOWER_BOUND}, {S2_UPPER_BOUND})."
        )


def _evaluate(profile, alpha, coeffs, n_points, closure, with_gradient):
    basis = _Basis(profile, profile.grid_size(n_points))
    n1, n2, n3 = basis.n_modes
    c = basis.density(profile)
    p = basis.order_density(profile)
    _check_feasible(basis.x, c, p)
    S2 = p / c
    phi, dphi, s4, ds4 = closure(S2)

    q = c * s4
    w_cos = basis.padded(basis.projection[: n3 + 1] * (basis.cos[: n3 + 1] @ q), 0)
    w_sin = basis.padded(basis.projection[: n3 + 1] * (basis.sin[: n3 + 1] @ q), 0)
    w_sin[0] = 0.0

    U = basis.padded(profile.u, 1)
    V = basis.padded(profile.v, 0)
    V_cos, V_sin = V * basis.rot_cos, V * basis.rot_sin
    pw, k2 = basis.parseval, basis.k**2
    k4 = k2**2
    W2 = w_cos**2 + w_sin**2

    quadratic = (
        coeffs.N11 * (1.0 + pw @ U**2)
        + coeffs.N12 * (pw @ V**2)
        + coeffs.N13 * (pw @ W2)
        - coeffs.N21 * (pw * k2 @ U**2)
        - coeffs.N22 * (pw * k2 @ V**2)
        - coeffs.N23 * (pw * k2 @ W2)
        - coeffs.N24 * (pw * k2 @ (U * V))
        - coeffs.N25 * (pw * k2 @ (V_cos * w_cos + V_sin * w_sin))
        + coeffs.N31 * (pw * k4 @ U**2)
        + coeffs.N32 * (pw * k4 @ V**2)
    )
    entropy = float(np.mean(c * (np.log(c) + phi)))
    energy = entropy + 0.5 * alpha * quadratic
    if not with_gradient:
        return energy

    half = 0.5 * alpha
    dU = 2 * pw * (coeffs.N11 - coeffs.N21 * k2 + coeffs.N31 * k4) * U
    dU -= coeffs.N24 * pw * k2 * V
    dV = 2 * pw * (coeffs.N12 - coeffs.N22 * k2 + coeffs.N32 * k4) * V
    dV -= coeffs.N24 * pw * k2 * U
    dV -= coeffs.N25 * pw * k2 * (basis.rot_cos * w_cos + basis.rot_sin * w_sin)
    w_weight = 2 * pw * (coeffs.N13 - coeffs.N23 * k2)
    dw_cos = (w_weight * w_cos - coeffs.N25 * pw * k2 * V_cos)[: n3 + 1]
    dw_sin = (w_weight * w_sin - coeffs.N25 * pw * k2 * V_sin)[: n3 + 1]
    dw_sin[0] = 0.0
    projection = basis.projection[: n3 + 1]
    dq = half * (
        (dw_cos * projection) @ basis.cos[: n3 + 1]
        + (dw_sin * projection) @ basis.sin[: n3 + 1]
    )

    # Envelope property: d/dS2 of the pointwise entropy is (2/3) r.
    dc = (np.log(c) + 1.0 + phi - S2 * dphi) / basis.M + dq * (s4 - S2 * ds4)
    dp = dphi / basis.M + dq * ds4
    grad_u = basis.shifted[1 : n1 + 1] @ dc + half * dU[1 : n1 + 1]
    grad_v = basis.shifted[: n2 + 1] @ dp + half * dV[: n2 + 1]
    return energy, grad_u, grad_v


def smectic_energy(profile, alpha, coeffs, n_points=None, exact=False):
    """
    Energy per unit length in k_BT units.

    :param exact (bool): invert the closure by direct quadrature at every collocation
        point instead of reading the spline cache.
    """
    closure = _exact_closure if exact else _spline_closure
    return _evaluate(profile, alpha, coeffs, n_points, closure, False)


def smectic_energy_and_gradient(profile, alpha, coeffs, n_points=None):
    """
    Energy together with its gradient with respect to u (modes 1..n1) and v (modes
    0..n2), both taken through the spline closure.
    """
    return _evaluate(profile, alpha, coeffs, n_points, _spline_closure, True)


def _preconditioner(profile, alpha, coeffs, n_points):
    """
    Diagonal estimate of the energy Hessian in (u, v) at the starting profile.
    """
    basis = _Basis(profile, profile.grid_size(n_points))
    n1, n2, _ = basis.n_modes
    c = basis.density(profile)
    S2 = basis.order_density(profile) / c
    curvature = get_spline_cache().phi(S2, 2) / c
    k2 = basis.k**2
    k4 = k2**2
    pw = basis.parseval
    half = 0.5 * alpha
    h_u = pw * (1.0 + np.mean(S2**2 * curvature)) + half * 2 * pw * np.abs(
        coeffs.N11 - coeffs.N21 * k2 + coeffs.N31 * k4
    )
    h_v = pw * np.mean(curvature) + half * 2 * pw * np.abs(
        coeffs.N12 - coeffs.N22 * k2 + coeffs.N32 * k4
    )
    return h_u[1 : n1 + 1], h_v[: n2 + 1]


@dataclass(frozen=True)
class DescentResult:
    """
    :param energies (tuple): energy after every accepted step, starting with the
        initial profile; nonincreasing.
    """

    profile: SmecticProfile
    energy: float
    iterations: int
    converged: bool
    energies: tuple = field(repr=False)


def descend_profile(
    profile, alpha, coeffs, n_points=None, max_iterations=MAX_DESCENT_ITERATIONS
):
    """
    Preconditioned steepest descent over (u, v) at the fixed period of profile, with
    a backtracking line search that halves the step until the trial profile is
    feasible and satisfies the sufficient-decrease condition.
    """
    energy, grad_u, grad_v = smectic_energy_and_gradient(
        profile, alpha, coeffs, n_points
    )
    h_u, h_v = _preconditioner(profile, alpha, coeffs, n_points)
    energies = [energy]
    step = INITIAL_STEP
    converged = False
    iteration = 0
    for iteration in range(1, max_iterations + 1):
        direction_u, direction_v = -grad_u / h_u, -grad_v / h_v
        slope = float(grad_u @ direction_u + grad_v @ direction_v)
        if math.sqrt(max(-slope, 0.0)) < GRADIENT_TOLERANCE:
            converged = True
            break
        while step >= MIN_STEP:
            trial = replace(
                profile,
                u=profile.u + step * direction_u,
                v=profile.v + step * direction_v,
            )
            if trial.is_feasible(n_points):
                trial_energy = smectic_energy(trial, alpha, coeffs, n_points)
                if trial_energy <= energy + ARMIJO_FRACTION * step * slope:
                    break
            step /= 2
        else:
            get_logger().debug(
                f"Line search stalled at d={profile.d} after {iteration} iterations."
            )
            converged = True
            break
        previous = energy
        profile = trial
        energy, grad_u, grad_v = smectic_energy_and_gradient(
            profile, alpha, coeffs, n_points
        )
        energies.append(energy)
        step = min(2 * step, MAX_STEP)
        if previous - energy <= ENERGY_TOLERANCE * (1.0 + abs(energy)):
            converged = True
            break
    if not converged:
        get_logger().warning(
            f"Descent at d={profile.d}, alpha={alpha} stopped after {iteration} "
            f"iterations without converging."
        )
    return DescentResult(profile, energy, iteration, converged, tuple(energies))


def _is_homogeneous(profile):
    return not np.any(profile.u) and not np.any(profile.v[1:])


def _minimize_over_period(start, alpha, coeffs, d_range, n_points):
    """
    Bounded scalar search over d, warm-starting each descent from the solution at
    the closest period evaluated so far.
    """
    solutions = {}

    def energy_at(d):
        if solutions:
            nearest = min(solutions, key=lambda known: abs(known - d))
            initial = solutions[nearest].profile.with_period(d)
        else:
            initial = start.with_period(d)
        result = descend_profile(initial, alpha, coeffs, n_points)
        solutions[d] = result
        get_logger().debug(f"alpha={alpha}, d={d}: energy {result.energy}")
        return result.energy

    minimize_scalar(
        energy_at,
        bounds=d_range,
        method="bounded",
        options={"xatol": PERIOD_TOLERANCE},
    )
    return min(solutions.values(), key=lambda result: result.energy)


def _initial_profiles(alpha, n_modes, d, seed):
    nematic = equilibrium_branches(alpha).preferred_nematic()
    S2 = min(nematic.S2, S2_UPPER_BOUND - 0.02) if nematic is not None else 0.5
    starts = [("isotropic", homogeneous_profile(0.0, d, n_modes))]
    if nematic is not None:
        starts.append(("nematic", homogeneous_profile(S2, d, n_modes)))
    generator = np.random.Generator(np.random.Philox(seed))
    for amplitude in SINGLE_MODE_AMPLITUDES:
        profile = single_mode_profile(amplitude, S2, d, n_modes)
        noise_u = RANDOM_PERTURBATION * generator.standard_normal(profile.u.size)
        noise_v = RANDOM_PERTURBATION * generator.standard_normal(profile.v.size)
        profile = replace(profile, u=profile.u + noise_u, v=profile.v + noise_v)
        starts.append((f"single-mode {amplitude}", profile))
    return starts


def minimize_profile(
    alpha,
    eta,
    coeffs=None,
    n_modes=DEFAULT_MODES,
    d_range=DEFAULT_D_RANGE,
    seed=0,
    warm_start=None,
    n_points=None,
):
    """
    Minimizes the energy per unit length over profiles and periods.

    Every initialization (homogeneous isotropic, homogeneous nematic, perturbed
    single-mode density waves and the optional warm start) is descended, and the
    lowest final energy wins. Homogeneous starts stay homogeneous under descent, so
    they are solved at a single period. The returned energy is re-evaluated with the
    exact closure.

    :return: (SmecticProfile, energy)
    """
    alpha = validate_positive(alpha, "alpha")
    eta = validate_eta(eta)
    coeffs = smectic_N(eta) if coeffs is None else coeffs
    if len(n_modes) != 3 or min(n_modes) < 1:
        handle_input_error(f"n_modes must hold three counts >= 1, got {n_modes}.")
    low, high = (validate_positive(value, "d") for value in d_range)
    if low >= high:
        handle_input_error(f"d_range must be increasing, got {d_range}.")
    d_mid = 0.5 * (low + high)

    starts = _initial_profiles(alpha, n_modes, d_mid, seed)
    if warm_start is not None:
        starts.append(("warm start", warm_start.resized(n_modes)))

    best = None
    for name, start in starts:
        if not start.is_feasible(n_points):
            get_logger().warning(f"alpha={alpha}: {name} start is infeasible, skipped.")
            continue
        try:
            if _is_homogeneous(start):
                result = descend_profile(start, alpha, coeffs, n_points)
            else:
                result = _minimize_over_period(
                    start, alpha, coeffs, (low, high), n_points
                )
        except LcstatException as e:
            get_logger().warning(f"alpha={alpha}: {name} start failed: {e}")
            continue
        get_logger().debug(f"alpha={alpha}: {name} start reached {result.energy}")
        if best is None or result.energy < best.energy:
            best = result
    if best is None:
        handle_optimization_error(
            f"Every initialization at alpha={alpha}, eta={eta} left the feasible set."
        )
    energy = smectic_energy(best.profile, alpha, coeffs, n_points, exact=True)
    return best.profile, energy


def classify_phase(profile, tol_density=1e-4, tol_order=1e-4):
    if profile.modulation > tol_density:
        return PHASE_SMECTIC
    if profile.mean_s2() > tol_order:
        return PHASE_NEMATIC
    return PHASE_ISOTROPIC


@dataclass(frozen=True)
class PhasePoint:
    """
    One point of a phase-diagram sweep.

    :param d (float): the layer period, None unless the phase is smectic-A.
    :param amplitudes (tuple): the density amplitudes u_1..u_n1.
    :param error (str): the failure message when the point could not be solved, in
        which case phase and energy are None.
    """

    alpha: float
    eta: float
    phase: str = None
    d: float = None
    energy: float = None
    mean_S2: float = None
    amplitudes: tuple = ()
    error: str = None
    profile: SmecticProfile = field(default=None, repr=False)


def phase_diagram(
    alpha_grid,
    eta,
    coeffs=None,
    n_modes=DEFAULT_MODES,
    d_range=DEFAULT_D_RANGE,
    seed=0,
    n_points=None,
):
    """
    Minimizes along alpha_grid in order, passing each minimizer on as a warm start
    to the next point. Failed points are recorded and the sweep continues.
    """
    alpha_grid = list(alpha_grid)
    if not alpha_grid:
        handle_input_error("phase_diagram needs a nonempty alpha grid.")
    coeffs = smectic_N(eta) if coeffs is None else coeffs
    points = []
    warm_start = None
    for alpha in alpha_grid:
        try:
            profile, energy = minimize_profile(
                alpha, eta, coeffs, n_modes, d_range, seed, warm_start, n_points
            )
        except LcstatException as e:
            points.append(PhasePoint(alpha=alpha, eta=eta, error=str(e)))
            continue
        phase = classify_phase(profile)
        points.append(
            PhasePoint(
                alpha=alpha,
                eta=eta,
                phase=phase,
                d=profile.d if phase == PHASE_SMECTIC else None,
                energy=energy,
                mean_S2=profile.mean_s2(n_points),
                amplitudes=tuple(float(value) for value in profile.u),
                profile=profile,
            )
        )
        get_logger().info(f"eta={eta}, alpha={alpha}: {phase}, energy {energy}")
        warm_start = profile
    return points
