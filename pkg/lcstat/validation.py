"""
Precondition checks and error handlers shared by the lcstat modules. Every handler
logs the message before raising so that failures deep inside sweeps stay visible.
"""
import math
import numbers

import numpy as np

from lcstat.logger import get_logger
from lcstat.lcstat_util import get_boolean_value_for_env_var
from lcstat.lcstat_exceptions import (
    LcstatInputException,
    LcstatDomainException,
    LcstatConfigException,
    LcstatNumericException,
    LcstatOptimizationException,
    LcstatPhaseException,
)

UNIT_VECTOR_TOLERANCE = 1e-12

# When false, non-converged quadratures and solvers log a warning and hand back their
# best estimate instead of raising.
RAISE_NUMERIC_EXCEPTIONS = get_boolean_value_for_env_var(
    "LCSTAT_RAISE_NUMERIC_EXCEPTIONS", True
)


def handle_input_error(error_message):
    get_logger().error(f"Input error: {error_message}")
    raise LcstatInputException(error_message)


def handle_domain_error(error_message):
    get_logger().error(f"Domain error: {error_message}")
    raise LcstatDomainException(error_message)


def handle_config_error(error_message):
    get_logger().error(f"Config error: {error_message}")
    raise LcstatConfigException(error_message)


def handle_phase_error(error_message):
    get_logger().error(f"Phase error: {error_message}")
    raise LcstatPhaseException(error_message)


def handle_optimization_error(error_message):
    get_logger().error(f"Optimization error: {error_message}")
    raise LcstatOptimizationException(error_message)


def handle_numeric_error(error_message, estimate, should_raise_exception=None):
    """
    Logs a numeric failure and raises LcstatNumericException carrying the achieved
    estimate, unless raising is disabled, in which case the estimate is returned.
    """
    if should_raise_exception is None:
        should_raise_exception = RAISE_NUMERIC_EXCEPTIONS
    if should_raise_exception:
        get_logger().error(f"Numeric error: {error_message}")
        raise LcstatNumericException(error_message, estimate=estimate)
    get_logger().warning(f"Numeric error (continuing): {error_message}")
    return estimate


def _is_real(value):
    return isinstance(value, numbers.Real) and not isinstance(value, bool)


def validate_unit_vector(vector, name="m", exact=False):
    """
    Returns the vector as an array after checking it is a unit 3-vector. In exact mode
    the components may be Fractions and the squared norm must equal 1 exactly.
    """
    array = np.asarray(vector, dtype=object if exact else float)
    if array.shape != (3,):
        handle_input_error(f"{name} must be a 3-vector, got shape {array.shape}.")
    norm_sq = sum(component * component for component in array)
    if exact:
        if norm_sq != 1:
            handle_input_error(f"{name} must be a unit vector, |{name}|^2 = {norm_sq}.")
    elif not math.isfinite(norm_sq) or abs(math.sqrt(norm_sq) - 1.0) > (
        UNIT_VECTOR_TOLERANCE
    ):
        handle_input_error(f"{name} must be a unit vector, |{name}|^2 = {norm_sq}.")
    return array


def validate_eta(eta):
    if not (_is_real(eta) and 0.0 < eta <= 1.0):
        handle_input_error(f"eta must lie in (0, 1], got {eta}.")
    return float(eta)


def validate_positive(value, name):
    if not (_is_real(value) and math.isfinite(value) and value > 0):
        handle_input_error(f"{name} must be a positive number, got {value}.")
    return float(value)


def validate_in_range(value, low, high, name, closed=True):
    if not _is_real(value):
        handle_input_error(f"{name} must be a real number, got {value!r}.")
    inside = low <= value <= high if closed else low < value < high
    if not inside:
        left, right = ("[", "]") if closed else ("(", ")")
        handle_input_error(
            f"{name} must lie in {left}{low}, {high}{right}, got {value}."
        )
    return value
