import os

from lcstat.lcstat_exceptions import LcstatConfigException


def get_boolean_value_for_env_var(env_var, default_value):
    return {"True": True, "true": True, "False": False, "false": False}.get(
        os.environ.get(env_var), default_value
    )


def get_int_value_for_env_var(env_var, default_value, min_value=None):
    """
    Reads an integer env var. Empty or missing values fall back to default_value,
    anything else must parse and respect min_value.
    """
    value = os.environ.get(env_var)
    if not value:
        return default_value
    try:
        parsed = int(value)
    except ValueError:
        raise LcstatConfigException(
            f'Env {env_var} must be an integer. Received: "{value}"'
        )
    if min_value is not None and parsed < min_value:
        raise LcstatConfigException(
            f"Env {env_var} must be at least {min_value}. Received: {parsed}"
        )
    return parsed


def get_float_value_for_env_var(env_var, default_value):
    value = os.environ.get(env_var)
    if not value:
        return default_value
    try:
        return float(value)
    except ValueError:
        raise LcstatConfigException(
            f'Env {env_var} must be a number. Received: "{value}"'
        )


def get_worker_count():
    """
    Number of workers for concurrent sweeps, capped by LCSTAT_THREADS.
    """
    return get_int_value_for_env_var(
        "LCSTAT_THREADS", default_value=os.cpu_count() or 1, min_value=1
    )


def parse_config_file(text):
    """
    Parses "key = value" lines into a dict of raw strings. Lines starting with "#"
    and blank lines are skipped; keys are normalized to snake_case.
    """
    config = {}
    for line_number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise LcstatConfigException(
                f'Config line {line_number} is not of the form "key = value": '
                f'"{raw_line}"'
            )
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise LcstatConfigException(f"Config line {line_number} has an empty key.")
        config[key.replace("-", "_").lower()] = value
    return config


def parse_float_list(value):
    """
    Accepts either a comma separated list or a "start:stop:count" linear range.
    """
    if isinstance(value, (list, tuple)):
        return [float(item) for item in value]
    text = str(value).strip()
    if not text:
        return []
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            count = int(count)
            if count == 1:
                return [float(start)]
            step = (float(stop) - float(start)) / (count - 1)
            return [float(start) + i * step for i in range(count)]
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError:
        raise LcstatConfigException(f'Cannot parse a list of numbers from "{text}".')
