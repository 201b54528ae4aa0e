import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from renewal_opt.exceptions import ConfigError

# Define all defaults in one place for better maintenance
DEFAULTS = {
    "FRAMES": 200_000,            # frames per run (desk scale)
    "V": 100.0,                   # tradeoff parameter
    "DELTA": 0.7,                 # pseudo-average exponent
    "THETA_MAX_FACTOR": 1.5,      # theta_max = factor * max y_hat/t_hat
    "SEED": 0,                    # master seed, 64-bit unsigned
    "REPLICATIONS": 5,            # runs per sweep point
    "PARALLELISM": 1,             # worker processes for sweeps
    "COMMON_RANDOM_NUMBERS": False,  # one seed per replication across the whole grid
    "FEASIBILITY_TOL": 1e-9,      # simplex primal feasibility / phase-1 objective
    "OPTIMALITY_TOL": 1e-9,       # simplex reduced cost
    "PROBABILITY_TOL": 1e-12,     # probability vectors must sum to 1 within this
    "MEAN_TOL": 1e-9,             # declared vs recomputed synthetic means
    "ETA": 0.3,                   # exponential-type exponent (file model)
    "B": math.e,                  # exponential-type bound (file model)
    "XI": 1.0,                    # slack (file model: all-idle policy has ratio 0, c = 1)
    "EPSILON_0": 0.1,             # hitting-time target offset, target = theta* + eps0 / V
    "MAX_FRAMES": 2 ** 31,        # documented limit on frame count
    "SIMPLEX_MAX_ITER": 50_000,   # pivot guard
}

SEED_LIMIT = 2 ** 64

# Logger for consistent logging
logger = logging.getLogger("renewal_opt.config")


def load_settings(path: str) -> Dict[str, Any]:
    """
    Load a JSON settings file.

    Raises:
        ConfigError: the file is missing, unreadable or not a JSON object
    """
    file_path = Path(path)
    if not file_path.exists():
        error_msg = f"Config file not found: {file_path}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    try:
        with open(file_path, "r") as f:
            data = json.load(f)
    except (OSError, ValueError) as e:
        error_msg = f"Error loading {file_path}: {str(e)}"
        logger.error(error_msg)
        raise ConfigError(error_msg) from e
    if not isinstance(data, dict):
        error_msg = f"Config file {file_path} must contain a JSON object"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return data


def get_value(settings: Optional[Mapping[str, Any]], fieldname: str, default=None):
    """
    Helper to fetch a field value from a settings mapping.
    """
    if not settings:
        return default
    return settings.get(fieldname, default)


def get_numeric(settings: Optional[Mapping[str, Any]], fieldname: str, default_key: str = None) -> float:
    """
    Helper to fetch a numeric value from settings with proper fallback and logging.

    Args:
        settings: Parsed JSON settings (may be None)
        fieldname: The key in the settings mapping
        default_key: The key in DEFAULTS dictionary to use if setting is not found

    Returns:
        float: The numeric value from settings or default

    Raises:
        ConfigError: the value is present but not numeric, or absent with no default
    """
    value = get_value(settings, fieldname)
    default = DEFAULTS.get(default_key) if default_key else None

    if value is None or value == "":
        if default is None:
            error_msg = f"Field '{fieldname}' is required"
            logger.error(error_msg)
            raise ConfigError(error_msg)
        logger.info(f"Field '{fieldname}' not set. Using default: {default}")
        return float(default)

    if isinstance(value, bool):
        error_msg = f"Field '{fieldname}' must be numeric, got {value!r}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    try:
        number = float(value)
    except (TypeError, ValueError):
        error_msg = f"Field '{fieldname}' must be numeric, got {value!r}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    if not math.isfinite(number):
        error_msg = f"Field '{fieldname}' must be finite, got {value!r}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return number


def get_integer(settings: Optional[Mapping[str, Any]], fieldname: str, default_key: str = None) -> int:
    """Like get_numeric, but the value must be integral."""
    value = get_value(settings, fieldname)
    # exact path for large ints (64-bit seeds do not survive a float round trip)
    if isinstance(value, int) and not isinstance(value, bool):
        return value
    number = get_numeric(settings, fieldname, default_key)
    if number != int(number):
        error_msg = f"Field '{fieldname}' must be an integer, got {number}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return int(number)


def get_tolerance(name: str) -> float:
    """Return a numerical tolerance from DEFAULTS (e.g. 'FEASIBILITY_TOL'), read at call time."""
    if not name.endswith("_TOL") or name not in DEFAULTS:
        error_msg = f"Unknown tolerance '{name}'"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return float(DEFAULTS[name])
