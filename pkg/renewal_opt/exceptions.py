"""Error types raised across renewal_opt."""


class RenewalOptError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(RenewalOptError):
    """Invalid input to an operation (bad dimensions, out-of-table values)."""


class ModelError(ValidationError):
    """A renewal model is malformed: empty action list, bad probabilities, inconsistent means."""


class ConfigError(ValidationError):
    """A run or sweep configuration is invalid or cannot be read."""


class OracleError(RenewalOptError):
    """Internal failure of the offline solver (should not happen for well-formed instances)."""
