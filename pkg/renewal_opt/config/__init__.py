from .config import (
    DEFAULTS,
    get_integer,
    get_numeric,
    get_tolerance,
    get_value,
    load_settings,
)
from .run_config import BoundInputSettings, RunConfig, SweepConfig

__all__ = [
    "DEFAULTS",
    "get_value",
    "get_numeric",
    "get_integer",
    "get_tolerance",
    "load_settings",
    "BoundInputSettings",
    "RunConfig",
    "SweepConfig",
]
