"""
Run and sweep configuration.

Both configs are plain frozen dataclasses built from JSON mappings (or CLI
arguments) through ``from_mapping``; every invariant is checked there so the
rest of the package can trust a constructed config.
"""

import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Dict, Mapping, Optional, Tuple, Union

from renewal_opt.config.config import (
    DEFAULTS,
    SEED_LIMIT,
    get_integer,
    get_numeric,
    get_value,
)
from renewal_opt.exceptions import ConfigError

logger = logging.getLogger("renewal_opt.config")

PENALTY_MODES = ("delay", "reward")
REALIZATIONS = ("geometric", "chain")
MODEL_ALIASES = {"file": "file_download", "file_download": "file_download"}


@dataclass(frozen=True)
class BoundInputSettings:
    """Exponential-type and slackness constants fed to the diagnostics."""

    eta: float = DEFAULTS["ETA"]
    B: float = DEFAULTS["B"]
    xi: float = DEFAULTS["XI"]


@dataclass(frozen=True)
class RunConfig:
    model: str = "file_download"
    frames: int = DEFAULTS["FRAMES"]
    V: float = DEFAULTS["V"]
    delta: float = DEFAULTS["DELTA"]
    theta_max: Union[float, str] = "auto"
    seed: int = DEFAULTS["SEED"]
    output: Optional[str] = None
    diagnostics: bool = False
    record: bool = False
    bound_inputs: Optional[BoundInputSettings] = None
    slots: Optional[int] = None
    penalty: str = "delay"
    realization: str = "geometric"
    shift: Union[float, str, None] = None
    eps0: float = DEFAULTS["EPSILON_0"]

    def __post_init__(self):
        validate_run_config(self)

    @classmethod
    def from_mapping(cls, settings: Optional[Mapping[str, Any]]) -> "RunConfig":
        """Build a RunConfig from a parsed JSON object, falling back to DEFAULTS."""
        settings = settings or {}
        model = str(get_value(settings, "model", "file_download"))
        theta_max = get_value(settings, "theta_max", "auto")
        if theta_max != "auto":
            theta_max = get_numeric(settings, "theta_max")
        shift = get_value(settings, "shift")
        if shift is not None and shift != "auto":
            shift = get_numeric(settings, "shift")
        slots = get_value(settings, "slots")
        if slots is not None:
            slots = get_integer(settings, "slots")

        bound_inputs = None
        raw_bounds = get_value(settings, "bound_inputs")
        if raw_bounds:
            if not isinstance(raw_bounds, Mapping):
                raise ConfigError("Field 'bound_inputs' must be an object with eta, B, xi")
            bound_inputs = BoundInputSettings(
                eta=get_numeric(raw_bounds, "eta", "ETA"),
                B=get_numeric(raw_bounds, "B", "B"),
                xi=get_numeric(raw_bounds, "xi", "XI"),
            )

        return cls(
            model=model,
            frames=get_integer(settings, "frames", "FRAMES"),
            V=get_numeric(settings, "V", "V"),
            delta=get_numeric(settings, "delta", "DELTA"),
            theta_max=theta_max,
            seed=get_integer(settings, "seed", "SEED"),
            output=get_value(settings, "output"),
            diagnostics=bool(get_value(settings, "diagnostics", False)),
            record=bool(get_value(settings, "record", False)),
            bound_inputs=bound_inputs,
            slots=slots,
            penalty=str(get_value(settings, "penalty", "delay")),
            realization=str(get_value(settings, "realization", "geometric")),
            shift=shift,
            eps0=get_numeric(settings, "eps0", "EPSILON_0"),
        )

    def with_point(self, V: float, delta: float, seed: int) -> "RunConfig":
        """Copy of this config at one sweep point."""
        return replace(self, V=float(V), delta=float(delta), seed=int(seed))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def validate_run_config(config: RunConfig) -> None:
    """Check RunConfig invariants, raising ConfigError naming the offending field."""
    problems = []
    if isinstance(config.frames, bool) or not isinstance(config.frames, int) or config.frames < 1:
        problems.append(f"frames must be a positive integer, got {config.frames!r}")
    elif config.frames > DEFAULTS["MAX_FRAMES"]:
        problems.append(f"frames must be at most {DEFAULTS['MAX_FRAMES']}, got {config.frames}")
    if not config.V > 0:
        problems.append(f"V must be positive, got {config.V!r}")
    if not 0 < config.delta <= 1.5:
        problems.append(f"delta must lie in (0, 1.5], got {config.delta!r}")
    if config.theta_max != "auto" and not (
        isinstance(config.theta_max, (int, float)) and config.theta_max > 0
    ):
        problems.append(f"theta_max must be positive or 'auto', got {config.theta_max!r}")
    if not isinstance(config.seed, int) or not 0 <= config.seed < SEED_LIMIT:
        problems.append(f"seed must be a 64-bit unsigned integer, got {config.seed!r}")
    if config.slots is not None and config.slots < 1:
        problems.append(f"slots must be a positive integer, got {config.slots!r}")
    if config.penalty not in PENALTY_MODES:
        problems.append(f"penalty must be one of {PENALTY_MODES}, got {config.penalty!r}")
    if config.realization not in REALIZATIONS:
        problems.append(f"realization must be one of {REALIZATIONS}, got {config.realization!r}")
    if config.shift is not None and config.shift != "auto" and not isinstance(config.shift, (int, float)):
        problems.append(f"shift must be a number, 'auto' or null, got {config.shift!r}")
    if not config.eps0 > 0:
        problems.append(f"eps0 must be positive, got {config.eps0!r}")
    if config.bound_inputs is not None:
        bi = config.bound_inputs
        if not (bi.eta > 0 and bi.B > 0 and bi.xi > 0):
            problems.append(f"bound_inputs must be strictly positive, got {bi}")
    if not (config.model in MODEL_ALIASES or config.model.startswith("synthetic:")):
        problems.append(f"model must be 'file_download' or 'synthetic:<path>', got {config.model!r}")

    if problems:
        error_msg = "Invalid run config: " + "; ".join(problems)
        logger.error(error_msg)
        raise ConfigError(error_msg)


@dataclass(frozen=True)
class SweepConfig:
    base: RunConfig
    V_list: Tuple[float, ...]
    delta_list: Tuple[float, ...]
    replications: int = DEFAULTS["REPLICATIONS"]
    parallelism: int = DEFAULTS["PARALLELISM"]
    common_random_numbers: bool = DEFAULTS["COMMON_RANDOM_NUMBERS"]

    def __post_init__(self):
        problems = []
        if not self.V_list:
            problems.append("V_list must be nonempty")
        if not self.delta_list:
            problems.append("delta_list must be nonempty")
        if self.replications < 1:
            problems.append(f"replications must be >= 1, got {self.replications}")
        if self.parallelism < 1:
            problems.append(f"parallelism must be >= 1, got {self.parallelism}")
        if problems:
            error_msg = "Invalid sweep config: " + "; ".join(problems)
            logger.error(error_msg)
            raise ConfigError(error_msg)
        # every grid point must itself be a valid run
        for V in self.V_list:
            for delta in self.delta_list:
                self.base.with_point(V, delta, self.base.seed)

    @classmethod
    def from_mapping(cls, settings: Mapping[str, Any]) -> "SweepConfig":
        base_settings = get_value(settings, "base", {}) or {}
        if not isinstance(base_settings, Mapping):
            raise ConfigError("Field 'base' must be an object")
        return cls(
            base=RunConfig.from_mapping(base_settings),
            V_list=_number_list(settings, "V_list"),
            delta_list=_number_list(settings, "delta_list"),
            replications=get_integer(settings, "replications", "REPLICATIONS"),
            parallelism=get_integer(settings, "parallelism", "PARALLELISM"),
            common_random_numbers=_flag(settings, "common_random_numbers", "COMMON_RANDOM_NUMBERS"),
        )


def _flag(settings: Mapping[str, Any], fieldname: str, default_key: str) -> bool:
    value = get_value(settings, fieldname, DEFAULTS[default_key])
    if not isinstance(value, bool):
        error_msg = f"Field '{fieldname}' must be true or false, got {value!r}"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return value


def _number_list(settings: Mapping[str, Any], fieldname: str) -> Tuple[float, ...]:
    values = get_value(settings, fieldname)
    if not isinstance(values, list):
        error_msg = f"Field '{fieldname}' must be a list of numbers"
        logger.error(error_msg)
        raise ConfigError(error_msg)
    return tuple(get_numeric({fieldname: v}, fieldname) for v in values)
