"""
File-downloading model.

A single user downloads files over a time-varying channel. At every return to
the active state the user observes the channel quality omega and a delay
weight s, then picks a service level alpha. The file completes in that slot
with probability phi = alpha * omega; once it completes the device idles for a
geometric number of slots (idle -> active with probability LAMBDA per slot).
A renewal frame is the time between consecutive visits to the active state,
so exactly one decision is taken per frame.
"""

import logging
from typing import Any, Tuple

import numpy as np

from renewal_opt.config.run_config import PENALTY_MODES, REALIZATIONS
from renewal_opt.exceptions import ModelError, ValidationError
from renewal_opt.models.base import EventSample, Outcome, PerformanceTriple, RenewalModel

logger = logging.getLogger("renewal_opt.models.file_download")

OMEGA_VALUES = (0.2, 0.5, 0.8)          # channel states, equiprobable
S_VALUES = (1.0, 3.0, 5.0)              # delay weights, equiprobable
ACTION_VALUES = (0.0, 0.3, 0.6, 0.9)    # service levels
POWER_LEVELS = (0.0, 1.0, 2.0, 4.0)     # p(alpha), aligned with ACTION_VALUES
LAMBDA = 0.5                            # idle -> active probability per slot
C = (1.0,)                              # average power budget


def _power(alpha: float) -> float:
    return POWER_LEVELS[ACTION_VALUES.index(alpha)]


def _check_inputs(event: Tuple[float, float], alpha: float) -> Tuple[float, float, float]:
    try:
        omega, s = (float(v) for v in event)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"file-download event must be a pair (omega, s), got {event!r}") from e
    alpha = float(alpha)
    if omega not in OMEGA_VALUES or s not in S_VALUES or alpha not in ACTION_VALUES:
        error_msg = (
            f"file-download inputs out of table: omega={omega}, s={s}, alpha={alpha} "
            f"(omega in {OMEGA_VALUES}, s in {S_VALUES}, alpha in {ACTION_VALUES})"
        )
        logger.error(error_msg)
        raise ValidationError(error_msg)
    return omega, s, alpha


def success_probability(alpha: float, omega: float) -> float:
    """phi(alpha, omega) = alpha * omega."""
    return alpha * omega


def fd_expectations(event: Tuple[float, float], alpha: float, penalty: str = "delay") -> PerformanceTriple:
    """
    Expected (penalty, frame length, power) of one frame.

    The penalty is alpha * s (negated under ``penalty="reward"``) and is
    deterministic given the pair; E[T] = 1 + phi / LAMBDA = 1 + 2 * alpha * omega.
    """
    omega, s, alpha = _check_inputs(event, alpha)
    sign = -1.0 if penalty == "reward" else 1.0
    phi = success_probability(alpha, omega)
    return PerformanceTriple(
        y_hat=sign * alpha * s,
        t_hat=1.0 + phi / LAMBDA,
        z_hat=np.array([_power(alpha)]),
    )


def fd_realize(
    event: Tuple[float, float],
    alpha: float,
    rng: np.random.Generator,
    penalty: str = "delay",
    realization: str = "geometric",
) -> Outcome:
    """
    Realize one frame.

    With probability 1 - phi the file is still active next slot and T = 1;
    otherwise T = 1 + G with G the idle period, geometric on {1, 2, ...} with
    success probability LAMBDA. ``realization="chain"`` steps the two-state
    active/idle chain slot by slot instead of drawing G in closed form.
    """
    omega, s, alpha = _check_inputs(event, alpha)
    sign = -1.0 if penalty == "reward" else 1.0
    phi = success_probability(alpha, omega)

    if realization == "chain":
        T = _chain_frame_length(phi, rng)
    else:
        completed = rng.random() < phi
        T = 1.0 + float(rng.geometric(LAMBDA)) if completed else 1.0

    return Outcome(y=sign * alpha * s, T=T, z=np.array([_power(alpha)]))


def _chain_frame_length(phi: float, rng: np.random.Generator) -> float:
    # slot 0 is active; a renewal is the next slot that finds the chain active
    slots = 1
    if rng.random() >= phi:
        return float(slots)
    while True:
        slots += 1
        if rng.random() < LAMBDA:
            return float(slots)


class FileDownloadModel(RenewalModel):
    """
    The two-state file-downloading MDP reduced to one decision per frame.

    Events enumerate the 9 (omega, s) combinations row-major, omega outer.
    """

    name = "file_download"

    def __init__(self, penalty: str = "delay", realization: str = "geometric", shift=None):
        super().__init__(C)
        if penalty not in PENALTY_MODES:
            raise ModelError(f"penalty must be one of {PENALTY_MODES}, got {penalty!r}")
        if realization not in REALIZATIONS:
            raise ModelError(f"realization must be one of {REALIZATIONS}, got {realization!r}")
        self.penalty = penalty
        self.realization = realization
        self._events = tuple(
            EventSample(index=i * len(S_VALUES) + j, value=(omega, s))
            for i, omega in enumerate(OMEGA_VALUES)
            for j, s in enumerate(S_VALUES)
        )
        n = len(self._events)
        self._probs = np.full(n, 1.0 / n)
        self._validate_probabilities()
        self._apply_shift(shift)

    @property
    def events(self) -> Tuple[EventSample, ...]:
        return self._events

    @property
    def probabilities(self) -> np.ndarray:
        return self._probs

    @property
    def action_labels(self) -> Tuple[Any, ...]:
        return ACTION_VALUES

    def actions(self, event: EventSample):
        return range(len(ACTION_VALUES))

    def event(self, omega: float, s: float) -> EventSample:
        """Look up the event for a (omega, s) pair."""
        omega, s, _ = _check_inputs((omega, s), 0.0)
        return self._events[OMEGA_VALUES.index(omega) * len(S_VALUES) + S_VALUES.index(s)]

    def _raw_expectations(self, event: EventSample, action: int) -> PerformanceTriple:
        return fd_expectations(event.value, ACTION_VALUES[action], self.penalty)

    def _raw_realize(self, event: EventSample, action: int, rng: np.random.Generator) -> Outcome:
        return fd_realize(event.value, ACTION_VALUES[action], rng, self.penalty, self.realization)

    def _raw_frame_lengths(self, event, action, rng, size):
        if self.realization == "chain":
            return super()._raw_frame_lengths(event, action, rng, size)
        omega, _ = event.value
        phi = success_probability(ACTION_VALUES[action], omega)
        completed = rng.random(size) < phi
        idle = rng.geometric(LAMBDA, size)
        return 1.0 + np.where(completed, idle, 0).astype(np.float64)
