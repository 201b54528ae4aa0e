"""
Renewal-system model interface.

A model describes one frame of the system: the i.i.d. random event observed at
the renewal, the finite action list for that event, the conditional
expectations (y_hat, t_hat, z_hat) for every (event, action) pair and a
sampler for the realized frame outcome (y, T, z).

An optional penalty shift y' = y + shift * T is applied here, below the
controller, so a model with negative penalties still has a nonnegative optimal
ratio. Everything a model returns is shifted; ``unshift_ratio`` recovers the
original objective.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from renewal_opt.config import DEFAULTS, get_tolerance
from renewal_opt.exceptions import ModelError
from renewal_opt.utils import as_vector

logger = logging.getLogger("renewal_opt.models")


@dataclass(frozen=True, eq=False)
class PerformanceTriple:
    """Conditional expectations of one (event, action) pair."""

    y_hat: float
    t_hat: float
    z_hat: np.ndarray

    def __post_init__(self):
        z = as_vector(self.z_hat, name="z_hat")
        z.setflags(write=False)
        object.__setattr__(self, "z_hat", z)
        if not self.t_hat >= 1:
            error_msg = f"t_hat must be >= 1 (frames last at least one slot), got {self.t_hat}"
            logger.error(error_msg)
            raise ModelError(error_msg)

    def __eq__(self, other):
        if not isinstance(other, PerformanceTriple):
            return NotImplemented
        return (
            self.y_hat == other.y_hat
            and self.t_hat == other.t_hat
            and np.array_equal(self.z_hat, other.z_hat)
        )


@dataclass(frozen=True)
class EventSample:
    """A random event: its index in the model's event list and a descriptive value."""

    index: int
    value: Any = None


class Outcome(NamedTuple):
    """Realized frame outcome."""

    y: float
    T: float
    z: np.ndarray


@dataclass(frozen=True)
class ExpectationTable:
    """All actions of one event with their expectations stacked as arrays."""

    actions: Tuple[int, ...]
    y_hat: np.ndarray      # (A_e,)
    t_hat: np.ndarray      # (A_e,)
    z_hat: np.ndarray      # (A_e, L)


class RenewalModel(ABC):
    """
    Base class for finite renewal models.

    Subclasses provide the event list, the per-event action lists and the raw
    (unshifted) expectations and samplers; this class applies the shift,
    validates event probabilities and caches per-event expectation tables.
    """

    name = "renewal-model"

    def __init__(self, c: Sequence[float]):
        self.c = as_vector(c, name="c")
        if np.any(self.c < 0):
            error_msg = f"constraint levels c must be nonnegative, got {self.c.tolist()}"
            logger.error(error_msg)
            raise ModelError(error_msg)
        self.c.setflags(write=False)
        self.shift = 0.0
        self._tables: Dict[int, ExpectationTable] = {}
        self._cdf: Optional[np.ndarray] = None

    # -- subclass hooks -------------------------------------------------

    @property
    @abstractmethod
    def events(self) -> Tuple[EventSample, ...]:
        """All events, indexed 0..E-1."""

    @property
    @abstractmethod
    def probabilities(self) -> np.ndarray:
        """Event probabilities aligned with ``events``."""

    @property
    @abstractmethod
    def action_labels(self) -> Tuple[Any, ...]:
        """Descriptive label for every action index."""

    @abstractmethod
    def actions(self, event: EventSample) -> Sequence[int]:
        """Action indices available for the event."""

    @abstractmethod
    def _raw_expectations(self, event: EventSample, action: int) -> PerformanceTriple:
        """Expectations before the penalty shift."""

    @abstractmethod
    def _raw_realize(self, event: EventSample, action: int, rng: np.random.Generator) -> Outcome:
        """One realized outcome before the penalty shift."""

    def _raw_frame_lengths(
        self, event: EventSample, action: int, rng: np.random.Generator, size: int
    ) -> np.ndarray:
        return np.array([self._raw_realize(event, action, rng).T for _ in range(size)])

    # -- public interface ------------------------------------------------

    @property
    def L(self) -> int:
        return len(self.c)

    @property
    def num_actions(self) -> int:
        return len(self.action_labels)

    def raw_expectations(self, event: EventSample, action: int) -> PerformanceTriple:
        """Expectations in the model's original units (no penalty shift)."""
        return self._raw_expectations(event, action)

    def expectations(self, event: EventSample, action: int) -> PerformanceTriple:
        raw = self._raw_expectations(event, action)
        if not self.shift:
            return raw
        return PerformanceTriple(raw.y_hat + self.shift * raw.t_hat, raw.t_hat, raw.z_hat)

    def realize(self, event: EventSample, action: int, rng: np.random.Generator) -> Outcome:
        outcome = self._raw_realize(event, action, rng)
        if outcome.T < 1:
            error_msg = f"{self.name}: realized T={outcome.T} < 1 for event {event.index}, action {action}"
            logger.error(error_msg)
            raise ModelError(error_msg)
        if not self.shift:
            return outcome
        return Outcome(outcome.y + self.shift * outcome.T, outcome.T, outcome.z)

    def expectation_table(self, event: EventSample) -> ExpectationTable:
        """Stacked expectations for every action of the event (cached)."""
        table = self._tables.get(event.index)
        if table is None:
            actions = tuple(self.actions(event))
            if not actions:
                error_msg = f"{self.name}: empty action list for event {event.index}"
                logger.error(error_msg)
                raise ModelError(error_msg)
            triples = [self.expectations(event, a) for a in actions]
            table = ExpectationTable(
                actions=actions,
                y_hat=np.array([t.y_hat for t in triples], dtype=np.float64),
                t_hat=np.array([t.t_hat for t in triples], dtype=np.float64),
                z_hat=np.array([t.z_hat for t in triples], dtype=np.float64).reshape(len(actions), self.L),
            )
            self._tables[event.index] = table
        return table

    def sample_event(self, rng: np.random.Generator) -> EventSample:
        cdf = self._event_cdf()
        idx = int(np.searchsorted(cdf, rng.random(), side="right"))
        return self.events[min(idx, len(cdf) - 1)]

    def sample_events(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized event sampling; returns event indices."""
        cdf = self._event_cdf()
        idx = np.searchsorted(cdf, rng.random(size), side="right")
        return np.minimum(idx, len(cdf) - 1)

    def sample_frame_lengths(
        self, event: EventSample, action: int, rng: np.random.Generator, size: int
    ) -> np.ndarray:
        """Draw ``size`` independent frame lengths for a fixed (event, action)."""
        return self._raw_frame_lengths(event, action, rng, size)

    def pairs(self) -> List[Tuple[EventSample, int]]:
        """Every (event, action) pair of the model."""
        return [(e, a) for e in self.events for a in self.actions(e)]

    def max_ratio(self) -> float:
        """Largest y_hat / t_hat over all pairs (shifted)."""
        return max(self.expectations(e, a).y_hat / self.expectations(e, a).t_hat for e, a in self.pairs())

    def default_theta_max(self, factor: float = DEFAULTS["THETA_MAX_FACTOR"]) -> float:
        """
        Default truncation ceiling: factor times the largest per-pair ratio.

        Every stationary policy's ratio is a weighted mean of per-pair ratios,
        so the optimum lies below the largest one.
        """
        ratio = self.max_ratio()
        if ratio <= 0:
            logger.warning(
                f"{self.name}: largest y_hat/t_hat is {ratio}; using theta_max = 1.0"
            )
            return 1.0
        return factor * ratio

    def unshift_ratio(self, ratio: float) -> float:
        return ratio - self.shift

    def _apply_shift(self, shift: Union[float, str, None]) -> None:
        """
        Fix the penalty shift y' = y + shift * T. Subclass constructors call
        this once, after their tables are in place; models do not change after
        construction.

        ``"auto"`` picks the smallest shift making every per-pair ratio
        nonnegative, which is enough for the optimal ratio to be nonnegative.
        """
        if shift is None:
            value = 0.0
        elif shift == "auto":
            value = max(
                0.0,
                -min(
                    self.raw_expectations(e, a).y_hat / self.raw_expectations(e, a).t_hat
                    for e, a in self.pairs()
                ),
            )
        else:
            value = float(shift)
        self.shift = value
        if value:
            logger.info(f"{self.name}: penalty shift {value}")

    def _event_cdf(self) -> np.ndarray:
        if self._cdf is None:
            self._cdf = np.cumsum(self.probabilities)
        return self._cdf

    def _validate_probabilities(self) -> None:
        probs = np.asarray(self.probabilities, dtype=np.float64)
        tol = get_tolerance("PROBABILITY_TOL")
        if len(probs) == 0:
            raise ModelError(f"{self.name}: event list is empty")
        if np.any(probs < 0) or np.any(probs > 1):
            error_msg = f"{self.name}: event probabilities must lie in [0, 1], got {probs.tolist()}"
            logger.error(error_msg)
            raise ModelError(error_msg)
        if abs(float(np.sum(probs)) - 1.0) > tol:
            error_msg = f"{self.name}: event probabilities sum to {float(np.sum(probs))!r}, not 1"
            logger.error(error_msg)
            raise ModelError(error_msg)

