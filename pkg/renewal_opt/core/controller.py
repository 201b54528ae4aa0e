"""
Online renewal controller.

Per frame n the controller observes the event, picks the action minimizing the
drift-plus-penalty score

    V * (y_hat - theta * t_hat) + sum_l Q_l * (z_hat_l - c_l * t_hat),

then, from the realized (y, T, z), updates the trimmed pseudo average theta and
the virtual queues Q. Both updates consume the frame-n values of theta and Q,
so theta is updated first.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Optional, Tuple

import numpy as np

from renewal_opt.exceptions import ModelError, ValidationError
from renewal_opt.models.base import EventSample, PerformanceTriple, RenewalModel
from renewal_opt.utils import as_vector, check_length

logger = logging.getLogger("renewal_opt.core")


@dataclass(frozen=True, eq=False)
class ControllerState:
    """
    Full algorithm state of one run.

    ``D`` is the running sum of the theta-update summands of frames 0..n-1 and
    ``theta`` equals clip(D / n**delta) for n >= 1 (0 at n = 0).
    """

    n: int
    Q: np.ndarray
    theta: float
    D: float
    V: float
    delta: float
    theta_max: float
    c: np.ndarray

    @property
    def L(self) -> int:
        return len(self.c)

    def theta_hat(self) -> float:
        """Un-clipped pseudo average D / n**delta (0 before the first frame)."""
        return pseudo_average(self.D, self.n, self.delta)

    def check_invariants(self) -> None:
        """Raise ValidationError if a state invariant is broken."""
        if np.any(self.Q < 0):
            raise ValidationError(f"negative queue backlog at frame {self.n}: {self.Q.tolist()}")
        if not 0 <= self.theta <= self.theta_max:
            raise ValidationError(f"theta={self.theta} outside [0, {self.theta_max}] at frame {self.n}")
        if self.n >= 1 and self.theta != clip_theta(self.theta_hat(), self.theta_max):
            raise ValidationError(f"theta and D disagree at frame {self.n}")


@dataclass(frozen=True, eq=False)
class FrameRecord:
    """Realized outcome of one frame plus the post-update state snapshot."""

    n: int
    event_id: int
    action_id: int
    y: float
    T: float
    z: np.ndarray
    summand: float
    Q_after: np.ndarray
    theta_after: float
    D_after: float

    def key(self) -> Tuple[Any, ...]:
        """Hashable, exactly comparable view of the record."""
        return (
            self.n,
            self.event_id,
            self.action_id,
            self.y,
            self.T,
            tuple(self.z.tolist()),
            self.summand,
            tuple(self.Q_after.tolist()),
            self.theta_after,
            self.D_after,
        )


def new_state(model: RenewalModel, V: float, delta: float, theta_max: float) -> ControllerState:
    """Initial state: empty queues, theta[0] = 0, D = 0."""
    if not V > 0:
        raise ValidationError(f"V must be positive, got {V}")
    if not delta > 0:
        raise ValidationError(f"delta must be positive, got {delta}")
    if not theta_max > 0:
        raise ValidationError(f"theta_max must be positive, got {theta_max}")
    return ControllerState(
        n=0,
        Q=np.zeros(model.L),
        theta=0.0,
        D=0.0,
        V=float(V),
        delta=float(delta),
        theta_max=float(theta_max),
        c=np.array(model.c, dtype=np.float64),
    )


def pseudo_average(D: float, n: int, delta: float) -> float:
    """D / n**delta, with the empty average at n = 0 taken as 0."""
    if n <= 0:
        return 0.0
    return D / math.pow(n, delta)


def clip_theta(x: float, theta_max: float) -> float:
    """Ceil and floor x into [0, theta_max]."""
    if x > theta_max:
        return theta_max
    if x < 0:
        return 0.0
    return x


def dpp_score(state: ControllerState, perf: PerformanceTriple) -> float:
    """V * (y_hat - theta * t_hat) + sum_l Q_l * (z_hat_l - c_l * t_hat)."""
    check_length(perf.z_hat, state.L, "z_hat", "dpp_score")
    drift = float(np.dot(state.Q, perf.z_hat - state.c * perf.t_hat))
    return state.V * (perf.y_hat - state.theta * perf.t_hat) + drift


def select_action(state: ControllerState, event: EventSample, model: RenewalModel) -> int:
    """
    Action index minimizing dpp_score over the event's action list.

    Ties go to the lowest action index.
    """
    table = model.expectation_table(event)
    if not table.actions:
        error_msg = f"{model.name}: empty action list for event {event.index}"
        logger.error(error_msg)
        raise ModelError(error_msg)
    if table.z_hat.shape[1] != state.L:
        error_msg = (
            f"{model.name}: model has L={table.z_hat.shape[1]} resources, controller has L={state.L}"
        )
        logger.error(error_msg)
        raise ValidationError(error_msg)
    scores = state.V * (table.y_hat - state.theta * table.t_hat) + (
        table.z_hat - np.outer(table.t_hat, state.c)
    ) @ state.Q
    # argmin returns the first minimizer; actions are listed in increasing index
    return table.actions[int(np.argmin(scores))]


def update_queues(Q: np.ndarray, z: np.ndarray, T: float, c: np.ndarray) -> np.ndarray:
    """Q_l <- max(Q_l + z_l - c_l * T, 0)."""
    check_length(z, len(Q), "z", "update_queues")
    check_length(c, len(Q), "c", "update_queues")
    return np.maximum(Q + z - c * T, 0.0)


def update_theta(state: ControllerState, y: float, T: float, z: np.ndarray) -> Tuple[float, float, float]:
    """
    Fold one frame into the pseudo average.

    Returns (new D, new theta, summand) where
    summand = y - theta[n] * T + (1/V) * sum_l Q_l[n] * (z_l - c_l * T),
    D' = D + summand and theta[n+1] = clip(D' / (n+1)**delta).
    """
    check_length(z, state.L, "z", "update_theta")
    summand = y - state.theta * T + float(np.dot(state.Q, z - state.c * T)) / state.V
    D = state.D + summand
    theta = clip_theta(pseudo_average(D, state.n + 1, state.delta), state.theta_max)
    return D, theta, summand


def step(
    state: ControllerState, model: RenewalModel, rng: np.random.Generator
) -> Tuple[ControllerState, FrameRecord]:
    """Run one frame: observe, decide, realize, update theta, update queues."""
    # 1. observe the random event
    event = model.sample_event(rng)
    # 2. decide
    action = select_action(state, event, model)
    # 3. realize
    y, T, z = model.realize(event, action, rng)
    z = as_vector(z, name="z")
    # 4. theta first: it needs the frame-n queues
    D, theta, summand = update_theta(state, y, T, z)
    # 5. queues
    Q = update_queues(state.Q, z, T, state.c)

    new = ControllerState(
        n=state.n + 1,
        Q=Q,
        theta=theta,
        D=D,
        V=state.V,
        delta=state.delta,
        theta_max=state.theta_max,
        c=state.c,
    )
    record = FrameRecord(
        n=state.n,
        event_id=event.index,
        action_id=action,
        y=float(y),
        T=float(T),
        z=z,
        summand=summand,
        Q_after=Q,
        theta_after=theta,
        D_after=D,
    )
    return new, record


def run_frames(
    state: ControllerState,
    model: RenewalModel,
    rng: np.random.Generator,
    frames: int,
    slots: Optional[float] = None,
):
    """
    Yield (state, record) for up to ``frames`` frames.

    With a slot budget the loop also stops once the realized frame lengths add
    up to at least ``slots``.
    """
    elapsed = 0.0
    for _ in range(frames):
        state, record = step(state, model, rng)
        elapsed += record.T
        yield state, record
        if slots is not None and elapsed >= slots:
            break
