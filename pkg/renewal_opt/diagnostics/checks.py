"""Property checks over a recorded run. Each returns a violation count or an error size."""

import logging
import math
from typing import Optional, Sequence

import numpy as np

from renewal_opt.core.controller import ControllerState, dpp_score
from renewal_opt.diagnostics.series import RecordSeries
from renewal_opt.exceptions import ValidationError
from renewal_opt.models.base import RenewalModel

logger = logging.getLogger("renewal_opt.diagnostics")


def queue_norm_increment_violations(series: RecordSeries, tol: float = 1e-9) -> int:
    """Frames where ||Q[n+1]|| - ||Q[n]|| exceeds K[n]."""
    K = series.K
    growth = np.linalg.norm(series.Q_after, axis=1) - series.q_norm
    return int(np.count_nonzero(growth - K > tol * np.maximum(1.0, K)))


def trim_violations(series: RecordSeries) -> int:
    """Frames with a negative backlog or theta outside [0, theta_max]."""
    bad_q = np.any(series.Q_after < 0, axis=1)
    bad_theta = (series.theta_after < 0) | (series.theta_after > series.theta_max)
    return int(np.count_nonzero(bad_q | bad_theta))


def equivalence_violations(series: RecordSeries, frames: Sequence[int], levels: Sequence[float]) -> int:
    """
    For paired (frame n, level x) with x in (0, theta_max), count pairs where
    theta[n] and the un-clipped theta_hat[n] fall on different sides of x.
    """
    frames = np.asarray(frames, dtype=np.int64)
    levels = np.asarray(levels, dtype=np.float64)
    if frames.shape != levels.shape:
        raise ValidationError("frames and levels must pair up one to one")
    if np.any((frames < 0) | (frames > series.N)):
        raise ValidationError(f"frame index outside [0, {series.N}]")
    theta = series.theta()[frames]
    theta_hat = series.theta_hat()[frames]
    ge = (theta >= levels) != (theta_hat >= levels)
    le = (theta <= levels) != (theta_hat <= levels)
    return int(np.count_nonzero(ge | le))


def argmin_violations(
    series: RecordSeries, model: RenewalModel, frames: Optional[Sequence[int]] = None, tol: float = 1e-12
) -> int:
    """Re-score every available action of the sampled frames; count frames where the chosen one loses."""
    frames = range(series.N) if frames is None else frames
    theta_pre = series.theta_pre
    Q_pre = series.Q_pre
    violations = 0
    for i in frames:
        state = ControllerState(
            n=int(i),
            Q=Q_pre[i],
            theta=float(theta_pre[i]),
            D=0.0,
            V=series.V,
            delta=series.delta,
            theta_max=series.theta_max,
            c=series.c,
        )
        event = model.events[int(series.event[i])]
        chosen = dpp_score(state, model.expectations(event, int(series.action[i])))
        best = min(dpp_score(state, model.expectations(event, a)) for a in model.actions(event))
        if chosen > best + tol * max(1.0, abs(best)):
            violations += 1
    if violations:
        logger.warning(f"argmin dominance failed on {violations} frames")
    return violations


def incremental_sum_error(series: RecordSeries) -> float:
    """
    Largest relative gap between the running D and an exactly rounded
    re-summation of the stored summands, over every prefix.
    """
    worst = 0.0
    for n in range(series.N):
        prefix = series.summand[: n + 1]
        exact = math.fsum(prefix)
        scale = max(1.0, math.fsum(np.abs(prefix)))
        worst = max(worst, abs(series.D_after[n] - exact) / scale)
    return worst
