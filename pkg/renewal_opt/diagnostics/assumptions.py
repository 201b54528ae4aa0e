"""
Estimators for the constants the queue bounds assume.

The bounds need (eta, B) with E[e^{eta y}], E[e^{eta K}], E[e^{eta T}] <= B
for every (event, action), a slack xi for the resource constraints, and an
optimum theta* below theta_max. None of these are known up front for a new
model; the estimates here let a user check configured values before trusting
a bound.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from renewal_opt.diagnostics.bounds import BoundInputs
from renewal_opt.exceptions import ValidationError
from renewal_opt.models.base import RenewalModel
from renewal_opt.oracle import OPTIMAL, build_lfp, oracle_solve, slack_margin

logger = logging.getLogger("renewal_opt.diagnostics")


@dataclass(frozen=True)
class ExponentialTypeEstimate:
    eta: float
    B_hat: float
    # quantity -> (largest mean, event index, action index)
    worst: Dict[str, Tuple[float, int, int]] = field(default_factory=dict)


def estimate_exponential_type(
    model: RenewalModel, eta: float, samples: int, rng: np.random.Generator
) -> ExponentialTypeEstimate:
    """Monte-Carlo estimate of the largest exponential moment over all pairs."""
    if not eta > 0:
        raise ValidationError(f"eta must be positive, got {eta}")
    if samples < 1:
        raise ValidationError(f"samples must be positive, got {samples}")
    worst = {"y": (-np.inf, -1, -1), "K": (-np.inf, -1, -1), "T": (-np.inf, -1, -1)}
    for event, action in model.pairs():
        draws = [model.realize(event, action, rng) for _ in range(samples)]
        y = np.array([d.y for d in draws])
        T = np.array([d.T for d in draws])
        z = np.array([d.z for d in draws], dtype=np.float64).reshape(samples, model.L)
        K = np.linalg.norm(z - np.outer(T, model.c), axis=1)
        with np.errstate(over="ignore"):
            means = {
                "y": float(np.exp(eta * y).mean()),
                "K": float(np.exp(eta * K).mean()),
                "T": float(np.exp(eta * T).mean()),
            }
        for key, value in means.items():
            if value > worst[key][0]:
                worst[key] = (value, event.index, action)
    B_hat = max(v[0] for v in worst.values())
    return ExponentialTypeEstimate(eta=eta, B_hat=B_hat, worst=worst)


def check_assumptions(
    model: RenewalModel,
    inputs: BoundInputs,
    samples: int = 2000,
    rng: Optional[np.random.Generator] = None,
) -> List[str]:
    """Compare configured constants with estimates; every mismatch is logged and returned."""
    rng = rng if rng is not None else np.random.default_rng(0)
    warnings: List[str] = []

    inst = build_lfp(model, shifted=True)
    solution = oracle_solve(inst)
    if solution.status != OPTIMAL:
        warnings.append("no stationary policy meets the resource constraints")
    else:
        if solution.theta_star >= inputs.theta_max:
            warnings.append(f"theta*={solution.theta_star} is not below theta_max={inputs.theta_max}")
        if solution.theta_star < 0:
            warnings.append(f"theta*={solution.theta_star} is negative; apply a penalty shift")

    estimate = estimate_exponential_type(model, inputs.eta, samples, rng)
    if estimate.B_hat > inputs.B:
        quantity, (value, e, a) = max(estimate.worst.items(), key=lambda kv: kv[1][0])
        warnings.append(
            f"B={inputs.B} is below the estimated exponential moment {value:.6g} "
            f"of {quantity} at (event {e}, action {a}) for eta={inputs.eta}"
        )

    margin = slack_margin(inst)
    if margin is None:
        warnings.append("resource constraints admit no slack")
    elif margin < inputs.xi:
        warnings.append(f"xi={inputs.xi} exceeds the largest achievable slack {margin:.6g}")

    for msg in warnings:
        logger.warning(f"{model.name}: {msg}")
    return warnings
