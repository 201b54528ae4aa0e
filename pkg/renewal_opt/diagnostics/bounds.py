"""
Queue-stability constants and the bounds built on them.

Given the exponential-type constants (eta, B), the slack xi and the run
parameters, ``bound_constants`` returns the drift constants (r, sigma, rho,
Gamma) of ||Q[n]||, the offset C0 and the uniform moment bound
D >= E[exp(r ||Q[n]||)].
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from renewal_opt.diagnostics.series import RecordSeries
from renewal_opt.exceptions import ValidationError

logger = logging.getLogger("renewal_opt.diagnostics")


@dataclass(frozen=True)
class BoundInputs:
    eta: float
    B: float
    xi: float
    V: float
    theta_max: float
    L: int = 1

    def __post_init__(self):
        bad = [
            name
            for name in ("eta", "B", "xi", "V", "theta_max")
            if not (math.isfinite(getattr(self, name)) and getattr(self, name) > 0)
        ]
        if self.L < 1:
            bad.append("L")
        if bad:
            error_msg = f"bound inputs must be strictly positive: {', '.join(bad)}"
            logger.error(error_msg)
            raise ValidationError(error_msg)


@dataclass(frozen=True)
class BoundConstants:
    r: float
    sigma: float
    rho: float
    Gamma: float
    C0: float
    D: float

    def to_dict(self):
        return {
            "r": self.r,
            "sigma": self.sigma,
            "rho": self.rho,
            "Gamma": self.Gamma,
            "C0": self.C0,
            "D": self.D,
        }


def _exp(x: float) -> float:
    try:
        return math.exp(x)
    except OverflowError:
        return math.inf


def bound_constants(inp: BoundInputs) -> BoundConstants:
    """
    r     = min(eta, xi eta^2 / (8B))
    rho   = 1 - r xi / 2 + (2B / eta^2) r^2
    C0    = 2B^2 / (V xi eta^2) + 2 (theta_max + 1) B / (xi eta) - xi / (4V)
    sigma = C0 V,  Gamma = B
    D     = 1 + B exp(r sigma) / (1 - rho)

    r = xi eta^2 / (8B) is the minimizer of the rho quadratic.
    """
    eta, B, xi, V = inp.eta, inp.B, inp.xi, inp.V
    r = min(eta, xi * eta ** 2 / (8.0 * B))
    rho = 1.0 - r * xi / 2.0 + (2.0 * B / eta ** 2) * r ** 2
    if not rho < 1.0:
        error_msg = f"rho={rho} >= 1 for {inp}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    if not rho > 0.0:
        error_msg = (
            f"rho={rho} <= 0 for {inp}: B is too small for eta "
            f"(frame lengths are at least 1, so B >= exp(eta) whenever the constants hold)"
        )
        logger.error(error_msg)
        raise ValidationError(error_msg)

    C0 = 2.0 * B ** 2 / (V * xi * eta ** 2) + 2.0 * (inp.theta_max + 1.0) * B / (xi * eta) - xi / (4.0 * V)
    if C0 <= 0:
        logger.warning(f"C0={C0} <= 0: the queue bound is vacuous for {inp}")
    sigma = C0 * V
    D = 1.0 + B * _exp(r * sigma) / (1.0 - rho)
    return BoundConstants(r=r, sigma=sigma, rho=rho, Gamma=B, C0=C0, D=D)


def hajek_bound(
    consts: BoundConstants, n: Union[int, Sequence[int], np.ndarray], R0: float = 0.0
) -> Union[float, np.ndarray]:
    """
    E[exp(r R[n])] <= rho^n exp(r R0) + (1 - rho^n) / (1 - rho) * Gamma * exp(r sigma).

    Accepts a scalar frame index or an array of them.
    """
    n_arr = np.asarray(n, dtype=np.float64)
    if np.any(n_arr < 0):
        raise ValidationError("frame index must be nonnegative")
    rho_n = np.power(consts.rho, n_arr)
    value = rho_n * _exp(consts.r * R0) + (1.0 - rho_n) / (1.0 - consts.rho) * consts.Gamma * _exp(
        consts.r * consts.sigma
    )
    return float(value) if np.ndim(value) == 0 else value


@dataclass(frozen=True)
class DriftCheck:
    """Empirical exp(r (R[n+1] - R[n])) means, overall and where R[n] >= sigma."""

    overall_mean: float
    overall_count: int
    conditional_mean: Optional[float]
    conditional_count: int


def drift_conditions(series: RecordSeries, r: float, sigma: float) -> DriftCheck:
    if series.N == 0:
        raise ValidationError("drift_conditions needs at least one frame")
    R = np.concatenate([series.q_norm, [float(np.linalg.norm(series.Q_after[-1]))]])
    with np.errstate(over="ignore"):
        increments = np.exp(r * np.diff(R))
    above = R[:-1] >= sigma
    conditional = float(increments[above].mean()) if above.any() else None
    return DriftCheck(
        overall_mean=float(increments.mean()),
        overall_count=len(increments),
        conditional_mean=conditional,
        conditional_count=int(above.sum()),
    )


def constraint_gap_bound(Q_final: Sequence[float], total_T: float) -> np.ndarray:
    """
    Q_l[N] / sum T: upper bound on how far the time-average resource ratio of
    constraint l can sit above c_l after N frames.
    """
    if not total_T > 0:
        raise ValidationError(f"total_T must be positive, got {total_T}")
    return np.asarray(Q_final, dtype=np.float64) / float(total_T)
