"""
Offline optimum over randomized stationary policies.

For a finite model with known event probabilities the best stationary policy
solves the linear fractional program

    min  sum P(e) p(a|e) y_hat(e,a) / sum P(e) p(a|e) t_hat(e,a)
    s.t. sum P(e) p(a|e) z_hat_l(e,a) / sum P(e) p(a|e) t_hat(e,a) <= c_l.

The Charnes-Cooper substitution w(e,a) = P(e) p(a|e) t with t the reciprocal
of the denominator turns it into an LP over (w, t).
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from renewal_opt.config import get_tolerance
from renewal_opt.exceptions import OracleError, ValidationError
from renewal_opt.models.base import RenewalModel
from renewal_opt.oracle.simplex import (
    INFEASIBLE,
    OPTIMAL,
    UNBOUNDED,
    LinearProgram,
    simplex_solve,
)

logger = logging.getLogger("renewal_opt.oracle")

POLICY_ROW_TOL = 1e-9
POLICY_ENTRY_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LfpInstance:
    """Tabulated expectations of a finite model; unavailable pairs are masked out."""

    P: np.ndarray            # (E,)
    y_hat: np.ndarray        # (E, A)
    t_hat: np.ndarray        # (E, A)
    z_hat: np.ndarray        # (E, A, L)
    c: np.ndarray            # (L,)
    available: np.ndarray    # (E, A) bool

    def __post_init__(self):
        if np.any(self.t_hat[self.available] < 1):
            raise ValidationError("t_hat entries must be >= 1")
        if abs(float(self.P.sum()) - 1.0) > get_tolerance("PROBABILITY_TOL"):
            raise ValidationError(f"event probabilities sum to {float(self.P.sum())!r}, not 1")
        if not np.all(self.available.any(axis=1)):
            raise ValidationError("every event needs at least one available action")

    @property
    def E(self) -> int:
        return self.y_hat.shape[0]

    @property
    def A(self) -> int:
        return self.y_hat.shape[1]

    @property
    def L(self) -> int:
        return len(self.c)

    def scaled(self, k: float) -> "LfpInstance":
        """Same instance with every y_hat multiplied by k."""
        return LfpInstance(self.P, self.y_hat * k, self.t_hat, self.z_hat, self.c, self.available)


@dataclass(frozen=True)
class PolicyRatios:
    objective: float
    constraints: Tuple[float, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {"objective": self.objective, "constraints": list(self.constraints)}


@dataclass(frozen=True, eq=False)
class OracleSolution:
    status: str
    theta_star: Optional[float] = None
    policy: Optional[np.ndarray] = None
    achieved_ratios: Optional[PolicyRatios] = None
    t: Optional[float] = None
    lp_objective: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta_star": self.theta_star,
            "policy": None if self.policy is None else self.policy.tolist(),
            "status": self.status,
            "achieved_ratios": None if self.achieved_ratios is None else self.achieved_ratios.to_dict(),
        }


@dataclass(frozen=True, eq=False)
class CharnesCooperLP:
    """The LP plus the map from LP columns back to (event, action) pairs."""

    lp: LinearProgram
    pairs: Tuple[Tuple[int, int], ...]

    @property
    def t_index(self) -> int:
        return len(self.pairs)


def build_lfp(model: RenewalModel, shifted: bool = False) -> LfpInstance:
    """
    Tabulate the model's expectations for every (event, action) pair.

    By default the penalty is taken before any shift, so the optimum is in the
    model's original units.
    """
    if not isinstance(model, RenewalModel):
        raise ValidationError(f"build_lfp needs a finite RenewalModel, got {type(model).__name__}")
    E, A, L = len(model.events), model.num_actions, model.L
    y_hat = np.zeros((E, A))
    t_hat = np.ones((E, A))
    z_hat = np.zeros((E, A, L))
    available = np.zeros((E, A), dtype=bool)
    for event in model.events:
        for a in model.actions(event):
            perf = model.expectations(event, a) if shifted else model.raw_expectations(event, a)
            y_hat[event.index, a] = perf.y_hat
            t_hat[event.index, a] = perf.t_hat
            z_hat[event.index, a] = perf.z_hat
            available[event.index, a] = True
    if not (np.all(np.isfinite(y_hat)) and np.all(np.isfinite(t_hat)) and np.all(np.isfinite(z_hat))):
        error_msg = f"{model.name}: non-finite expectations cannot be tabulated"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    return LfpInstance(
        P=np.asarray(model.probabilities, dtype=np.float64).copy(),
        y_hat=y_hat,
        t_hat=t_hat,
        z_hat=z_hat,
        c=np.array(model.c, dtype=np.float64),
        available=available,
    )


def _coupling_rows(inst: LfpInstance, pairs, extra_cols: int) -> Tuple[np.ndarray, np.ndarray]:
    """Normalization row sum w*t_hat = 1 and one row sum_a w(e,a) - P(e) t = 0 per event."""
    n = len(pairs) + 1 + extra_cols
    t_col = len(pairs)
    A_eq = np.zeros((1 + inst.E, n))
    b_eq = np.zeros(1 + inst.E)
    for k, (e, a) in enumerate(pairs):
        A_eq[0, k] = inst.t_hat[e, a]
        A_eq[1 + e, k] = 1.0
    b_eq[0] = 1.0
    A_eq[1:, t_col] = -inst.P
    return A_eq, b_eq


def charnes_cooper(inst: LfpInstance) -> CharnesCooperLP:
    """
    Variables w(e,a) >= 0 for each available pair, then t >= 0.

    minimize    sum w * y_hat
    subject to  sum w * t_hat = 1
                sum w * (z_hat_l - c_l * t_hat) <= 0       for each l
                sum_a w(e,a) = P(e) * t                     for each e
    """
    pairs = tuple((int(e), int(a)) for e, a in zip(*np.nonzero(inst.available)))
    n = len(pairs) + 1
    cost = np.zeros(n)
    A_ub = np.zeros((inst.L, n))
    for k, (e, a) in enumerate(pairs):
        cost[k] = inst.y_hat[e, a]
        A_ub[:, k] = inst.z_hat[e, a] - inst.c * inst.t_hat[e, a]
    A_eq, b_eq = _coupling_rows(inst, pairs, extra_cols=0)
    lp = LinearProgram(c=cost, A_ub=A_ub, b_ub=np.zeros(inst.L), A_eq=A_eq, b_eq=b_eq)
    return CharnesCooperLP(lp=lp, pairs=pairs)


def recover_policy(inst: LfpInstance, cc: CharnesCooperLP, x: np.ndarray) -> Tuple[np.ndarray, float]:
    """
    Map an LP solution back to p(a|e) = w(e,a) / (P(e) t).

    Rows are normalized by their own mass, which equals P(e) t at a feasible
    point and stays defined for zero-probability events.
    """
    t = float(x[cc.t_index])
    if not t > get_tolerance("FEASIBILITY_TOL"):
        error_msg = f"Charnes-Cooper scale t={t} is not positive at the optimum"
        logger.error(error_msg)
        raise OracleError(error_msg)
    W = np.zeros((inst.E, inst.A))
    for k, (e, a) in enumerate(cc.pairs):
        W[e, a] = x[k]
    policy = np.zeros_like(W)
    for e in range(inst.E):
        mass = W[e].sum()
        if mass > 0:
            policy[e] = W[e] / mass
        else:
            policy[e, int(np.flatnonzero(inst.available[e])[0])] = 1.0
    return policy, t


def evaluate_policy(inst: LfpInstance, policy: np.ndarray) -> PolicyRatios:
    """Objective and resource ratios of a randomized stationary policy."""
    policy = np.asarray(policy, dtype=np.float64)
    if policy.shape != (inst.E, inst.A):
        raise ValidationError(f"policy has shape {policy.shape}, expected {(inst.E, inst.A)}")
    if np.any(policy < -POLICY_ENTRY_TOL) or np.any(np.abs(policy.sum(axis=1) - 1.0) > POLICY_ROW_TOL):
        raise ValidationError("policy must be row-stochastic")
    if np.any(policy[~inst.available] > POLICY_ENTRY_TOL):
        raise ValidationError("policy puts mass on unavailable actions")
    W = inst.P[:, None] * policy
    denominator = float(np.sum(W * inst.t_hat))
    objective = float(np.sum(W * inst.y_hat)) / denominator
    constraints = tuple(float(np.sum(W * inst.z_hat[:, :, l])) / denominator for l in range(inst.L))
    return PolicyRatios(objective=objective, constraints=constraints)


def oracle_solve(inst: LfpInstance) -> OracleSolution:
    """Optimal ratio and policy, or an infeasible status."""
    cc = charnes_cooper(inst)
    result = simplex_solve(cc.lp)
    if result.status == INFEASIBLE:
        logger.warning("oracle: no stationary policy meets the resource constraints")
        return OracleSolution(status=INFEASIBLE)
    if result.status == UNBOUNDED:
        error_msg = "oracle: Charnes-Cooper LP reported unbounded; w is bounded by the normalization row"
        logger.error(error_msg)
        raise OracleError(error_msg)

    policy, t = recover_policy(inst, cc, result.x)
    achieved = evaluate_policy(inst, policy)
    logger.info(f"oracle: theta*={result.objective} after {result.iterations} pivots")
    return OracleSolution(
        status=OPTIMAL,
        theta_star=result.objective,
        policy=policy,
        achieved_ratios=achieved,
        t=t,
        lp_objective=result.objective,
    )


def slack_margin(inst: LfpInstance) -> Optional[float]:
    """
    Largest xi >= 0 such that some stationary policy has every resource ratio
    at most c_l - xi. ``None`` when no policy is feasible; ``inf`` with no
    constraints.
    """
    if inst.L == 0:
        return math.inf
    pairs = tuple((int(e), int(a)) for e, a in zip(*np.nonzero(inst.available)))
    n = len(pairs) + 2
    xi_col = n - 1
    cost = np.zeros(n)
    cost[xi_col] = -1.0
    A_ub = np.zeros((inst.L, n))
    for k, (e, a) in enumerate(pairs):
        A_ub[:, k] = inst.z_hat[e, a] - inst.c * inst.t_hat[e, a]
    # with sum w*t_hat = 1, ratio_l <= c_l - xi  <=>  sum w (z_l - c_l t_hat) + xi <= 0
    A_ub[:, xi_col] = 1.0
    A_eq, b_eq = _coupling_rows(inst, pairs, extra_cols=1)
    result = simplex_solve(LinearProgram(c=cost, A_ub=A_ub, b_ub=np.zeros(inst.L), A_eq=A_eq, b_eq=b_eq))
    if result.status != OPTIMAL:
        return None
    return float(result.x[xi_col])


def deterministic_optimum(inst: LfpInstance, max_policies: int = 300_000) -> Tuple[Optional[float], Optional[np.ndarray]]:
    """
    Best feasible deterministic policy by exhaustive enumeration.

    Returns (objective, chosen action per event), or (None, None) when no
    deterministic policy is feasible.
    """
    choices = [np.flatnonzero(inst.available[e]) for e in range(inst.E)]
    count = int(np.prod([len(ch) for ch in choices]))
    if count > max_policies:
        raise ValidationError(f"{count} deterministic policies exceed the enumeration limit {max_policies}")
    grid = np.array(list(itertools.product(*choices)), dtype=np.int64).reshape(count, inst.E)
    rows = np.arange(inst.E)
    den = (inst.P * inst.t_hat[rows, grid]).sum(axis=1)
    num = (inst.P * inst.y_hat[rows, grid]).sum(axis=1)
    feasible = np.ones(count, dtype=bool)
    for l in range(inst.L):
        use = (inst.P * inst.z_hat[rows, grid, l]).sum(axis=1)
        feasible &= use / den <= inst.c[l] + 1e-12
    if not feasible.any():
        return None, None
    ratios = np.where(feasible, num / den, np.inf)
    best = int(np.argmin(ratios))
    return float(ratios[best]), grid[best]
