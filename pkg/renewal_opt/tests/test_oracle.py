import math

import numpy as np
import pytest

from renewal_opt.exceptions import ValidationError
from renewal_opt.models import FileDownloadModel, deterministic_model, synthetic_from_config
from renewal_opt.oracle import (
    INFEASIBLE,
    OPTIMAL,
    build_lfp,
    charnes_cooper,
    deterministic_optimum,
    evaluate_policy,
    oracle_solve,
    simplex_solve,
    slack_margin,
)
from renewal_opt.tests.helpers import two_action_table


def test_build_lfp_file_model_dimensions(file_model):
    inst = build_lfp(file_model)
    assert (inst.E, inst.A, inst.L) == (9, 4, 1)
    assert inst.available.all()
    assert inst.t_hat[8, 3] == pytest.approx(2.44)


def test_build_lfp_single_pair():
    inst = build_lfp(deterministic_model(y=2.0, T=1.0, z=[0.0], c=[1.0]))
    assert inst.y_hat.shape == (1, 1)
    assert inst.y_hat[0, 0] == 2.0


def test_build_lfp_uses_unshifted_penalty_by_default(reward_model):
    raw = build_lfp(reward_model)
    shifted = build_lfp(reward_model, shifted=True)
    assert raw.y_hat[0, 3] == pytest.approx(-0.9)
    assert shifted.y_hat[0, 3] == pytest.approx(-0.9 + reward_model.shift * 1.36)


def test_forced_single_policy():
    inst = build_lfp(deterministic_model(y=2.0, T=2.0, z=[0.0], c=[1.0]))
    cc = charnes_cooper(inst)
    result = simplex_solve(cc.lp)
    assert result.x[0] == pytest.approx(0.5)
    assert result.x[cc.t_index] == pytest.approx(0.5)
    solution = oracle_solve(inst)
    assert solution.theta_star == pytest.approx(1.0)


def test_unconstrained_choice_of_cheaper_action():
    model = synthetic_from_config(two_action_table((2.0, 1.0, ()), (3.0, 1.0, ()), c=()))
    solution = oracle_solve(build_lfp(model))
    assert solution.status == OPTIMAL
    assert solution.theta_star == pytest.approx(2.0)
    assert solution.policy[0] == pytest.approx([1.0, 0.0])


def test_binding_constraint_mixes_actions(mixing_model):
    solution = oracle_solve(build_lfp(mixing_model))
    assert solution.theta_star == pytest.approx(5.0)
    assert solution.policy[0] == pytest.approx([0.5, 0.5])
    assert solution.achieved_ratios.constraints[0] == pytest.approx(1.0)


def test_infeasible_model():
    model = synthetic_from_config(two_action_table((1.0, 1.0, (2.0,)), (2.0, 1.0, (3.0,))))
    solution = oracle_solve(build_lfp(model))
    assert solution.status == INFEASIBLE
    assert solution.to_dict()["theta_star"] is None


def test_solution_invariants(reward_model):
    inst = build_lfp(reward_model)
    solution = oracle_solve(inst)
    assert solution.status == OPTIMAL
    assert np.all(solution.policy >= -1e-12)
    assert np.abs(solution.policy.sum(axis=1) - 1.0).max() <= 1e-9
    assert solution.achieved_ratios.objective == pytest.approx(solution.theta_star, abs=1e-7)
    assert solution.achieved_ratios.constraints[0] <= 1.0 + 1e-7
    assert set(solution.to_dict()) == {"theta_star", "policy", "status", "achieved_ratios"}


def test_delay_model_optimum_is_idle(file_model):
    solution = oracle_solve(build_lfp(file_model))
    assert solution.theta_star == pytest.approx(0.0, abs=1e-12)


def random_feasible_policies(inst, count, rng):
    idle = np.zeros((inst.E, inst.A))
    idle[:, 0] = 1.0
    accepted = []
    for _ in range(200 * count):
        rows = rng.dirichlet(np.ones(inst.A), size=inst.E)
        weight = rng.uniform()
        policy = weight * rows + (1 - weight) * idle
        if all(r <= c for r, c in zip(evaluate_policy(inst, policy).constraints, inst.c)):
            accepted.append(policy)
            if len(accepted) == count:
                break
    return accepted


def test_optimum_dominates_random_feasible_policies(reward_model):
    inst = build_lfp(reward_model)
    theta_star = oracle_solve(inst).theta_star
    policies = random_feasible_policies(inst, 1000, np.random.default_rng(5))
    assert len(policies) == 1000
    violations = [p for p in policies if evaluate_policy(inst, p).objective < theta_star - 1e-7]
    assert violations == []


def test_deterministic_policies_bound_the_optimum_from_above(reward_model):
    inst = build_lfp(reward_model)
    best, choice = deterministic_optimum(inst)
    assert choice is not None
    assert oracle_solve(inst).theta_star <= best + 1e-9


def test_deterministic_optimum_is_attained_without_binding_constraints():
    config = {
        "events": [{"id": 0, "prob": 0.4}, {"id": 1, "prob": 0.6}],
        "actions": [0, 1],
        "c": [10.0],
        "table": [
            {
                "event": e,
                "action": a,
                "y_hat": y,
                "t_hat": T,
                "z_hat": [1.0],
                "outcomes": [{"y": y, "T": T, "z": [1.0], "prob": 1.0}],
            }
            for (e, a, y, T) in [(0, 0, 3.0, 1.0), (0, 1, 4.0, 3.0), (1, 0, 1.0, 1.0), (1, 1, 5.0, 2.0)]
        ],
    }
    inst = build_lfp(synthetic_from_config(config))
    best, _ = deterministic_optimum(inst)
    assert oracle_solve(inst).theta_star == pytest.approx(best, abs=1e-9)


def test_recovered_policy_reproduces_lp_objective(file_model, reward_model, mixing_model):
    for model in (file_model, reward_model, mixing_model):
        inst = build_lfp(model)
        solution = oracle_solve(inst)
        assert evaluate_policy(inst, solution.policy).objective == pytest.approx(solution.lp_objective, abs=1e-7)


def test_scaling_penalties_scales_optimum(reward_model):
    inst = build_lfp(reward_model)
    base = oracle_solve(inst)
    scaled = oracle_solve(inst.scaled(3.7))
    assert scaled.theta_star == pytest.approx(3.7 * base.theta_star, rel=1e-9)
    assert np.array_equal(scaled.policy > 1e-9, base.policy > 1e-9)


def test_slack_margin(file_model, mixing_model):
    assert slack_margin(build_lfp(file_model)) == pytest.approx(1.0)
    # action 1 uses no power, so every policy can reach ratio 0 <= 1 - 1
    assert slack_margin(build_lfp(mixing_model)) == pytest.approx(1.0)
    infeasible = synthetic_from_config(two_action_table((1.0, 1.0, (2.0,)), (2.0, 1.0, (3.0,))))
    assert slack_margin(build_lfp(infeasible)) is None
    free = synthetic_from_config(two_action_table((2.0, 1.0, ()), (3.0, 1.0, ()), c=()))
    assert math.isinf(slack_margin(build_lfp(free)))


def test_evaluate_policy_rejects_non_stochastic_rows(file_model):
    inst = build_lfp(file_model)
    with pytest.raises(ValidationError):
        evaluate_policy(inst, np.full((9, 4), 0.3))
    with pytest.raises(ValidationError):
        evaluate_policy(inst, np.ones((2, 2)))
