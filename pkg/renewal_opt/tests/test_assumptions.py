import logging
import math

import numpy as np
import pytest

from renewal_opt.diagnostics import BoundInputs, check_assumptions, estimate_exponential_type
from renewal_opt.models import deterministic_model


def test_estimate_for_constant_outcomes():
    model = deterministic_model(y=1.0, T=1.0, z=[0.0], c=[1.0])
    estimate = estimate_exponential_type(model, 0.3, 100, np.random.default_rng(0))
    assert estimate.B_hat == pytest.approx(math.exp(0.3))
    assert estimate.worst["y"][1:] == (0, 0)


def test_default_bound_is_exceeded_by_largest_penalty(file_model):
    estimate = estimate_exponential_type(file_model, 0.3, 200, np.random.default_rng(1))
    value, event, action = estimate.worst["y"]
    assert value == pytest.approx(math.exp(0.3 * 4.5))
    assert file_model.events[event].value[1] == 5.0 and action == 3
    assert estimate.B_hat > math.e


def test_check_assumptions_reports_mismatches(file_model, caplog):
    inputs = BoundInputs(eta=0.3, B=math.e, xi=2.0, V=100.0, theta_max=file_model.default_theta_max())
    with caplog.at_level(logging.WARNING, logger="renewal_opt.diagnostics"):
        warnings = check_assumptions(file_model, inputs, samples=200)
    assert any("exponential moment" in w for w in warnings)
    assert any("largest achievable slack" in w for w in warnings)
    assert not any("theta_max" in w for w in warnings)
    assert "exponential moment" in caplog.text


def test_check_assumptions_flags_low_ceiling(reward_model):
    inputs = BoundInputs(eta=0.3, B=100.0, xi=0.5, V=100.0, theta_max=1e-3)
    warnings = check_assumptions(reward_model, inputs, samples=100)
    assert any("not below theta_max" in w for w in warnings)
