import logging
import math

import numpy as np
import pytest

from renewal_opt.diagnostics import (
    BoundInputs,
    bound_constants,
    constraint_gap_bound,
    drift_conditions,
    hajek_bound,
)
from renewal_opt.exceptions import ValidationError


def test_unit_inputs():
    consts = bound_constants(BoundInputs(eta=1.0, B=1.0, xi=1.0, V=1.0, theta_max=1.0))
    assert consts.r == pytest.approx(0.125)
    assert consts.rho == pytest.approx(0.96875)
    assert consts.C0 == pytest.approx(5.75)
    assert consts.sigma == pytest.approx(5.75)
    assert consts.Gamma == 1.0
    assert consts.D == pytest.approx(1.0 + math.exp(0.125 * 5.75) / 0.03125)


def test_r_switches_to_slack_arm():
    consts = bound_constants(BoundInputs(eta=2.0, B=10.0, xi=1.0, V=1.0, theta_max=1.0))
    assert consts.r == pytest.approx(0.05)
    assert consts.r <= 2.0


def test_tiny_slack_keeps_rho_below_one():
    consts = bound_constants(BoundInputs(eta=1.0, B=1.0, xi=1e-6, V=1.0, theta_max=1.0))
    assert 0.999 < consts.rho < 1.0


def test_rho_decreases_in_slack():
    rhos = [
        bound_constants(BoundInputs(eta=1.0, B=1.0, xi=xi, V=1.0, theta_max=1.0)).rho
        for xi in np.linspace(0.1, 4.0, 20)
    ]
    assert all(a > b for a, b in zip(rhos, rhos[1:]))


def test_D_increases_in_V():
    Ds = [
        bound_constants(BoundInputs(eta=0.3, B=math.e, xi=1.0, V=V, theta_max=2.0)).D
        for V in (1.0, 3.0, 10.0, 30.0, 100.0)
    ]
    assert all(a < b for a, b in zip(Ds, Ds[1:]))


def test_nonpositive_C0_is_reported(caplog):
    with caplog.at_level(logging.WARNING, logger="renewal_opt.diagnostics"):
        consts = bound_constants(BoundInputs(eta=1.0, B=1.0, xi=5.0, V=1.0, theta_max=1e-3))
    assert consts.C0 < 0
    assert "vacuous" in caplog.text


def test_inconsistent_constants_are_rejected():
    with pytest.raises(ValidationError):
        bound_constants(BoundInputs(eta=10.0, B=1.0, xi=10.0, V=1.0, theta_max=1.0))


@pytest.mark.parametrize("field", ["eta", "B", "xi", "V", "theta_max"])
def test_inputs_must_be_positive(field):
    values = dict(eta=1.0, B=1.0, xi=1.0, V=1.0, theta_max=1.0)
    values[field] = 0.0
    with pytest.raises(ValidationError):
        BoundInputs(**values)


def test_hajek_bound_starts_at_one_and_stays_below_D():
    consts = bound_constants(BoundInputs(eta=1.0, B=1.0, xi=1.0, V=1.0, theta_max=1.0))
    assert hajek_bound(consts, 0) == pytest.approx(1.0)
    values = hajek_bound(consts, np.arange(0, 500))
    assert np.all(values <= consts.D * (1 + 1e-12))
    assert np.all(np.diff(values) >= 0)


def test_hajek_bound_decays_from_a_large_start():
    consts = bound_constants(BoundInputs(eta=1.0, B=1.0, xi=1.0, V=1.0, theta_max=1.0))
    start = hajek_bound(consts, 0, R0=200.0)
    later = hajek_bound(consts, 2000, R0=200.0)
    assert later < start
    assert later <= consts.D


def test_constraint_gap_bound():
    assert constraint_gap_bound([2.0, 0.0], 4.0).tolist() == [0.5, 0.0]
    with pytest.raises(ValidationError):
        constraint_gap_bound([1.0], 0.0)


def test_drift_conditions(short_run):
    check = drift_conditions(short_run, r=0.01, sigma=1e12)
    assert check.overall_count == short_run.N
    assert check.conditional_mean is None
    assert check.conditional_count == 0

    check = drift_conditions(short_run, r=0.01, sigma=0.0)
    assert check.conditional_count == short_run.N
    assert check.conditional_mean == pytest.approx(check.overall_mean)
