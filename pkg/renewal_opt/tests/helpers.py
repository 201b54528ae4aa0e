"""Builders shared by the test modules."""

import numpy as np

from renewal_opt.core.controller import new_state, run_frames
from renewal_opt.diagnostics.series import RecordSeries


def two_action_table(a0, a1, c=(1.0,)):
    """Single-event synthetic config with two deterministic actions given as (y, T, z)."""
    rows = []
    for action, (y, T, z) in enumerate((a0, a1)):
        rows.append(
            {
                "event": 0,
                "action": action,
                "y_hat": y,
                "t_hat": T,
                "z_hat": list(z),
                "outcomes": [{"y": y, "T": T, "z": list(z), "prob": 1.0}],
            }
        )
    return {"events": [{"id": 0, "prob": 1.0}], "actions": [0, 1], "c": list(c), "table": rows}


def recorded_run(model, frames, V=100.0, delta=0.7, theta_max=None, seed=7):
    """Run the controller and return (RecordSeries, records)."""
    theta_max = model.default_theta_max() if theta_max is None else theta_max
    state = new_state(model, V, delta, theta_max)
    records = [record for _, record in run_frames(state, model, np.random.default_rng(seed), frames)]
    return RecordSeries.from_records(records, model.c, V, delta, theta_max), records
