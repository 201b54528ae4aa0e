"""
Desk-scale acceptance runs: 2e5 frames, 5 replications per V point and 8
common-random-number replications per delta point.

Run with ``pytest -m slow``. The file model is used with the reward penalty
and the automatic shift so the optimal ratio is bounded away from zero in the
controller's units; all reported ratios are un-shifted.
"""

import numpy as np
import pytest

from renewal_opt.config import RunConfig, SweepConfig
from renewal_opt.diagnostics import (
    argmin_violations,
    equivalence_violations,
    f_process_violations,
    flag_counts_by_half,
    hitting_times,
    queue_norm_increment_violations,
    trim_violations,
    truncated_series,
)
from renewal_opt.diagnostics.bounds import BoundInputs, bound_constants
from renewal_opt.harness import sweep, write_sweep
from renewal_opt.harness.runner import shifted_theta_star
from renewal_opt.models import FileDownloadModel
from renewal_opt.tests.helpers import recorded_run

pytestmark = pytest.mark.slow

FRAMES = 200_000
BASE = RunConfig(frames=FRAMES, seed=2024, penalty="reward", shift="auto")


def gap_at(means, V, delta):
    row = means[(means["V"] == V) & (means["delta"] == delta)]
    assert len(row) == 1
    return float(row["gap"].iloc[0])


@pytest.fixture(scope="module")
def V_sweep():
    return sweep(SweepConfig(base=BASE, V_list=(3.0, 30.0, 300.0), delta_list=(0.7,), parallelism=8))


@pytest.fixture(scope="module")
def delta_sweep():
    config = SweepConfig(
        base=BASE,
        V_list=(300.0,),
        delta_list=(0.1, 0.4, 0.5, 0.7, 0.9, 1.2),
        replications=8,
        parallelism=8,
        common_random_numbers=True,
    )
    return sweep(config)


def test_resource_constraint_is_met(V_sweep):
    means = V_sweep.means
    assert not V_sweep.failures
    assert (means["mean_avg_resource_1"] <= 1.02).all()
    at_300 = means[means["V"] == 300.0]["mean_avg_resource_1"].iloc[0]
    assert at_300 >= 0.80


def test_gap_shrinks_with_V(V_sweep):
    means = V_sweep.means
    gaps = [gap_at(means, V, 0.7) for V in (3.0, 30.0, 300.0)]
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] <= 0.05 * max(V_sweep.theta_star, 1.0)


def test_queue_grows_with_V(V_sweep):
    queues = V_sweep.means.sort_values("V")["mean_avg_queue"].to_numpy()
    assert np.all(np.diff(queues) >= 0)
    assert queues[-1] > queues[0]


def rep_gaps(result, V, delta):
    rows = result.table[(result.table["V"] == V) & (result.table["delta"] == delta)].sort_values("rep")
    return rows["avg_penalty_ratio"].to_numpy() - result.theta_star


def test_delta_window(delta_sweep):
    assert not delta_sweep.failures
    means = delta_sweep.means
    reference = rep_gaps(delta_sweep, 300.0, 0.7)
    # replications share seeds across delta, so compare rep by rep
    for delta in (0.4, 0.5):
        excess = rep_gaps(delta_sweep, 300.0, delta) - 2 * reference
        stderr = excess.std(ddof=1) / np.sqrt(len(excess))
        assert excess.mean() <= 3 * stderr, delta
    for delta in (0.1, 1.2):
        assert gap_at(means, 300.0, delta) >= 3 * gap_at(means, 300.0, 0.7)
    # at 2e5 frames theta still lags theta* by about delta * theta * n**(delta - 1) near delta = 1
    assert 3 * gap_at(means, 300.0, 0.9) <= gap_at(means, 300.0, 1.2)
    assert (means["se_avg_penalty_ratio"] > 0).all()


def test_sweep_bytes_do_not_depend_on_parallelism(tmp_path):
    def grid(parallelism):
        base = RunConfig(frames=2000, seed=11, penalty="reward", shift="auto")
        return SweepConfig(base=base, V_list=(3.0, 300.0), delta_list=(0.7, 1.2), parallelism=parallelism)

    write_sweep(str(tmp_path / "one"), sweep(grid(1)))
    write_sweep(str(tmp_path / "eight"), sweep(grid(8)))
    for suffix in ("_sweep.csv", "_means.csv"):
        assert (tmp_path / f"one{suffix}").read_bytes() == (tmp_path / f"eight{suffix}").read_bytes()


@pytest.fixture(scope="module")
def long_run():
    model = FileDownloadModel(penalty="reward", shift="auto")
    series, _ = recorded_run(model, FRAMES, V=300.0, seed=99)
    return model, series


def test_long_run_invariants(long_run):
    model, series = long_run
    rng = np.random.default_rng(5)
    assert np.all(series.Q_after >= 0)
    assert trim_violations(series) == 0
    assert queue_norm_increment_violations(series) == 0

    sampled = rng.choice(series.N, size=10_000, replace=False)
    assert argmin_violations(series, model, frames=np.sort(sampled)) == 0

    frames = rng.integers(0, series.N + 1, size=10_000)
    levels = rng.uniform(0.0, series.theta_max, size=10_000)
    levels[levels == 0.0] = series.theta_max / 2
    assert equivalence_violations(series, frames, levels) == 0


def test_long_run_truncated_series(long_run):
    model, series = long_run
    constants = bound_constants(BoundInputs(eta=0.3, B=np.e, xi=1.0, V=series.V, theta_max=series.theta_max))
    trunc = truncated_series(series, 0.3, constants.r)
    target = shifted_theta_star(model) + 0.1 / series.V
    hits = hitting_times(trunc.theta_tilde, target)
    assert f_process_violations(trunc, hits) == 0
    first, second = flag_counts_by_half(trunc)
    assert second <= first


def test_long_run_hitting_gaps_shrink_relative_to_cube_root(long_run):
    model, series = long_run
    constants = bound_constants(BoundInputs(eta=0.3, B=np.e, xi=1.0, V=series.V, theta_max=series.theta_max))
    trunc = truncated_series(series, 0.3, constants.r)
    hits = hitting_times(trunc.theta_tilde, shifted_theta_star(model) + 0.1)
    assert len(hits.S) > 1000

    n_k = hits.visit_indices[:-1].astype(np.float64)
    running_max = np.maximum.accumulate(hits.S)
    ratio = running_max / np.cbrt(np.maximum(n_k, 1.0))
    tail = n_k >= series.N / 2
    assert tail.any() and (~tail).any()
    # no new record gap after N/2, so the ratio only falls there
    assert np.all(np.diff(ratio[tail]) <= 0)
    assert ratio[tail][-1] < ratio[~tail][-1]
