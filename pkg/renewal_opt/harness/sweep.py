"""
Parallel (V, delta, replication) sweeps.

Each grid point runs in its own process with its own derived seed; results
are gathered by grid position and sorted by (V, delta, rep) before anything
is written, so the CSV bytes do not depend on ``parallelism``.
"""

import concurrent.futures
import logging
import math
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import pandas as pd

from renewal_opt.config.run_config import RunConfig, SweepConfig
from renewal_opt.harness import io
from renewal_opt.harness.rng import derive_seed
from renewal_opt.harness.runner import RunSummary, build_model, simulate
from renewal_opt.oracle import OPTIMAL, build_lfp, oracle_solve

logger = logging.getLogger("renewal_opt.harness")

GridKey = Tuple[int, int, int]


@dataclass(frozen=True)
class SweepRow:
    V: float
    delta: float
    rep: int
    summary: Optional[RunSummary] = None
    error: Optional[str] = None


@dataclass(frozen=True, eq=False)
class SweepResult:
    rows: List[SweepRow]
    table: pd.DataFrame
    means: pd.DataFrame
    theta_star: Optional[float]

    @property
    def failures(self) -> List[SweepRow]:
        return [row for row in self.rows if row.error is not None]


def sweep_tasks(config: SweepConfig) -> List[Tuple[GridKey, RunConfig]]:
    """
    One run config per grid point, with output switched off. With
    ``common_random_numbers`` replication k uses the same seed at every
    (V, delta), so differences between grid points are paired.
    """
    base = replace(config.base, output=None, record=False, diagnostics=False)
    tasks = []
    for i, V in enumerate(config.V_list):
        for j, delta in enumerate(config.delta_list):
            for k in range(config.replications):
                if config.common_random_numbers:
                    seed = derive_seed(base.seed, 0, 0, k)
                else:
                    seed = derive_seed(base.seed, i, j, k)
                tasks.append(((i, j, k), base.with_point(V, delta, seed)))
    return tasks


def _run_point(task: Tuple[GridKey, RunConfig]) -> Tuple[GridKey, Optional[RunSummary], Optional[str]]:
    key, config = task
    try:
        summary, _, _, _ = simulate(config)
        return key, summary, None
    except Exception as e:
        logger.error(f"sweep point V={config.V} delta={config.delta} rep={key[2]} failed: {e}")
        return key, None, f"{type(e).__name__}: {e}"


def _collect_serial(tasks) -> Dict[GridKey, Tuple[Optional[RunSummary], Optional[str]]]:
    results = {}
    for task in tasks:
        key, summary, error = _run_point(task)
        results[key] = (summary, error)
    return results


def _collect_parallel(tasks, workers: int) -> Dict[GridKey, Tuple[Optional[RunSummary], Optional[str]]]:
    results = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(_run_point, task): task for task in tasks}
        for future in concurrent.futures.as_completed(futures):
            key, summary, error = future.result()
            results[key] = (summary, error)
            logger.debug(f"sweep: finished point {key}")
    return results


def sweep_table(rows: List[SweepRow], L: int) -> pd.DataFrame:
    data = []
    for row in rows:
        s = row.summary
        if s is None:
            values = [math.nan] * (L + 5)
        else:
            values = [s.avg_penalty_ratio, *s.avg_resource_ratios, s.avg_queue, s.final_theta, s.frames, s.slots]
        data.append([row.V, row.delta, row.rep, *values])
    return pd.DataFrame(data, columns=io.sweep_columns(L))


def means_table(table: pd.DataFrame, L: int, theta_star: Optional[float]) -> pd.DataFrame:
    """Mean over successful replications at each (V, delta), with the standard error of the ratio."""
    metrics = ["avg_penalty_ratio"] + [f"avg_resource_{l}" for l in range(1, L + 1)] + ["avg_queue"]
    ok = table.dropna(subset=["avg_penalty_ratio"])
    grouped = ok.groupby(["V", "delta"], sort=True)
    means = grouped[metrics].mean().reset_index()
    means.insert(2, "reps", grouped.size().to_numpy())
    means = means.rename(columns={m: f"mean_{m}" for m in metrics})
    star = math.nan if theta_star is None else theta_star
    means["theta_star"] = star
    means["gap"] = means["mean_avg_penalty_ratio"] - star
    means["se_avg_penalty_ratio"] = grouped["avg_penalty_ratio"].sem().to_numpy()
    return means[io.means_columns(L)]


def sweep(config: SweepConfig) -> SweepResult:
    tasks = sweep_tasks(config)
    logger.info(
        f"sweep: {len(config.V_list)} V x {len(config.delta_list)} delta x "
        f"{config.replications} reps = {len(tasks)} runs, parallelism {config.parallelism}"
        + (", common random numbers" if config.common_random_numbers else "")
    )
    if config.parallelism > 1 and len(tasks) > 1:
        results = _collect_parallel(tasks, min(config.parallelism, len(tasks)))
    else:
        results = _collect_serial(tasks)

    rows = []
    for key, run_config in tasks:
        summary, error = results[key]
        rows.append(SweepRow(V=run_config.V, delta=run_config.delta, rep=key[2], summary=summary, error=error))
    rows.sort(key=lambda row: (row.V, row.delta, row.rep))

    model = build_model(config.base)
    solution = oracle_solve(build_lfp(model))
    theta_star = solution.theta_star if solution.status == OPTIMAL else None
    table = sweep_table(rows, model.L)
    means = means_table(table, model.L, theta_star)

    failed = sum(1 for row in rows if row.error is not None)
    if failed:
        logger.warning(f"sweep: {failed} of {len(rows)} runs failed")
    return SweepResult(rows=rows, table=table, means=means, theta_star=theta_star)


def write_sweep(prefix: str, result: SweepResult) -> None:
    io.write_csv(f"{prefix}_sweep.csv", result.table)
    io.write_csv(f"{prefix}_means.csv", result.means)
    if result.failures:
        io.write_json(
            f"{prefix}_failures.json",
            {"failures": [{"V": r.V, "delta": r.delta, "rep": r.rep, "error": r.error} for r in result.failures]},
        )
