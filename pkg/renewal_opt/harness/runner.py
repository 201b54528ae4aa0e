"""
Single-run driver.

``run`` builds the model named by a RunConfig, drives the controller for the
configured frame (or slot) budget and returns a RunSummary. With an output
prefix it also writes:

    <prefix>_summary.json       config echo + summary without wall time (+ diagnostics report)
    <prefix>_records.csv        per-frame records, when ``record`` is set
    <prefix>_diagnostics.csv    truncated-series columns, when ``diagnostics`` is set
    <prefix>_hitting.json       hitting times of the truncated series
"""

import logging
import time
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from renewal_opt.config import DEFAULTS
from renewal_opt.config.run_config import MODEL_ALIASES, BoundInputSettings, RunConfig
from renewal_opt.core.controller import FrameRecord, new_state, run_frames
from renewal_opt.diagnostics.bounds import (
    BoundConstants,
    BoundInputs,
    bound_constants,
    constraint_gap_bound,
)
from renewal_opt.diagnostics.checks import queue_norm_increment_violations
from renewal_opt.diagnostics.series import (
    HittingTimeSeries,
    RecordSeries,
    TruncatedSeries,
    f_process_violations,
    flag_counts_by_half,
    hitting_times,
    truncated_series,
)
from renewal_opt.exceptions import ConfigError
from renewal_opt.harness import io
from renewal_opt.harness.rng import make_rng
from renewal_opt.models import FileDownloadModel, RenewalModel, load_synthetic
from renewal_opt.oracle import OPTIMAL, OracleSolution, build_lfp, oracle_solve

logger = logging.getLogger("renewal_opt.harness")


@dataclass(frozen=True)
class RunSummary:
    avg_penalty_ratio: float
    avg_resource_ratios: Tuple[float, ...]
    avg_queue: float
    final_theta: float
    frames: int
    slots: float
    wall_time: float
    violation_bound: Tuple[float, ...] = ()

    def to_dict(self, include_timing: bool = True) -> Dict[str, Any]:
        data = asdict(self)
        if not include_timing:
            del data["wall_time"]
        data["avg_resource_ratios"] = list(self.avg_resource_ratios)
        data["violation_bound"] = list(self.violation_bound)
        return data


@dataclass(frozen=True, eq=False)
class DiagnosticsReport:
    constants: BoundConstants
    theta_star: float
    target: float
    truncation: TruncatedSeries
    hits: HittingTimeSeries
    queue_norm_violations: int
    f_violations: int
    flags_first_half: int
    flags_second_half: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "bound_constants": self.constants.to_dict(),
            "theta_star": self.theta_star,
            "target": self.target,
            "visits": len(self.hits.visit_indices),
            "max_S": int(self.hits.S.max()) if len(self.hits.S) else None,
            "queue_norm_violations": self.queue_norm_violations,
            "f_violations": self.f_violations,
            "flags_first_half": self.flags_first_half,
            "flags_second_half": self.flags_second_half,
        }


def build_model(config: RunConfig) -> RenewalModel:
    if config.model in MODEL_ALIASES:
        return FileDownloadModel(penalty=config.penalty, realization=config.realization, shift=config.shift)
    if config.model.startswith("synthetic:"):
        if config.penalty != "delay" or config.realization != "geometric":
            logger.warning("penalty and realization only apply to the file model; ignored")
        return load_synthetic(config.model[len("synthetic:"):], shift=config.shift)
    error_msg = f"unknown model {config.model!r}"
    logger.error(error_msg)
    raise ConfigError(error_msg)


def resolve_theta_max(config: RunConfig, model: RenewalModel) -> float:
    if config.theta_max == "auto":
        return model.default_theta_max(DEFAULTS["THETA_MAX_FACTOR"])
    return float(config.theta_max)


def shifted_theta_star(model: RenewalModel) -> Optional[float]:
    """Optimal ratio in the units the controller sees (after any shift)."""
    solution = oracle_solve(build_lfp(model, shifted=True))
    return solution.theta_star if solution.status == OPTIMAL else None


def simulate(config: RunConfig, keep_records: bool = False) -> Tuple[RunSummary, Optional[List[FrameRecord]], RenewalModel, float]:
    """Run the controller; returns (summary, records or None, model, theta_max)."""
    model = build_model(config)
    theta_max = resolve_theta_max(config, model)
    rng = make_rng(config.seed)
    state = new_state(model, config.V, config.delta, theta_max)
    logger.info(
        f"run: model={model.name} frames={config.frames} slots={config.slots} "
        f"V={config.V} delta={config.delta} theta_max={theta_max} seed={config.seed}"
    )

    started = time.perf_counter()
    sum_y = 0.0
    sum_T = 0.0
    sum_z = np.zeros(model.L)
    sum_q = 0.0
    frames = 0
    records: Optional[List[FrameRecord]] = [] if keep_records else None
    q_norm = 0.0  # ||Q[n]|| before the frame
    for state, record in run_frames(state, model, rng, config.frames, config.slots):
        sum_y += record.y
        sum_T += record.T
        sum_z += record.z
        sum_q += q_norm
        q_norm = float(np.linalg.norm(record.Q_after))
        frames += 1
        if records is not None:
            records.append(record)
    wall_time = time.perf_counter() - started

    summary = RunSummary(
        avg_penalty_ratio=model.unshift_ratio(sum_y / sum_T),
        avg_resource_ratios=tuple(float(v) for v in sum_z / sum_T),
        avg_queue=sum_q / frames,
        final_theta=state.theta,
        frames=frames,
        slots=sum_T,
        wall_time=wall_time,
        violation_bound=tuple(float(v) for v in constraint_gap_bound(state.Q, sum_T)),
    )
    logger.info(f"run: done in {wall_time:.3f}s, avg_penalty_ratio={summary.avg_penalty_ratio}")
    return summary, records, model, theta_max


def analyze(
    series: RecordSeries,
    settings: BoundInputSettings,
    theta_star: float,
    eps0: float,
) -> DiagnosticsReport:
    """Bound constants, truncated series, hitting times and the property counts for one run."""
    constants = bound_constants(
        BoundInputs(
            eta=settings.eta,
            B=settings.B,
            xi=settings.xi,
            V=series.V,
            theta_max=series.theta_max,
            L=max(series.L, 1),
        )
    )
    trunc = truncated_series(series, settings.eta, constants.r)
    target = theta_star + eps0 / series.V
    hits = hitting_times(trunc.theta_tilde, target)
    first, second = flag_counts_by_half(trunc)
    return DiagnosticsReport(
        constants=constants,
        theta_star=theta_star,
        target=target,
        truncation=trunc,
        hits=hits,
        queue_norm_violations=queue_norm_increment_violations(series),
        f_violations=f_process_violations(trunc, hits),
        flags_first_half=first,
        flags_second_half=second,
    )


def write_diagnostics(prefix: str, series: RecordSeries, report: DiagnosticsReport) -> None:
    io.write_csv(f"{prefix}_diagnostics.csv", io.diagnostics_frame(series, report.truncation))
    io.write_json(f"{prefix}_hitting.json", report.hits.to_dict())


def run(config: RunConfig) -> RunSummary:
    keep = config.record or config.diagnostics
    summary, records, model, theta_max = simulate(config, keep_records=keep)
    if not config.output:
        if keep:
            logger.warning("record/diagnostics requested without an output prefix; nothing written")
        return summary

    payload: Dict[str, Any] = {"config": config.to_dict(), "summary": summary.to_dict(include_timing=False)}
    if config.record:
        io.write_records(f"{config.output}_records.csv", records, model.L)
    if config.diagnostics:
        series = RecordSeries.from_records(records, model.c, config.V, config.delta, theta_max)
        theta_star = shifted_theta_star(model)
        if theta_star is None:
            logger.warning("oracle found no feasible policy; hitting times use theta* = 0")
            theta_star = 0.0
        settings = config.bound_inputs or BoundInputSettings()
        report = analyze(series, settings, theta_star, config.eps0)
        write_diagnostics(config.output, series, report)
        payload["diagnostics"] = report.to_dict()
    io.write_json(f"{config.output}_summary.json", payload)
    return summary


def oracle_cmd(config: RunConfig) -> OracleSolution:
    """Offline optimum of the configured model, in its original (un-shifted) units."""
    return oracle_solve(build_lfp(build_model(config)))
