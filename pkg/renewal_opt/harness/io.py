"""
CSV and JSON emission.

Column layouts are fixed:

    records:     n,event,action,y,T,z1..zL,summand,theta,q1..qL
    sweep:       V,delta,rep,avg_penalty_ratio,avg_resource_1..L,avg_queue,final_theta,frames,slots
    means:       V,delta,reps,mean_avg_penalty_ratio,mean_avg_resource_1..L,mean_avg_queue,theta_star,gap
    diagnostics: n,theta_hat,theta,theta_tilde,q_norm,K,flag_A,flag_B,flag_E

Floats are written in shortest round-trip form and read back with
round-trip precision, so a record file reproduces the run's values exactly.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from renewal_opt.core.controller import FrameRecord
from renewal_opt.diagnostics.series import RecordSeries, TruncatedSeries
from renewal_opt.exceptions import ValidationError

logger = logging.getLogger("renewal_opt.harness")


def record_columns(L: int) -> List[str]:
    return (
        ["n", "event", "action", "y", "T"]
        + [f"z{l}" for l in range(1, L + 1)]
        + ["summand", "theta"]
        + [f"q{l}" for l in range(1, L + 1)]
    )


def sweep_columns(L: int) -> List[str]:
    return (
        ["V", "delta", "rep", "avg_penalty_ratio"]
        + [f"avg_resource_{l}" for l in range(1, L + 1)]
        + ["avg_queue", "final_theta", "frames", "slots"]
    )


def means_columns(L: int) -> List[str]:
    return (
        ["V", "delta", "reps", "mean_avg_penalty_ratio"]
        + [f"mean_avg_resource_{l}" for l in range(1, L + 1)]
        + ["mean_avg_queue", "theta_star", "gap", "se_avg_penalty_ratio"]
    )


DIAGNOSTICS_COLUMNS = ["n", "theta_hat", "theta", "theta_tilde", "q_norm", "K", "flag_A", "flag_B", "flag_E"]


def records_frame(records: Sequence[FrameRecord], L: int) -> pd.DataFrame:
    N = len(records)
    z = np.array([r.z for r in records], dtype=np.float64).reshape(N, L)
    q = np.array([r.Q_after for r in records], dtype=np.float64).reshape(N, L)
    data: Dict[str, Any] = {
        "n": [r.n for r in records],
        "event": [r.event_id for r in records],
        "action": [r.action_id for r in records],
        "y": [r.y for r in records],
        "T": [r.T for r in records],
    }
    for l in range(L):
        data[f"z{l + 1}"] = z[:, l]
    data["summand"] = [r.summand for r in records]
    data["theta"] = [r.theta_after for r in records]
    for l in range(L):
        data[f"q{l + 1}"] = q[:, l]
    return pd.DataFrame(data, columns=record_columns(L))


def write_csv(path: str, frame: pd.DataFrame) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n")
    logger.info(f"wrote {len(frame)} rows to {path}")


def write_records(path: str, records: Sequence[FrameRecord], L: int) -> None:
    write_csv(path, records_frame(records, L))


def read_records(
    path: str, c: Sequence[float], V: float, delta: float, theta_max: float
) -> RecordSeries:
    """
    Load a record CSV back into a RecordSeries. D is rebuilt by sequential
    summation of the stored summands, which is how the controller built it.
    """
    if not Path(path).exists():
        error_msg = f"record file not found: {path}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    frame = pd.read_csv(path, float_precision="round_trip")
    L = len(c)
    missing = [col for col in record_columns(L) if col not in frame.columns]
    if missing:
        error_msg = f"{path}: missing columns {missing} for L={L}"
        logger.error(error_msg)
        raise ValidationError(error_msg)
    summand = frame["summand"].to_numpy(dtype=np.float64)
    return RecordSeries(
        event=frame["event"].to_numpy(dtype=np.int64),
        action=frame["action"].to_numpy(dtype=np.int64),
        y=frame["y"].to_numpy(dtype=np.float64),
        T=frame["T"].to_numpy(dtype=np.float64),
        z=frame[[f"z{l}" for l in range(1, L + 1)]].to_numpy(dtype=np.float64).reshape(len(frame), L),
        summand=summand,
        theta_after=frame["theta"].to_numpy(dtype=np.float64),
        Q_after=frame[[f"q{l}" for l in range(1, L + 1)]].to_numpy(dtype=np.float64).reshape(len(frame), L),
        D_after=np.cumsum(summand),
        c=np.asarray(c, dtype=np.float64),
        V=float(V),
        delta=float(delta),
        theta_max=float(theta_max),
    )


def diagnostics_frame(series: RecordSeries, trunc: TruncatedSeries) -> pd.DataFrame:
    N = series.N
    return pd.DataFrame(
        {
            "n": np.arange(N),
            "theta_hat": series.theta_hat()[:N],
            "theta": series.theta()[:N],
            "theta_tilde": trunc.theta_tilde[:N],
            "q_norm": series.q_norm,
            "K": series.K,
            "flag_A": trunc.flag_A.astype(np.int64),
            "flag_B": trunc.flag_B.astype(np.int64),
            "flag_E": trunc.flag_E.astype(np.int64),
        },
        columns=DIAGNOSTICS_COLUMNS,
    )


def write_json(path: str, payload: Dict[str, Any]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True, default=_json_default)
        f.write("\n")
    logger.info(f"wrote {path}")


def to_json(payload: Dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, default=_json_default)


def _json_default(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"{type(value).__name__} is not JSON serializable")
