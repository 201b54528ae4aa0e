from .rng import derive_seed, make_rng
from .runner import DiagnosticsReport, RunSummary, analyze, build_model, oracle_cmd, run, simulate
from .sweep import SweepResult, SweepRow, sweep, write_sweep

__all__ = [
    "derive_seed",
    "make_rng",
    "DiagnosticsReport",
    "RunSummary",
    "analyze",
    "build_model",
    "oracle_cmd",
    "run",
    "simulate",
    "SweepResult",
    "SweepRow",
    "sweep",
    "write_sweep",
]
