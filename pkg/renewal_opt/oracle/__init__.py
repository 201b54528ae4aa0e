from .lfp import (
    CharnesCooperLP,
    LfpInstance,
    OracleSolution,
    PolicyRatios,
    build_lfp,
    charnes_cooper,
    deterministic_optimum,
    evaluate_policy,
    oracle_solve,
    recover_policy,
    slack_margin,
)
from .simplex import INFEASIBLE, OPTIMAL, UNBOUNDED, LinearProgram, SimplexResult, simplex_solve

__all__ = [
    "CharnesCooperLP",
    "LfpInstance",
    "OracleSolution",
    "PolicyRatios",
    "build_lfp",
    "charnes_cooper",
    "deterministic_optimum",
    "evaluate_policy",
    "oracle_solve",
    "recover_policy",
    "slack_margin",
    "INFEASIBLE",
    "OPTIMAL",
    "UNBOUNDED",
    "LinearProgram",
    "SimplexResult",
    "simplex_solve",
]
