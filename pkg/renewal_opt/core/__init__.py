from .controller import (
    ControllerState,
    FrameRecord,
    clip_theta,
    dpp_score,
    new_state,
    pseudo_average,
    run_frames,
    select_action,
    step,
    update_queues,
    update_theta,
)

__all__ = [
    "ControllerState",
    "FrameRecord",
    "clip_theta",
    "dpp_score",
    "new_state",
    "pseudo_average",
    "run_frames",
    "select_action",
    "step",
    "update_queues",
    "update_theta",
]
