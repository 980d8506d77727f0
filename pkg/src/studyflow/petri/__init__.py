from .net import PetriNet, PetriNetError, export_net_dot, export_pnml
from .plan import RecommendedPlan, load_plan, plan_to_petri
from .replay import (
    KERNEL_BACKEND,
    ReplayAggregate,
    ReplayResult,
    deviation_summary,
    replay_log,
    token_replay,
)

__all__ = [
    "PetriNet",
    "PetriNetError",
    "RecommendedPlan",
    "ReplayAggregate",
    "ReplayResult",
    "KERNEL_BACKEND",
    "deviation_summary",
    "export_net_dot",
    "export_pnml",
    "load_plan",
    "plan_to_petri",
    "replay_log",
    "token_replay",
]
