from .base import AgentSpec, CoopEnv, Observation, StepResult, VisibleEntity, WorldState
from .factory import UNIT_TYPES, make_scenario

__all__ = [
    "AgentSpec",
    "CoopEnv",
    "Observation",
    "StepResult",
    "VisibleEntity",
    "WorldState",
    "UNIT_TYPES",
    "make_scenario",
]
