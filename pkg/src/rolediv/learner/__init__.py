from .encoding import CommConfig, EncoderConfig, SharingPlan, default_encoder, selective_groups
from .credit import CreditAssignment, select_actions, td_update
from .qtable import QFunction
from .training import TrainingConfig, TrainingRun, train

__all__ = [
    "CommConfig",
    "EncoderConfig",
    "SharingPlan",
    "default_encoder",
    "selective_groups",
    "CreditAssignment",
    "select_actions",
    "td_update",
    "QFunction",
    "TrainingConfig",
    "TrainingRun",
    "train",
]
