from .mdp import AgentMDP, FiniteMDPSpec, value_iteration, value_iteration_oracle
from .fqi import HypothesisSpace, fqi_run
from .decomposition import (
    DecompositionReport,
    algorithmic_term,
    concentration_proxy,
    decompose,
    fit_credit_weights,
    shared_optimal_q,
)
from .sweep import sweep

__all__ = [
    "AgentMDP",
    "FiniteMDPSpec",
    "value_iteration",
    "value_iteration_oracle",
    "HypothesisSpace",
    "fqi_run",
    "DecompositionReport",
    "algorithmic_term",
    "concentration_proxy",
    "decompose",
    "fit_credit_weights",
    "shared_optimal_q",
    "sweep",
]
