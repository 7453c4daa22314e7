"""Action selection and temporal-difference updates for the three credit
assignment kinds: independent learning, fixed-sum decomposition, and a
learnable simplex-weighted mixer.

The mixer keeps its weight vector on the probability simplex after every
update (Euclidean projection), which preserves the monotonic-mixing
argmax property: the joint greedy action is the tuple of per-agent greedy
actions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .qtable import QFunction

CREDIT_KINDS = ("iql", "vdn_sum", "learnable_weights")


def project_to_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort method)."""
    n = v.size
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    rho = np.nonzero(u * np.arange(1, n + 1) > (css - 1))[0][-1]
    theta = (css[rho] - 1.0) / (rho + 1)
    return np.maximum(v - theta, 0.0)


@dataclass
class CreditAssignment:
    kind: str
    n_agents: int
    weights: np.ndarray = field(default=None)
    weight_lr: float = 0.01

    def __post_init__(self):
        if self.kind not in CREDIT_KINDS:
            raise ValueError(f"unknown credit kind {self.kind!r}")
        if self.weights is None:
            self.weights = np.full(self.n_agents, 1.0 / self.n_agents)
        else:
            self.weights = np.asarray(self.weights, dtype=float)
        if len(self.weights) != self.n_agents:
            raise ValueError("weight vector length must equal agent count")
        if np.any(self.weights < 0) or abs(self.weights.sum() - 1.0) > 1e-9:
            raise ValueError("weights must lie on the simplex")


@dataclass(frozen=True)
class AgentTransition:
    agent_id: int
    key: tuple
    action: int
    next_key: tuple | None  # None when the agent is dead at the next step
    next_legal: tuple[int, ...]


@dataclass(frozen=True)
class Transition:
    agents: tuple[AgentTransition, ...]
    reward: float
    done: bool


def select_actions(
    qf: QFunction,
    keys: dict[int, tuple],
    legal: dict[int, list[int]],
    epsilon: float,
    rng: np.random.Generator,
) -> tuple[dict[int, int], dict[int, np.ndarray]]:
    """Per-agent epsilon-greedy over the agent's keyed row.

    Returns the joint action and, for logging, each agent's behavior
    distribution (the epsilon-greedy mixture over its legal actions).
    """
    actions: dict[int, int] = {}
    mixtures: dict[int, np.ndarray] = {}
    for aid in sorted(keys):
        acts = legal[aid]
        greedy = qf.argmax_over(keys[aid], acts)
        probs = np.zeros(qf.n_actions)
        for a in acts:
            probs[a] = epsilon / len(acts)
        probs[greedy] += 1.0 - epsilon
        if epsilon > 0 and rng.random() < epsilon:
            chosen = int(acts[rng.integers(len(acts))])
        else:
            chosen = greedy
        actions[aid] = chosen
        mixtures[aid] = probs
    return actions, mixtures


def td_update(
    qf: QFunction,
    credit: CreditAssignment,
    batch: list[Transition],
    alpha: float,
    gamma: float,
) -> None:
    """Apply one TD(0) pass over a sampled batch, transition by transition.

    iql: each agent regresses the shared reward independently.
    vdn_sum: one joint error against the summed target; every participating
        entry moves by alpha * error.
    learnable_weights: entries move by alpha * error * w_i; the weights take
        a semi-gradient step along error * Q_i and are re-projected onto the
        simplex.
    """
    if not batch:
        raise ValueError("empty-batch")
    for tr in batch:
        if credit.kind == "iql":
            for ag in tr.agents:
                nxt = 0.0
                if not tr.done and ag.next_key is not None:
                    nxt = qf.max_over(ag.next_key, list(ag.next_legal))
                delta = tr.reward + gamma * nxt - qf.value(ag.key, ag.action)
                qf.update(ag.key, ag.action, alpha * delta)
        elif credit.kind == "vdn_sum":
            next_tot = 0.0
            if not tr.done:
                for ag in tr.agents:
                    if ag.next_key is not None:
                        next_tot += qf.max_over(ag.next_key, list(ag.next_legal))
            q_tot = sum(qf.value(ag.key, ag.action) for ag in tr.agents)
            delta = tr.reward + gamma * next_tot - q_tot
            for ag in tr.agents:
                qf.update(ag.key, ag.action, alpha * delta)
        else:  # learnable_weights
            w = credit.weights
            next_tot = 0.0
            if not tr.done:
                for ag in tr.agents:
                    if ag.next_key is not None:
                        next_tot += w[ag.agent_id] * qf.max_over(
                            ag.next_key, list(ag.next_legal)
                        )
            q_vals = {ag.agent_id: qf.value(ag.key, ag.action) for ag in tr.agents}
            q_tot = sum(w[aid] * q for aid, q in q_vals.items())
            delta = tr.reward + gamma * next_tot - q_tot
            for ag in tr.agents:
                qf.update(ag.key, ag.action, alpha * delta * w[ag.agent_id])
            if credit.weight_lr > 0:
                grad = np.zeros_like(w)
                for aid, q in q_vals.items():
                    grad[aid] = delta * q
                credit.weights = project_to_simplex(w + credit.weight_lr * grad)
