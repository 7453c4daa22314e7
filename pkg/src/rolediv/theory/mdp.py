"""Exact finite MDPs for the error-decomposition experiments.

Each agent owns a small observation/action MDP with bounded rewards; the
joint task is their product with independent transitions and a weighted-sum
reward, so the optimal joint action-value decomposes exactly along the
planted weights. Value iteration provides the oracle all learned quantities
are compared against.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

VI_TOL = 1e-13
VI_MAX_ITERS = 100_000


@dataclass(frozen=True)
class AgentMDP:
    """One agent's finite MDP: kernel P[z, u, z'], reward r[z, u]."""

    P: np.ndarray
    r: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.P, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if P.ndim != 3 or P.shape[0] != P.shape[2] or r.shape != P.shape[:2]:
            raise ValueError("bad-kernel: P must be (Z,U,Z) and r (Z,U)")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=2) - 1.0) > 1e-9):
            raise ValueError("bad-kernel: rows must be distributions")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "r", r)

    @property
    def n_obs(self) -> int:
        return self.P.shape[0]

    @property
    def n_actions(self) -> int:
        return self.P.shape[1]


@dataclass(frozen=True)
class FiniteMDPSpec:
    """n independent agent MDPs + planted mixing weights for the joint task."""

    agents: tuple[AgentMDP, ...]
    gamma: float
    reward_bound: float
    joint_weights: np.ndarray | None = None

    def __post_init__(self):
        if not self.agents:
            raise ValueError("need at least one agent MDP")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        for a in self.agents:
            if np.any(np.abs(a.r) > self.reward_bound + 1e-12):
                raise ValueError("reward exceeds bound")
        w = self.joint_weights
        if w is None:
            w = np.full(len(self.agents), 1.0 / len(self.agents))
        else:
            w = np.asarray(w, dtype=float)
            if len(w) != len(self.agents) or np.any(w < 0):
                raise ValueError("joint weights must be non-negative, one per agent")
        object.__setattr__(self, "joint_weights", w)

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def same_spaces(self) -> bool:
        z0, u0 = self.agents[0].n_obs, self.agents[0].n_actions
        return all(a.n_obs == z0 and a.n_actions == u0 for a in self.agents)


def value_iteration(P: np.ndarray, r: np.ndarray, gamma: float) -> np.ndarray:
    """Q* of a finite MDP to sup-norm tolerance well below 1e-10."""
    Q = np.zeros_like(r)
    for _ in range(VI_MAX_ITERS):
        V = Q.max(axis=1)
        nxt = r + gamma * P @ V
        delta = np.abs(nxt - Q).max()
        Q = nxt
        if delta <= VI_TOL:
            return Q
    raise RuntimeError("value iteration failed to converge")


def joint_product(spec: FiniteMDPSpec) -> tuple[np.ndarray, np.ndarray, list, list]:
    """Explicit product MDP: joint states/actions enumerated in C order."""
    shapes_z = [a.n_obs for a in spec.agents]
    shapes_u = [a.n_actions for a in spec.agents]
    joint_z = [tuple(idx) for idx in np.ndindex(*shapes_z)]
    joint_u = [tuple(idx) for idx in np.ndindex(*shapes_u)]
    nz, nu = len(joint_z), len(joint_u)
    P = np.ones((nz, nu, nz))
    r = np.zeros((nz, nu))
    for zi, zs in enumerate(joint_z):
        for ui, us in enumerate(joint_u):
            r[zi, ui] = sum(
                w * a.r[z, u]
                for w, a, z, u in zip(spec.joint_weights, spec.agents, zs, us)
            )
            for zj, zs2 in enumerate(joint_z):
                p = 1.0
                for a, z, u, z2 in zip(spec.agents, zs, us, zs2):
                    p *= a.P[z, u, z2]
                P[zi, ui, zj] = p
    return P, r, joint_z, joint_u


@dataclass(frozen=True)
class OracleResult:
    per_agent: tuple[np.ndarray, ...]  # Q*_i, each (Z_i, U_i)
    joint: np.ndarray  # Q*_tot on the product MDP, (prod Z, prod U)
    joint_obs: list
    joint_act: list


def value_iteration_oracle(spec: FiniteMDPSpec) -> OracleResult:
    per_agent = tuple(
        value_iteration(a.P, a.r, spec.gamma) for a in spec.agents
    )
    P, r, joint_z, joint_u = joint_product(spec)
    joint = value_iteration(P, r, spec.gamma)
    return OracleResult(per_agent=per_agent, joint=joint, joint_obs=joint_z, joint_act=joint_u)


# -- ready-made spec builders (declarative config entries) -----------------

def three_state_mdp(gamma: float = 0.9, reward_bound: float = 1.0, n_agents: int = 2,
                    hetero: float = 0.0) -> FiniteMDPSpec:
    """Well-mixing 3-state, 2-action MDP family.

    ``hetero`` in [0, 1] interpolates the second and later agents' rewards
    between a clone of agent 0 (0.0) and a reversed reward pattern (1.0).
    """
    P = np.array(
        [
            [[0.7, 0.2, 0.1], [0.1, 0.6, 0.3]],
            [[0.3, 0.4, 0.3], [0.2, 0.2, 0.6]],
            [[0.4, 0.1, 0.5], [0.5, 0.3, 0.2]],
        ]
    )
    base_r = np.array([[0.1, 0.9], [0.6, 0.2], [0.8, 0.4]]) * reward_bound
    agents = [AgentMDP(P, base_r)]
    flipped = base_r[::-1, ::-1].copy()
    for _ in range(1, n_agents):
        r = (1.0 - hetero) * base_r + hetero * flipped
        agents.append(AgentMDP(P, r))
    return FiniteMDPSpec(agents=tuple(agents), gamma=gamma, reward_bound=reward_bound)


def planted_weight_pair(w=(0.3, 0.7), gamma: float = 0.9, reward_bound: float = 1.0) -> FiniteMDPSpec:
    """Two distinct agent MDPs mixed with known weights."""
    base = three_state_mdp(gamma=gamma, reward_bound=reward_bound, n_agents=2, hetero=1.0)
    return FiniteMDPSpec(
        agents=base.agents,
        gamma=gamma,
        reward_bound=reward_bound,
        joint_weights=np.asarray(w, dtype=float),
    )


def clone_pair(gamma: float = 0.9, reward_bound: float = 1.0, n_agents: int = 2) -> FiniteMDPSpec:
    return three_state_mdp(gamma=gamma, reward_bound=reward_bound, n_agents=n_agents, hetero=0.0)


def hetero_pair(gamma: float = 0.9, reward_bound: float = 1.0, n_agents: int = 2) -> FiniteMDPSpec:
    return three_state_mdp(gamma=gamma, reward_bound=reward_bound, n_agents=n_agents, hetero=1.0)


SPEC_BUILDERS = {
    "three_state": three_state_mdp,
    "clone_pair": clone_pair,
    "hetero_pair": hetero_pair,
    "planted_pair": planted_weight_pair,
}
