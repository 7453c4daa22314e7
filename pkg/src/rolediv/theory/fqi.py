"""Fitted Q-iteration over tabular or observation-aggregated hypothesis
spaces, with separate or shared (pooled) regression.

Each iteration regresses onto bootstrapped targets from N i.i.d. draws per
agent. Sampling is realized through multinomial cell counts, which is
distributionally identical to drawing the N pairs one by one (rewards are
deterministic given the cell) and keeps large-N runs cheap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mdp import FiniteMDPSpec


@dataclass(frozen=True)
class HypothesisSpace:
    """exact tabular, or observations aggregated onto k super-states."""

    kind: str = "exact_tabular"
    aggregation: tuple[int, ...] | None = None  # obs index -> super state

    def __post_init__(self):
        if self.kind not in ("exact_tabular", "aggregated"):
            raise ValueError(f"unknown hypothesis kind {self.kind!r}")
        if self.kind == "aggregated" and self.aggregation is None:
            raise ValueError("aggregated hypothesis needs a surjection")

    @classmethod
    def aggregated_uniform(cls, n_obs: int, k: int) -> "HypothesisSpace":
        if not 1 <= k <= n_obs:
            raise ValueError("k must lie in [1, n_obs]")
        mapping = tuple(min(z * k // n_obs, k - 1) for z in range(n_obs))
        return cls(kind="aggregated", aggregation=mapping)

    def groups(self, n_obs: int) -> np.ndarray:
        if self.kind == "exact_tabular":
            return np.arange(n_obs)
        if len(self.aggregation) != n_obs:
            raise ValueError("aggregation length mismatch")
        return np.asarray(self.aggregation)

    def n_groups(self, n_obs: int) -> int:
        return int(self.groups(n_obs).max()) + 1


def uniform_nu(n_obs: int, n_actions: int) -> np.ndarray:
    return np.full((n_obs, n_actions), 1.0 / (n_obs * n_actions))


def skewed_nu(n_obs: int, n_actions: int, decay: float = 0.5) -> np.ndarray:
    w = decay ** np.arange(n_obs * n_actions)
    w = w / w.sum()
    return w.reshape(n_obs, n_actions)


def _project(groups: np.ndarray, n_groups: int, weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Weighted per-(super-cell, action) mean; cells with no weight get NaN."""
    n_actions = values.shape[1]
    out = np.full((n_groups, n_actions), np.nan)
    for g in range(n_groups):
        mask = groups == g
        w = weights[mask]
        v = values[mask]
        tot = w.sum(axis=0)
        with np.errstate(invalid="ignore"):
            out[g] = np.where(tot > 0, (w * v).sum(axis=0) / np.where(tot > 0, tot, 1.0), np.nan)
    return out


def _regress(
    counts: np.ndarray,
    targets: np.ndarray,
    groups: np.ndarray,
    n_groups: int,
    prev_cells: np.ndarray,
) -> np.ndarray:
    """Least-squares fit in the hypothesis space = count-weighted cell means.
    Cells that received no samples keep their previous value."""
    fitted = _project(groups, n_groups, counts, targets)
    return np.where(np.isnan(fitted), prev_cells, fitted)


def fqi_run(
    spec: FiniteMDPSpec,
    hypothesis: HypothesisSpace,
    mode: str,
    N: int,
    T: int,
    nu: np.ndarray | None = None,
    seed: int = 0,
) -> list[tuple[np.ndarray, ...]]:
    """Run FQI and return the iterates Q̃_0..Q̃_T, each a per-agent tuple
    of (Z, U) tables (expanded from the hypothesis cells).

    separate: each agent fits its own Q from its own N draws per iteration.
    shared: all agents' draws pool into one regression (effective sample
    n*N); every agent is assigned the shared table.
    """
    if mode not in ("separate", "shared"):
        raise ValueError(f"unknown mode {mode!r}")
    if N < 1 or T < 0:
        raise ValueError("need N >= 1 and T >= 0")
    if mode == "shared" and not spec.same_spaces():
        raise ValueError("shared mode requires identical observation/action spaces")
    rng = np.random.default_rng([seed, 0xF91])
    n_obs = spec.agents[0].n_obs
    n_actions = spec.agents[0].n_actions
    if nu is None:
        nu = uniform_nu(n_obs, n_actions)
    groups = hypothesis.groups(n_obs)
    n_groups = hypothesis.n_groups(n_obs)

    def expand(cells: np.ndarray) -> np.ndarray:
        return cells[groups]

    zero_cells = np.zeros((n_groups, n_actions))
    iterates: list[tuple[np.ndarray, ...]] = [
        tuple(expand(zero_cells) for _ in spec.agents)
    ]
    if mode == "separate":
        cells = [zero_cells.copy() for _ in spec.agents]
    else:
        cells = [zero_cells.copy()]

    for _ in range(T):
        per_agent_counts = []
        per_agent_targets = []
        for agent in spec.agents:
            counts = rng.multinomial(N, nu.ravel()).reshape(n_obs, n_actions).astype(float)
            prev_idx = len(per_agent_counts) if mode == "separate" else 0
            v_next = expand(cells[prev_idx]).max(axis=1)
            targets = np.zeros((n_obs, n_actions))
            for z in range(n_obs):
                for u in range(n_actions):
                    c = counts[z, u]
                    if c == 0:
                        continue
                    next_counts = rng.multinomial(int(c), agent.P[z, u])
                    mean_v = float(next_counts @ v_next) / c
                    targets[z, u] = agent.r[z, u] + spec.gamma * mean_v
            per_agent_counts.append(counts)
            per_agent_targets.append(targets)
        if mode == "separate":
            cells = [
                _regress(c, t, groups, n_groups, prev)
                for c, t, prev in zip(per_agent_counts, per_agent_targets, cells)
            ]
            iterates.append(tuple(expand(c) for c in cells))
        else:
            pooled_counts = np.concatenate(per_agent_counts, axis=0)
            pooled_targets = np.concatenate(per_agent_targets, axis=0)
            pooled_groups = np.concatenate([groups] * spec.n_agents)
            cells = [_regress(pooled_counts, pooled_targets, pooled_groups, n_groups, cells[0])]
            shared = expand(cells[0])
            iterates.append(tuple(shared for _ in spec.agents))
    return iterates


def bellman_image(spec: FiniteMDPSpec, agent_idx: int, Q: np.ndarray) -> np.ndarray:
    """Exact T Q for one agent's MDP."""
    a = spec.agents[agent_idx]
    return a.r + spec.gamma * a.P @ Q.max(axis=1)


def approximation_proxy(
    spec: FiniteMDPSpec,
    hypothesis: HypothesisSpace,
    final_iterate: tuple[np.ndarray, ...],
    nu: np.ndarray | None = None,
) -> float:
    """||Proj_H(T Q̃_T) - T Q̃_T||_{2,nu}, averaged over agents.

    A computable stand-in for the sup-inf approximation error of the
    hypothesis space; identically 0 for exact tabular.
    """
    n_obs = spec.agents[0].n_obs
    n_actions = spec.agents[0].n_actions
    if nu is None:
        nu = uniform_nu(n_obs, n_actions)
    groups = hypothesis.groups(n_obs)
    n_groups = hypothesis.n_groups(n_obs)
    vals = []
    for i, Q in enumerate(final_iterate):
        tq = bellman_image(spec, i, Q)
        proj_cells = _project(groups, n_groups, nu, tq)
        proj_cells = np.where(np.isnan(proj_cells), 0.0, proj_cells)
        resid = proj_cells[groups] - tq
        vals.append(float(np.sqrt(np.sum(nu * resid**2))))
    return float(np.mean(vals))
