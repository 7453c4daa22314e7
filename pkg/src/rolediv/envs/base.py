"""Shared environment machinery for the desk-scale cooperative scenarios.

Scenarios are deterministic given (name, params, seed): identical triples
replay to bitwise-identical trajectories under identical action sequences.
All agents receive the same scalar reward each step, bounded by the
configured reward bound. Observations are restricted to each agent's
circular vision disk; discretization happens at the learner boundary, not
here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class AgentSpec:
    """Static attributes of one controllable unit."""

    agent_id: int
    unit_type: str
    max_health: float
    attack_range: float
    damage: float
    vision_scope: float
    move_speed: float

    def __post_init__(self):
        if self.max_health <= 0 or self.vision_scope <= 0 or self.move_speed <= 0:
            raise ValueError("bad-params: positive attribute required")
        if self.attack_range < 0 or self.damage < 0:
            raise ValueError("bad-params: negative attribute")
        if self.attack_range > self.vision_scope:
            raise ValueError("bad-params: attack_range exceeds vision_scope")


@dataclass
class EntityState:
    position: np.ndarray
    health: float
    alive: bool


@dataclass
class WorldState:
    tick: int
    agents: list[EntityState]
    entities: list[EntityState]  # landmarks or enemy units


@dataclass(frozen=True)
class VisibleEntity:
    kind: str  # "ally" | "enemy" | "landmark"
    index: int
    rel_pos: tuple[float, float]
    health_frac: float


@dataclass(frozen=True)
class Observation:
    observer_id: int
    alive: bool
    position: tuple[float, float]
    health_frac: float
    visible: tuple[VisibleEntity, ...]


@dataclass(frozen=True)
class StepResult:
    observations: tuple[Observation, ...]
    reward: float
    terminated: bool
    truncated: bool
    info: dict


# Action layout shared by every scenario: 0 stay, then axis moves, then
# scenario-specific target slots (attack-enemy-k, heal-ally-a).
MOVE_DELTAS_4 = ((0.0, 1.0), (0.0, -1.0), (1.0, 0.0), (-1.0, 0.0))  # N S E W
MOVE_DELTAS_8 = MOVE_DELTAS_4 + ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))


class CoopEnv:
    """Base cooperative environment with circular partial observability."""

    def __init__(
        self,
        scenario: str,
        specs: list[AgentSpec],
        world_size: float,
        horizon: int,
        reward_bound: float,
        seed: int,
        move_dirs: int = 4,
    ):
        if move_dirs not in (4, 8):
            raise ValueError("bad-params: move_dirs must be 4 or 8")
        self.scenario = scenario
        self.specs = list(specs)
        self.n_agents = len(specs)
        self.world_size = float(world_size)
        self.horizon = int(horizon)
        self.reward_bound = float(reward_bound)
        self.seed = int(seed)
        self.move_deltas = MOVE_DELTAS_4 if move_dirs == 4 else MOVE_DELTAS_8
        self._episode_index = 0
        self.state: WorldState | None = None

    # -- scenario hooks -------------------------------------------------
    @property
    def n_actions(self) -> int:
        raise NotImplementedError

    def _spawn(self, rng: np.random.Generator) -> WorldState:
        raise NotImplementedError

    def _apply_actions(self, actions: dict[int, int]) -> dict:
        raise NotImplementedError

    def _reward_and_done(self, step_info: dict) -> tuple[float, bool, dict]:
        raise NotImplementedError

    def legal_actions(self, agent_id: int) -> list[int]:
        raise NotImplementedError

    # -- common API ------------------------------------------------------
    def reset(self) -> tuple[Observation, ...]:
        rng = np.random.default_rng([self.seed, self._episode_index])
        self._episode_index += 1
        self.state = self._spawn(rng)
        return self._observations()

    def step(self, joint_action: dict[int, int]) -> StepResult:
        if self.state is None:
            raise RuntimeError("step before reset")
        alive_ids = {i for i in range(self.n_agents) if self.state.agents[i].alive}
        if set(joint_action) != alive_ids:
            raise ValueError("illegal-action: one action per alive agent required")
        for aid, act in joint_action.items():
            if not 0 <= act < self.n_actions:
                raise ValueError(f"illegal-action: index {act} out of range")
            if act not in self.legal_actions(aid):
                raise ValueError(f"illegal-action: {act} not legal for agent {aid}")
        step_info = self._apply_actions(joint_action)
        self.state.tick += 1
        reward, terminated, info = self._reward_and_done(step_info)
        truncated = not terminated and self.state.tick >= self.horizon
        assert abs(reward) <= self.reward_bound, "reward bound violated"
        return StepResult(
            observations=self._observations(),
            reward=reward,
            terminated=terminated,
            truncated=truncated,
            info=info,
        )

    def set_vision_scope(self, scope: float) -> None:
        """Uniformly change every agent's vision disk radius."""
        if scope <= 0:
            raise ValueError("bad-params: scope must be > 0")
        max_range = max(s.attack_range for s in self.specs)
        if scope < max_range:
            raise ValueError("scope-below-attack-range")
        self.specs = [replace(s, vision_scope=float(scope)) for s in self.specs]

    @property
    def vision_scope(self) -> float:
        return self.specs[0].vision_scope

    def _observations(self) -> tuple[Observation, ...]:
        return tuple(self._observe(i) for i in range(self.n_agents))

    def _entity_kinds(self) -> str:
        raise NotImplementedError

    def _observe(self, agent_id: int) -> Observation:
        st = self.state.agents[agent_id]
        spec = self.specs[agent_id]
        if not st.alive:
            return Observation(agent_id, False, tuple(st.position), 0.0, ())
        visible: list[VisibleEntity] = []
        for j, other in enumerate(self.state.agents):
            if j == agent_id or not other.alive:
                continue
            rel = other.position - st.position
            if math.hypot(*rel) <= spec.vision_scope:
                visible.append(
                    VisibleEntity(
                        "ally", j, tuple(rel), other.health / self.specs[j].max_health
                    )
                )
        kind = self._entity_kinds()
        for j, ent in enumerate(self.state.entities):
            if not ent.alive:
                continue
            rel = ent.position - st.position
            if math.hypot(*rel) <= spec.vision_scope:
                frac = 1.0 if kind == "landmark" else ent.health / self._entity_max_health
                visible.append(VisibleEntity(kind, j, tuple(rel), frac))
        return Observation(
            observer_id=agent_id,
            alive=True,
            position=tuple(st.position),
            health_frac=st.health / spec.max_health,
            visible=tuple(visible),
        )

    @property
    def _entity_max_health(self) -> float:
        return 1.0

    def _move(self, pos: np.ndarray, action: int, speed: float) -> np.ndarray:
        if action == 0:
            return pos
        delta = np.asarray(self.move_deltas[action - 1])
        new = pos + delta * speed
        return np.clip(new, 0.0, self.world_size)
