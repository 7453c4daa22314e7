"""Coverage scenarios: agents spread out to occupy landmarks.

Reward each step is the negative sum over landmarks of the distance to the
closest agent, so 0 (the maximum) is reached exactly when every landmark
has an agent on it. ``double_spread`` places the landmarks in two separated
clusters so the team must partition itself.
"""

from __future__ import annotations

import math

import numpy as np

from .base import AgentSpec, CoopEnv, EntityState, WorldState


def _lattice_points(rng: np.random.Generator, count: int, size: float) -> list[np.ndarray]:
    cells = int(size) + 1
    chosen = rng.choice(cells * cells, size=count, replace=False)
    return [np.array([float(c % cells), float(c // cells)]) for c in chosen]


class SpreadEnv(CoopEnv):
    def __init__(
        self,
        n_agents: int = 3,
        n_landmarks: int | None = None,
        world_size: float = 5.0,
        horizon: int = 25,
        vision_scope: float | None = None,
        move_dirs: int = 4,
        agent_starts: list[tuple[float, float]] | None = None,
        landmarks: list[tuple[float, float]] | None = None,
        respawn_agents: bool = True,
        seed: int = 0,
        layout_seed: int = 0,
        scenario: str = "spread",
        landmark_clusters: list[tuple[float, float]] | None = None,
        cluster_radius: float = 0.0,
    ):
        if n_agents < 1:
            raise ValueError("bad-params: need at least one agent")
        n_landmarks = n_agents if n_landmarks is None else n_landmarks
        if n_landmarks < 1:
            raise ValueError("bad-params: need at least one landmark")
        scope = float(vision_scope) if vision_scope else world_size * 2.0
        specs = [
            AgentSpec(
                agent_id=i,
                unit_type="mover",
                max_health=1.0,
                attack_range=0.0,
                damage=0.0,
                vision_scope=scope,
                move_speed=1.0,
            )
            for i in range(n_agents)
        ]
        diag = world_size * math.sqrt(2.0)
        super().__init__(
            scenario=scenario,
            specs=specs,
            world_size=world_size,
            horizon=horizon,
            reward_bound=n_landmarks * diag,
            seed=seed,
            move_dirs=move_dirs,
        )
        self.n_landmarks = n_landmarks
        self._fixed_starts = (
            [np.asarray(p, dtype=float) for p in agent_starts] if agent_starts else None
        )
        self._respawn_agents = respawn_agents
        self._landmark_clusters = landmark_clusters
        self._cluster_radius = cluster_radius
        self._fixed_landmarks = (
            [np.asarray(p, dtype=float) for p in landmarks] if landmarks else None
        )
        if self._fixed_landmarks is None:
            # Layout is pinned by layout_seed, independent of the episode
            # stream seed, so train and eval instances share one task.
            rng = np.random.default_rng([layout_seed, 0xFACE])
            self._fixed_landmarks = self._place_landmarks(rng)

    def _place_landmarks(self, rng: np.random.Generator) -> list[np.ndarray]:
        if self._landmark_clusters is None:
            return _lattice_points(rng, self.n_landmarks, self.world_size)
        points = []
        per = self.n_landmarks // len(self._landmark_clusters)
        extras = self.n_landmarks - per * len(self._landmark_clusters)
        for c_idx, center in enumerate(self._landmark_clusters):
            count = per + (1 if c_idx < extras else 0)
            for k in range(count):
                offset = rng.uniform(-self._cluster_radius, self._cluster_radius, 2)
                p = np.clip(np.asarray(center) + offset, 0.0, self.world_size)
                points.append(p)
        return points

    @property
    def n_actions(self) -> int:
        return 1 + len(self.move_deltas)

    def legal_actions(self, agent_id: int) -> list[int]:
        if not self.state.agents[agent_id].alive:
            return []
        return list(range(self.n_actions))

    def _spawn(self, rng: np.random.Generator) -> WorldState:
        if self._fixed_starts is not None:
            starts = [p.copy() for p in self._fixed_starts]
        elif not self._respawn_agents and self.state is not None:
            starts = [a.position.copy() for a in self.state.agents]
        else:
            starts = _lattice_points(rng, self.n_agents, self.world_size)
        agents = [EntityState(p, 1.0, True) for p in starts]
        entities = [EntityState(p.copy(), 1.0, True) for p in self._fixed_landmarks]
        return WorldState(tick=0, agents=agents, entities=entities)

    def _entity_kinds(self) -> str:
        return "landmark"

    def _apply_actions(self, actions: dict[int, int]) -> dict:
        for aid, act in actions.items():
            st = self.state.agents[aid]
            st.position = self._move(st.position, act, self.specs[aid].move_speed)
        return {}

    def _reward_and_done(self, step_info: dict) -> tuple[float, bool, dict]:
        total = 0.0
        for lm in self.state.entities:
            dists = [
                float(np.linalg.norm(a.position - lm.position))
                for a in self.state.agents
                if a.alive
            ]
            total += min(dists) if dists else self.world_size * math.sqrt(2.0)
        reward = -total
        info = {"coverage_cost": total}
        return reward, False, info
