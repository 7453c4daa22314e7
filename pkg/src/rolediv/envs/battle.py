"""Heterogeneous battle scenario against scripted chaser enemies.

Allies are mixed unit types (melee, ranged, healer, heavy, scout); enemies
all chase the nearest living ally and attack when in range. Dense reward is
damage dealt minus damage received (scaled), plus a terminal win bonus.

Action layout: 0 stay, 1..D moves, then one attack slot per enemy, then one
heal slot per ally. Attack slots are legal only for damaging non-healer
units with the target alive and in range; heal slots only for healers with
a damaged living teammate in range. Deaths from ally attacks land before
enemies act, and dead units neither act nor are targeted.
"""

from __future__ import annotations

import math

import numpy as np

from .base import AgentSpec, CoopEnv, EntityState, WorldState


class BattleEnv(CoopEnv):
    def __init__(
        self,
        ally_types: list[str],
        unit_table: dict[str, dict],
        n_enemies: int = 5,
        enemy_type: str = "chaser",
        world_size: float = 16.0,
        horizon: int = 60,
        vision_scope: float = 9.0,
        move_dirs: int = 4,
        damage_reward_scale: float = 0.1,
        win_bonus: float = 10.0,
        attrition_penalty: float = 0.0,
        reward_bound: float = 20.0,
        seed: int = 0,
    ):
        if not ally_types:
            raise ValueError("bad-params: at least one ally required")
        if n_enemies < 1:
            raise ValueError("bad-params: at least one enemy required")
        for t in list(ally_types) + [enemy_type]:
            if t not in unit_table:
                raise ValueError(f"bad-params: unknown unit type {t!r}")
        specs = []
        for i, t in enumerate(ally_types):
            row = unit_table[t]
            specs.append(
                AgentSpec(
                    agent_id=i,
                    unit_type=t,
                    max_health=row["max_health"],
                    attack_range=row["attack_range"],
                    damage=row["damage"],
                    vision_scope=vision_scope,
                    move_speed=row["move_speed"],
                )
            )
        super().__init__(
            scenario="hetero_battle",
            specs=specs,
            world_size=world_size,
            horizon=horizon,
            reward_bound=reward_bound,
            seed=seed,
            move_dirs=move_dirs,
        )
        enemy_row = unit_table[enemy_type]
        self.n_enemies = n_enemies
        self.enemy_max_health = float(enemy_row["max_health"])
        self.enemy_range = float(enemy_row["attack_range"])
        self.enemy_damage = float(enemy_row["damage"])
        self.enemy_speed = float(enemy_row["move_speed"])
        self.damage_reward_scale = float(damage_reward_scale)
        self.win_bonus = float(win_bonus)
        self.attrition_penalty = float(attrition_penalty)

    # -- action layout ----------------------------------------------------
    @property
    def _attack_base(self) -> int:
        return 1 + len(self.move_deltas)

    @property
    def _heal_base(self) -> int:
        return self._attack_base + self.n_enemies

    @property
    def n_actions(self) -> int:
        return self._heal_base + self.n_agents

    def attack_slot(self, enemy_index: int) -> int:
        return self._attack_base + enemy_index

    def heal_slot(self, ally_index: int) -> int:
        return self._heal_base + ally_index

    def legal_actions(self, agent_id: int) -> list[int]:
        st = self.state.agents[agent_id]
        if not st.alive:
            return []
        spec = self.specs[agent_id]
        legal = list(range(1 + len(self.move_deltas)))
        if spec.unit_type != "healer" and spec.damage > 0:
            for k, enemy in enumerate(self.state.entities):
                if enemy.alive and _dist(st.position, enemy.position) <= spec.attack_range:
                    legal.append(self.attack_slot(k))
        if spec.unit_type == "healer":
            for j, ally in enumerate(self.state.agents):
                if (
                    j != agent_id
                    and ally.alive
                    and ally.health < self.specs[j].max_health
                    and _dist(st.position, ally.position) <= spec.attack_range
                ):
                    legal.append(self.heal_slot(j))
        return legal

    # -- dynamics ----------------------------------------------------------
    def _spawn(self, rng: np.random.Generator) -> WorldState:
        s = self.world_size
        agents = []
        for i, spec in enumerate(self.specs):
            x = rng.uniform(0.5, s * 0.25)
            y = rng.uniform(0.2, 0.8) * s
            agents.append(EntityState(np.array([x, y]), spec.max_health, True))
        enemies = []
        for _ in range(self.n_enemies):
            x = rng.uniform(s * 0.75, s - 0.5)
            y = rng.uniform(0.2, 0.8) * s
            enemies.append(EntityState(np.array([x, y]), self.enemy_max_health, True))
        return WorldState(tick=0, agents=agents, entities=enemies)

    def _entity_kinds(self) -> str:
        return "enemy"

    @property
    def _entity_max_health(self) -> float:
        return self.enemy_max_health

    def _apply_actions(self, actions: dict[int, int]) -> dict:
        state = self.state
        dealt = 0.0
        # Ally attacks and heals resolve simultaneously on current positions.
        enemy_damage = [0.0] * self.n_enemies
        heals = [0.0] * self.n_agents
        for aid, act in actions.items():
            spec = self.specs[aid]
            if self._attack_base <= act < self._heal_base:
                enemy_damage[act - self._attack_base] += spec.damage
            elif act >= self._heal_base:
                heals[act - self._heal_base] += spec.damage
        for k, dmg in enumerate(enemy_damage):
            if dmg <= 0:
                continue
            enemy = state.entities[k]
            applied = min(dmg, enemy.health)
            enemy.health -= applied
            dealt += applied
            if enemy.health <= 0:
                enemy.health = 0.0
                enemy.alive = False
        for j, amount in enumerate(heals):
            if amount <= 0:
                continue
            ally = state.agents[j]
            ally.health = min(ally.health + amount, self.specs[j].max_health)
        # Moves for agents that chose a move/stay action.
        for aid, act in actions.items():
            if act < self._attack_base:
                st = state.agents[aid]
                st.position = self._move(st.position, act, self.specs[aid].move_speed)
        # Scripted enemies act on the post-ally state.
        received = self._enemy_turn()
        return {"damage_dealt": dealt, "damage_received": received}

    def _enemy_turn(self) -> float:
        """Each enemy chases the nearest living ally (ties: lowest id) and
        attacks when in range; resolution is simultaneous."""
        state = self.state
        alive_allies = [j for j in range(self.n_agents) if state.agents[j].alive]
        if not alive_allies:
            return 0.0
        ally_damage = [0.0] * self.n_agents
        moves: list[tuple[int, np.ndarray]] = []
        for k, enemy in enumerate(state.entities):
            if not enemy.alive:
                continue
            target = min(
                alive_allies,
                key=lambda j: (_dist(enemy.position, state.agents[j].position), j),
            )
            d = _dist(enemy.position, state.agents[target].position)
            if d <= self.enemy_range:
                ally_damage[target] += self.enemy_damage
            else:
                direction = state.agents[target].position - enemy.position
                step = direction / max(d, 1e-12) * min(self.enemy_speed, d)
                moves.append((k, np.clip(enemy.position + step, 0.0, self.world_size)))
        for k, new_pos in moves:
            state.entities[k].position = new_pos
        received = 0.0
        for j, dmg in enumerate(ally_damage):
            if dmg <= 0:
                continue
            ally = state.agents[j]
            applied = min(dmg, ally.health)
            ally.health -= applied
            received += applied
            if ally.health <= 0:
                ally.health = 0.0
                ally.alive = False
        return received

    def _reward_and_done(self, step_info: dict) -> tuple[float, bool, dict]:
        state = self.state
        enemies_left = sum(1 for e in state.entities if e.alive)
        allies_left = sum(1 for a in state.agents if a.alive)
        won = enemies_left == 0
        lost = allies_left == 0
        reward = self.damage_reward_scale * (
            step_info["damage_dealt"] - step_info["damage_received"]
        )
        # Optional pressure to finish fights instead of kiting forever.
        reward -= self.attrition_penalty * enemies_left
        if won:
            reward += self.win_bonus
        info = {
            "enemy_health_remaining": sum(e.health for e in state.entities),
            "allies_alive": allies_left,
            "won": won,
        }
        return reward, won or lost, info


def _dist(a: np.ndarray, b: np.ndarray) -> float:
    return float(math.hypot(a[0] - b[0], a[1] - b[1]))
