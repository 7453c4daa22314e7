"""Scenario construction and the default unit attribute table.

The attribute table is a calibration knob, not ground truth; scenarios may
override any row via params.
"""

from __future__ import annotations

import copy

from .battle import BattleEnv
from .spread import SpreadEnv

# health / range / damage / speed per unit type. Healer "damage" is its heal
# amount per action; scouts cannot attack at all.
UNIT_TYPES: dict[str, dict] = {
    "melee": {"max_health": 45.0, "attack_range": 1.5, "damage": 6.0, "move_speed": 1.0},
    "ranged": {"max_health": 30.0, "attack_range": 4.0, "damage": 5.0, "move_speed": 1.0},
    "healer": {"max_health": 30.0, "attack_range": 3.0, "damage": 4.0, "move_speed": 1.0},
    "heavy": {"max_health": 80.0, "attack_range": 1.5, "damage": 9.0, "move_speed": 1.0},
    "scout": {"max_health": 14.0, "attack_range": 1.0, "damage": 1.0, "move_speed": 1.0},
    "chaser": {"max_health": 35.0, "attack_range": 1.5, "damage": 4.0, "move_speed": 0.8},
}

SCENARIO_NAMES = ("spread", "double_spread", "hetero_battle")


def make_scenario(name: str, params: dict | None = None, seed: int = 0):
    """Build an environment; identical (name, params, seed) triples yield
    bitwise-identical trajectories under identical action sequences."""
    params = dict(params or {})
    if name == "spread":
        return SpreadEnv(seed=seed, scenario="spread", **params)
    if name == "double_spread":
        world_size = params.pop("world_size", 10.0)
        separation = params.pop("cluster_separation", 0.6)
        lo = world_size * (0.5 - separation / 2)
        hi = world_size * (0.5 + separation / 2)
        clusters = params.pop("clusters", [(lo, lo), (hi, hi)])
        radius = params.pop("cluster_radius", world_size * 0.08)
        return SpreadEnv(
            seed=seed,
            scenario="double_spread",
            world_size=world_size,
            landmark_clusters=[tuple(c) for c in clusters],
            cluster_radius=radius,
            **params,
        )
    if name == "hetero_battle":
        table = copy.deepcopy(UNIT_TYPES)
        for unit, row in params.pop("unit_overrides", {}).items():
            table.setdefault(unit, {}).update(row)
        return BattleEnv(seed=seed, unit_table=table, **params)
    raise ValueError(f"unknown-scenario: {name!r}")
