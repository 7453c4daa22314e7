"""Observation discretization, sharing-plan key prefixes, and communication.

A table key is ``prefix + comm_block + features``. The prefix encodes the
parameter-sharing strategy: shared tables use no prefix (clone agents with
identical observations hit the same row), per-agent prefixes keep rows
independent, type/group prefixes pool within a type or attribute group.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from ..envs.base import AgentSpec, Observation

SHARING_MODES = ("shared", "partly_shared", "no_shared", "selective")
EMPTY_BUCKET = -1  # designated slot when there is nothing to aggregate


def selective_groups(specs: list[AgentSpec]) -> dict[int, int]:
    """Attribute-based grouping: identical unit types share a group, group
    ids contiguous from 0 in first-seen order."""
    if not specs:
        raise ValueError("no agent specs")
    groups: dict[str, int] = {}
    out: dict[int, int] = {}
    for spec in specs:
        if spec.unit_type not in groups:
            groups[spec.unit_type] = len(groups)
        out[spec.agent_id] = groups[spec.unit_type]
    return out


@dataclass(frozen=True)
class SharingPlan:
    mode: str = "no_shared"
    groups: dict[int, int] | None = None  # required for selective

    def __post_init__(self):
        if self.mode not in SHARING_MODES:
            raise ValueError(f"unknown sharing mode {self.mode!r}")
        if self.mode == "selective" and self.groups is None:
            raise ValueError("selective sharing requires a grouping")

    @classmethod
    def for_specs(cls, mode: str, specs: list[AgentSpec]) -> "SharingPlan":
        groups = selective_groups(specs) if mode == "selective" else None
        return cls(mode=mode, groups=groups)

    def prefix(self, agent_id: int, unit_type: str) -> tuple:
        if self.mode == "shared":
            return ()
        if self.mode == "partly_shared":
            return (unit_type,)
        if self.mode == "no_shared":
            return (agent_id,)
        return (self.groups[agent_id],)


@dataclass(frozen=True)
class CommConfig:
    """When enabled, each key gains a bucketed mean-of-others block."""

    enabled: bool = False


@dataclass(frozen=True)
class EncoderConfig:
    world_size: float
    position_bins: int = 4
    rel_clip: int = 2
    health_bins: int = 4
    count_cap: int = 3
    top_k_landmarks: int = 2
    include_landmarks: bool = True
    include_enemies: bool = False
    include_injured_ally: bool = False

    @property
    def cell(self) -> float:
        return self.world_size / self.position_bins


def default_encoder(env) -> EncoderConfig:
    """Feature set matched to the scenario family."""
    if env.scenario in ("spread", "double_spread"):
        return EncoderConfig(world_size=env.world_size)
    return EncoderConfig(
        world_size=env.world_size,
        include_landmarks=False,
        include_enemies=True,
        include_injured_ally=True,
    )


def _own_cell(cfg: EncoderConfig, pos: tuple[float, float]) -> tuple[int, int]:
    cx = min(int(pos[0] / cfg.cell), cfg.position_bins - 1)
    cy = min(int(pos[1] / cfg.cell), cfg.position_bins - 1)
    return cx, cy


def _rel_cell(cfg: EncoderConfig, rel: tuple[float, float]) -> tuple[int, int]:
    rx = max(-cfg.rel_clip, min(cfg.rel_clip, int(math.floor(rel[0] / cfg.cell))))
    ry = max(-cfg.rel_clip, min(cfg.rel_clip, int(math.floor(rel[1] / cfg.cell))))
    return rx, ry


def _health_bucket(cfg: EncoderConfig, frac: float) -> int:
    return min(int(frac * cfg.health_bins), cfg.health_bins - 1)


def encode_observation(cfg: EncoderConfig, obs: Observation) -> tuple:
    """Bucketed feature signature of one observation (no prefix, no comm)."""
    if not obs.alive:
        return ("dead",)
    feats: list = list(_own_cell(cfg, obs.position))
    feats.append(_health_bucket(cfg, obs.health_frac))
    if cfg.include_landmarks:
        landmarks = sorted(
            (v for v in obs.visible if v.kind == "landmark"),
            key=lambda v: (math.hypot(*v.rel_pos), v.index),
        )
        for k in range(cfg.top_k_landmarks):
            if k < len(landmarks):
                feats.extend(_rel_cell(cfg, landmarks[k].rel_pos))
            else:
                feats.extend((EMPTY_BUCKET, EMPTY_BUCKET))
    if cfg.include_enemies:
        enemies = sorted(
            (v for v in obs.visible if v.kind == "enemy"),
            key=lambda v: (math.hypot(*v.rel_pos), v.index),
        )
        if enemies:
            feats.extend(_rel_cell(cfg, enemies[0].rel_pos))
            feats.append(_health_bucket(cfg, enemies[0].health_frac))
        else:
            feats.extend((EMPTY_BUCKET, EMPTY_BUCKET, EMPTY_BUCKET))
        feats.append(min(len(enemies), cfg.count_cap))
    if cfg.include_injured_ally:
        injured = sorted(
            (v for v in obs.visible if v.kind == "ally" and v.health_frac < 1.0),
            key=lambda v: (math.hypot(*v.rel_pos), v.index),
        )
        if injured:
            feats.extend(_rel_cell(cfg, injured[0].rel_pos))
        else:
            feats.extend((EMPTY_BUCKET, EMPTY_BUCKET))
    return tuple(feats)


def apply_communication(
    cfg: EncoderConfig, comm: CommConfig, observations: list[Observation]
) -> dict[int, tuple]:
    """Per-agent communication block: bucketed mean of the other living
    agents' positions and health. Identity (empty blocks) when disabled;
    a designated empty bucket when an agent has no living teammates."""
    if not comm.enabled:
        return {obs.observer_id: () for obs in observations}
    blocks: dict[int, tuple] = {}
    for obs in observations:
        others = [o for o in observations if o.observer_id != obs.observer_id and o.alive]
        if not others:
            blocks[obs.observer_id] = (EMPTY_BUCKET, EMPTY_BUCKET, EMPTY_BUCKET)
            continue
        mx = sum(o.position[0] for o in others) / len(others)
        my = sum(o.position[1] for o in others) / len(others)
        mh = sum(o.health_frac for o in others) / len(others)
        blocks[obs.observer_id] = (*_own_cell(cfg, (mx, my)), _health_bucket(cfg, mh))
    return blocks


def build_keys(
    cfg: EncoderConfig,
    plan: SharingPlan,
    comm: CommConfig,
    specs: list[AgentSpec],
    observations: list[Observation],
) -> dict[int, tuple]:
    """Full table keys for every living agent."""
    blocks = apply_communication(cfg, comm, observations)
    keys: dict[int, tuple] = {}
    for obs in observations:
        if not obs.alive:
            continue
        spec = specs[obs.observer_id]
        keys[obs.observer_id] = (
            plan.prefix(obs.observer_id, spec.unit_type)
            + blocks[obs.observer_id]
            + encode_observation(cfg, obs)
        )
    return keys
