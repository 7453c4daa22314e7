"""Episode logs: the per-timestep record every diversity metric reads.

On disk a log is line-delimited JSON: one self-describing header record
followed by one record per tick. Serialization is canonical (sorted keys,
no whitespace variance) so serialize -> parse -> serialize is the identity.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass(frozen=True)
class AgentStep:
    """One agent's slice of a timestep record.

    ``dist`` is the behavior policy's action distribution (an epsilon-greedy
    mixture during training so early-episode profiles are smooth), ``action``
    the chosen action and ``q`` the chosen action's table value. All three
    are None for a dead agent.
    """

    agent_id: int
    pos: tuple[float, float]
    alive: bool
    dist: tuple[float, ...] | None = None
    action: int | None = None
    q: float | None = None


@dataclass(frozen=True)
class StepRecord:
    tick: int
    reward: float
    agents: tuple[AgentStep, ...]
    info: dict = field(default_factory=dict)


@dataclass
class EpisodeLog:
    scenario: str
    config_hash: str
    seed: int
    episode: int
    vision_scope: float
    action_count: int
    agent_ids: tuple[int, ...]
    unit_types: tuple[str, ...]
    steps: list[StepRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.steps)

    def agents_alive_at(self, t: int) -> list[int]:
        return [a.agent_id for a in self.steps[t].agents if a.alive]

    def agent_step(self, t: int, agent_id: int) -> AgentStep:
        for a in self.steps[t].agents:
            if a.agent_id == agent_id:
                return a
        raise KeyError(f"agent {agent_id} absent from step {t}")


def _dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def to_lines(log: EpisodeLog) -> list[str]:
    header = {
        "kind": "header",
        "scenario": log.scenario,
        "config_hash": log.config_hash,
        "seed": log.seed,
        "episode": log.episode,
        "vision_scope": log.vision_scope,
        "action_count": log.action_count,
        "agent_ids": list(log.agent_ids),
        "unit_types": list(log.unit_types),
    }
    lines = [_dumps(header)]
    for step in log.steps:
        rec = {
            "kind": "step",
            "tick": step.tick,
            "reward": step.reward,
            "info": step.info,
            "agents": [
                {
                    "agent_id": a.agent_id,
                    "pos": list(a.pos),
                    "alive": a.alive,
                    "dist": None if a.dist is None else list(a.dist),
                    "action": a.action,
                    "q": a.q,
                }
                for a in step.agents
            ],
        }
        lines.append(_dumps(rec))
    return lines


def from_lines(lines: list[str]) -> EpisodeLog:
    if not lines:
        raise ValueError("empty episode log")
    header = json.loads(lines[0])
    if header.get("kind") != "header":
        raise ValueError("first record is not a header")
    log = EpisodeLog(
        scenario=header["scenario"],
        config_hash=header["config_hash"],
        seed=header["seed"],
        episode=header["episode"],
        vision_scope=header["vision_scope"],
        action_count=header["action_count"],
        agent_ids=tuple(header["agent_ids"]),
        unit_types=tuple(header["unit_types"]),
    )
    for line in lines[1:]:
        rec = json.loads(line)
        if rec.get("kind") != "step":
            raise ValueError(f"unexpected record kind {rec.get('kind')!r}")
        agents = tuple(
            AgentStep(
                agent_id=a["agent_id"],
                pos=tuple(a["pos"]),
                alive=a["alive"],
                dist=None if a["dist"] is None else tuple(a["dist"]),
                action=a["action"],
                q=a["q"],
            )
            for a in rec["agents"]
        )
        log.steps.append(
            StepRecord(tick=rec["tick"], reward=rec["reward"], agents=agents, info=rec["info"])
        )
    return log


def write_logs(path, logs: list[EpisodeLog]) -> None:
    with open(path, "w") as fh:
        for log in logs:
            for line in to_lines(log):
                fh.write(line + "\n")


def read_logs(path) -> list[EpisodeLog]:
    logs: list[EpisodeLog] = []
    current: list[str] = []
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            if '"kind":"header"' in line and current:
                logs.append(from_lines(current))
                current = []
            current.append(line)
    if current:
        logs.append(from_lines(current))
    return logs
