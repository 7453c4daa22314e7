"""Epsilon-greedy collection, replay, periodic TD updates, and greedy
evaluation episodes that emit full episode logs for the diversity metrics.

A run is deterministic in (env factory, configs, seed): the collection
stream, replay sampling, and evaluation all draw from seeded generators.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..episodes import AgentStep, EpisodeLog, StepRecord
from .credit import AgentTransition, CreditAssignment, Transition, select_actions, td_update
from .encoding import CommConfig, EncoderConfig, SharingPlan, build_keys, default_encoder
from .qtable import QFunction


@dataclass(frozen=True)
class TrainingConfig:
    gamma: float = 0.95
    alpha: float = 0.1
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_steps: int = 5000
    replay_capacity: int = 5000
    batch_size: int = 32
    total_steps: int = 20000
    train_every: int = 2
    eval_every: int = 2000
    eval_episodes: int = 4
    reward_bound: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")
        if self.epsilon_end > self.epsilon_start:
            raise ValueError("epsilon schedule must not increase")

    def epsilon_at(self, step: int) -> float:
        if self.epsilon_decay_steps <= 0 or step >= self.epsilon_decay_steps:
            return self.epsilon_end
        frac = step / self.epsilon_decay_steps
        return self.epsilon_start + frac * (self.epsilon_end - self.epsilon_start)

    @property
    def q_clip(self) -> float:
        return self.reward_bound / (1.0 - self.gamma)


@dataclass
class TrainingRun:
    curve: list[tuple[int, float]]
    qf: QFunction
    credit: CreditAssignment
    eval_logs: list[EpisodeLog]
    config: TrainingConfig

    @property
    def final_return(self) -> float:
        return self.curve[-1][1]

    def steps_to_threshold(self, target: float) -> int:
        """First evaluated step whose mean return reaches target; the total
        step budget when the target is never reached."""
        for step, ret in self.curve:
            if ret >= target:
                return step
        return self.config.total_steps


def _legal_map(env) -> dict[int, list[int]]:
    return {
        i: env.legal_actions(i)
        for i in range(env.n_agents)
        if env.state.agents[i].alive
    }


def run_episode(
    env,
    qf: QFunction,
    plan: SharingPlan,
    comm: CommConfig,
    enc: EncoderConfig,
    act_eps: float,
    rng: np.random.Generator,
    collect: list[Transition] | None = None,
    log: EpisodeLog | None = None,
    log_mixture_eps: float | None = None,
) -> float:
    """Play one episode; optionally collect transitions and/or a log.

    The logged per-step action distribution is the epsilon-greedy mixture at
    ``log_mixture_eps`` (defaults to the acting epsilon), so profiles stay
    smooth even when evaluation acts greedily.
    """
    obs = env.reset()
    keys = build_keys(enc, plan, comm, env.specs, list(obs))
    total = 0.0
    mix_eps = act_eps if log_mixture_eps is None else log_mixture_eps
    while True:
        legal = _legal_map(env)
        actions, _ = select_actions(qf, keys, legal, act_eps, rng)
        if log is not None:
            _, mixtures = select_actions(qf, keys, legal, mix_eps, np.random.default_rng(0))
            agents = []
            for i in range(env.n_agents):
                st = env.state.agents[i]
                if i in actions:
                    agents.append(
                        AgentStep(
                            agent_id=i,
                            pos=(float(st.position[0]), float(st.position[1])),
                            alive=True,
                            dist=tuple(float(x) for x in mixtures[i]),
                            action=actions[i],
                            q=qf.value(keys[i], actions[i]),
                        )
                    )
                else:
                    agents.append(
                        AgentStep(
                            agent_id=i,
                            pos=(float(st.position[0]), float(st.position[1])),
                            alive=False,
                        )
                    )
        res = env.step(actions)
        total += res.reward
        next_keys = build_keys(enc, plan, comm, env.specs, list(res.observations))
        if log is not None:
            log.steps.append(
                StepRecord(
                    tick=env.state.tick - 1,
                    reward=res.reward,
                    agents=tuple(agents),
                    info={k: _jsonable(v) for k, v in res.info.items()},
                )
            )
        if collect is not None:
            entries = []
            for aid, act in actions.items():
                alive_next = env.state.agents[aid].alive
                entries.append(
                    AgentTransition(
                        agent_id=aid,
                        key=keys[aid],
                        action=act,
                        next_key=next_keys.get(aid) if alive_next else None,
                        next_legal=tuple(env.legal_actions(aid)) if alive_next else (),
                    )
                )
            collect.append(
                Transition(agents=tuple(entries), reward=res.reward, done=res.terminated)
            )
        keys = next_keys
        if res.terminated or res.truncated:
            return total


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    return v


def evaluate(
    env_factory,
    qf: QFunction,
    plan: SharingPlan,
    comm: CommConfig,
    enc: EncoderConfig,
    config: TrainingConfig,
    eval_index: int,
    mixture_eps: float,
    config_hash: str = "",
    keep_logs: bool = False,
) -> tuple[float, list[EpisodeLog]]:
    returns = []
    logs: list[EpisodeLog] = []
    for ep in range(config.eval_episodes):
        env_seed = int(np.random.SeedSequence([config.seed, 7, eval_index, ep]).generate_state(1)[0])
        env = env_factory(env_seed)
        log = None
        if keep_logs:
            log = EpisodeLog(
                scenario=env.scenario,
                config_hash=config_hash,
                seed=config.seed,
                episode=ep,
                vision_scope=env.vision_scope,
                action_count=env.n_actions,
                agent_ids=tuple(range(env.n_agents)),
                unit_types=tuple(s.unit_type for s in env.specs),
            )
        rng = np.random.default_rng([config.seed, 11, eval_index, ep])
        ret = run_episode(
            env, qf, plan, comm, enc, 0.0, rng, log=log, log_mixture_eps=mixture_eps
        )
        returns.append(ret)
        if log is not None:
            logs.append(log)
    return float(np.mean(returns)), logs


def train(
    env_factory,
    config: TrainingConfig,
    plan: SharingPlan,
    credit: CreditAssignment,
    comm: CommConfig = CommConfig(),
    encoder: EncoderConfig | None = None,
    config_hash: str = "",
    keep_all_eval_logs: bool = False,
) -> TrainingRun:
    """Train one policy configuration and return its learning curve, final
    tables, and the final evaluation's episode logs."""
    env = env_factory(config.seed)
    enc = encoder if encoder is not None else default_encoder(env)
    qf = QFunction(env.n_actions, clip=config.q_clip)
    replay: deque[Transition] = deque(maxlen=config.replay_capacity)
    act_rng = np.random.default_rng([config.seed, 1])
    batch_rng = np.random.default_rng([config.seed, 2])

    curve: list[tuple[int, float]] = []
    all_logs: list[EpisodeLog] = []
    eval_count = 0

    def run_eval(step: int, keep: bool) -> list[EpisodeLog]:
        nonlocal eval_count
        ret, logs = evaluate(
            env_factory,
            qf,
            plan,
            comm,
            enc,
            config,
            eval_index=eval_count,
            mixture_eps=config.epsilon_at(step),
            config_hash=config_hash,
            keep_logs=keep,
        )
        eval_count += 1
        curve.append((step, ret))
        return logs

    if config.total_steps == 0:
        logs = run_eval(0, True)
        return TrainingRun(curve=curve, qf=qf, credit=credit, eval_logs=logs, config=config)

    run_eval(0, keep_all_eval_logs)

    obs = env.reset()
    keys = build_keys(enc, plan, comm, env.specs, list(obs))
    for step in range(1, config.total_steps + 1):
        legal = _legal_map(env)
        if not legal:
            obs = env.reset()
            keys = build_keys(enc, plan, comm, env.specs, list(obs))
            legal = _legal_map(env)
        eps = config.epsilon_at(step)
        actions, _ = select_actions(qf, keys, legal, eps, act_rng)
        res = env.step(actions)
        next_keys = build_keys(enc, plan, comm, env.specs, list(res.observations))
        entries = []
        for aid, act in actions.items():
            alive_next = env.state.agents[aid].alive
            entries.append(
                AgentTransition(
                    agent_id=aid,
                    key=keys[aid],
                    action=act,
                    next_key=next_keys.get(aid) if alive_next else None,
                    next_legal=tuple(env.legal_actions(aid)) if alive_next else (),
                )
            )
        replay.append(
            Transition(agents=tuple(entries), reward=res.reward, done=res.terminated)
        )
        keys = next_keys
        if res.terminated or res.truncated:
            obs = env.reset()
            keys = build_keys(enc, plan, comm, env.specs, list(obs))
        if step % config.train_every == 0 and len(replay) >= config.batch_size:
            idx = batch_rng.integers(len(replay), size=config.batch_size)
            batch = [replay[int(i)] for i in idx]
            td_update(qf, credit, batch, config.alpha, config.gamma)
        if config.eval_every > 0 and step % config.eval_every == 0 and step < config.total_steps:
            logs = run_eval(step, keep_all_eval_logs)
            all_logs.extend(logs)

    final_logs = run_eval(config.total_steps, True)
    if keep_all_eval_logs:
        all_logs.extend(final_logs)
    else:
        all_logs = final_logs
    return TrainingRun(curve=curve, qf=qf, credit=credit, eval_logs=all_logs, config=config)
