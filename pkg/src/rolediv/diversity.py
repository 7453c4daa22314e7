"""Role distances, per-task diversity aggregation, and time series.

Three distance families feed the same aggregation: action-based (symmetric
KL between windowed action profiles, optionally after semantic grouping),
trajectory-based (vision-disk overlap fraction), and contribution-based
(normalized spread of per-agent values).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .dists import ActionDistribution, SemanticGrouping, semantic_projection, symmetric_kl
from .episodes import EpisodeLog
from .overlap import ObservationDisk, observation_overlap

METRIC_KINDS = ("action_real", "action_semantic", "trajectory_overlap", "contribution")


@dataclass(frozen=True)
class PairwiseDistanceMatrix:
    """Symmetric non-negative distance grid with zero diagonal."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 2:
            raise ValueError("entries must be a square matrix of size >= 2")
        if np.any(m < 0):
            raise ValueError("entries must be non-negative")
        if not np.array_equal(m, m.T):
            raise ValueError("entries must be symmetric")
        if np.any(np.diag(m) != 0):
            raise ValueError("diagonal must be zero")
        object.__setattr__(self, "entries", m)

    @property
    def agent_count(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class DiversityTimeSeries:
    """Per-timestep diversity values; steps with fewer than two active
    agents are absent (gaps), never recorded as zero."""

    metric_kind: str
    values: tuple[tuple[int, float], ...]

    def __post_init__(self):
        if self.metric_kind not in METRIC_KINDS:
            raise ValueError(f"unknown metric kind {self.metric_kind!r}")

    def mean(self) -> float:
        if not self.values:
            return float("nan")
        return float(np.mean([v for _, v in self.values]))


def contribution_distance(values, i: int, j: int) -> float:
    """|v_i - v_j| normalized by the largest pairwise spread (max - min).

    Returns 0 when all values are equal (zero-denominator convention).
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("too-few-agents")
    if not (0 <= i < v.size and 0 <= j < v.size and i != j):
        raise ValueError("indices must be distinct and in range")
    denom = float(v.max() - v.min())
    if denom == 0.0:
        return 0.0
    return abs(float(v[i] - v[j])) / denom


def contribution_distance_value_scaled(values, i: int, j: int) -> float:
    """|v_i - v_j| normalized by the largest absolute value among agents.

    Unlike :func:`contribution_distance` this variant shrinks toward 0 when
    every agent carries a similar (large) value, which is the behavior the
    guideline thresholds are calibrated against. Clamped to [0, 1] for
    mixed-sign inputs.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        raise ValueError("too-few-agents")
    if not (0 <= i < v.size and 0 <= j < v.size and i != j):
        raise ValueError("indices must be distinct and in range")
    denom = float(np.abs(v).max())
    if denom == 0.0:
        return 0.0
    return min(abs(float(v[i] - v[j])) / denom, 1.0)


def role_diversity(m: PairwiseDistanceMatrix) -> float:
    """Mean distance over the A(A-1)/2 unordered distinct agent pairs."""
    a = m.agent_count
    idx = np.triu_indices(a, k=1)
    return float(m.entries[idx].mean())


def pairwise_matrix(ids: list[int], distance) -> PairwiseDistanceMatrix:
    """Build a symmetric matrix from a pair-distance callable over ids."""
    a = len(ids)
    m = np.zeros((a, a))
    for x, y in itertools.combinations(range(a), 2):
        d = distance(ids[x], ids[y])
        m[x, y] = d
        m[y, x] = d
    return PairwiseDistanceMatrix(m)


def _agent_profile(
    log: EpisodeLog, agent_id: int, T: int, n: int
) -> ActionDistribution | None:
    """Windowed action profile over the agent's alive steps in [T-n, T+n]."""
    lo = max(0, T - n)
    hi = min(len(log) - 1, T + n)
    rows = []
    for t in range(lo, hi + 1):
        a = log.agent_step(t, agent_id)
        if not a.alive:
            continue
        if a.dist is None:
            raise ValueError("missing-channel: action distribution absent")
        rows.append(np.asarray(a.dist, dtype=float))
    if not rows:
        return None
    mean = np.mean(rows, axis=0)
    return ActionDistribution.from_probs(mean / mean.sum())


def diversity_timeseries(
    log: EpisodeLog,
    kind: str,
    window: int | None = None,
    grouping: SemanticGrouping | None = None,
    smoothing: float = 1e-8,
    contribution_norm: str = "max_pair_diff",
) -> DiversityTimeSeries:
    """Per-timestep role diversity of one episode.

    A pair is dropped at step T if either agent is inactive there; steps
    with fewer than two active agents produce a gap in the series. The
    window for action kinds defaults to half the episode length.
    """
    if kind not in METRIC_KINDS:
        raise ValueError(f"unknown metric kind {kind!r}")
    if window is None:
        window = len(log) // 2
    if kind == "action_semantic" and grouping is None:
        raise ValueError("missing-channel: semantic grouping required")

    values: list[tuple[int, float]] = []
    for t in range(len(log)):
        active = log.agents_alive_at(t)
        if len(active) < 2:
            continue
        if kind in ("action_real", "action_semantic"):
            profiles = {}
            for aid in active:
                prof = _agent_profile(log, aid, t, window)
                if prof is None:
                    continue
                if kind == "action_semantic":
                    prof = semantic_projection(prof, grouping)
                profiles[aid] = prof
            usable = [aid for aid in active if aid in profiles]
            if len(usable) < 2:
                continue
            matrix = pairwise_matrix(
                usable, lambda x, y: symmetric_kl(profiles[x], profiles[y], smoothing)
            )
        elif kind == "trajectory_overlap":
            disks = {}
            for aid in active:
                a = log.agent_step(t, aid)
                disks[aid] = ObservationDisk(a.pos, log.vision_scope)
            matrix = pairwise_matrix(
                active, lambda x, y: observation_overlap(disks[x], disks[y])
            )
        else:  # contribution
            vals = []
            for aid in active:
                a = log.agent_step(t, aid)
                if a.q is None:
                    raise ValueError("missing-channel: per-agent value absent")
                vals.append(a.q)
            dist_fn = (
                contribution_distance
                if contribution_norm == "max_pair_diff"
                else contribution_distance_value_scaled
            )
            index_of = {aid: k for k, aid in enumerate(active)}
            matrix = pairwise_matrix(
                active, lambda x, y: dist_fn(vals, index_of[x], index_of[y])
            )
        values.append((t, role_diversity(matrix)))
    return DiversityTimeSeries(metric_kind=kind, values=tuple(values))


@dataclass(frozen=True)
class TaskMeasurement:
    """The scalar summary of a task: two action-diversity scales, mean
    pairwise trajectory overlap, and contribution diversity."""

    action_semantic: float
    action_real: float
    trajectory_overlap: float
    contribution: float
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.action_semantic < 0 or self.action_real < 0:
            raise ValueError("action diversities must be >= 0")
        for name in ("trajectory_overlap", "contribution"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")

    def as_dict(self) -> dict:
        return {
            "action_semantic": self.action_semantic,
            "action_real": self.action_real,
            "trajectory_overlap": self.trajectory_overlap,
            "contribution": self.contribution,
            "provenance": dict(self.provenance),
        }


def _series_reduce(series: DiversityTimeSeries, reducer: str) -> float:
    if not series.values:
        return float("nan")
    vals = [v for _, v in series.values]
    if reducer == "time_mean":
        return float(np.mean(vals))
    if reducer == "episode_end":
        return float(vals[-1])
    if reducer == "episode_max":
        return float(np.max(vals))
    raise ValueError(f"unknown reducer {reducer!r}")


def episode_max_values(log: EpisodeLog) -> dict[int, float]:
    """Each agent's maximum chosen-action value over its alive steps."""
    best: dict[int, float] = {}
    for t in range(len(log)):
        for a in log.steps[t].agents:
            if not a.alive or a.q is None:
                continue
            if a.agent_id not in best or a.q > best[a.agent_id]:
                best[a.agent_id] = a.q
    return best


def contribution_of_episode(
    log: EpisodeLog, normalization: str = "max_value"
) -> float:
    """Diversity of per-agent episode-max values (one scalar per episode)."""
    best = episode_max_values(log)
    if len(best) < 2:
        return float("nan")
    ids = sorted(best)
    vals = [best[a] for a in ids]
    dist_fn = (
        contribution_distance_value_scaled
        if normalization == "max_value"
        else contribution_distance
    )
    matrix = pairwise_matrix(
        list(range(len(ids))), lambda x, y: dist_fn(vals, x, y)
    )
    return role_diversity(matrix)


def task_measurement(
    logs: list[EpisodeLog],
    grouping: SemanticGrouping | None = None,
    window: int | None = None,
    smoothing: float = 1e-8,
    reducer: str = "time_mean",
    contribution_normalization: str = "max_value",
) -> TaskMeasurement:
    """Episode-and-time-averaged diversity scalars from baseline-policy logs.

    Action and trajectory scalars reduce each episode's time series
    (``time_mean`` by default) and average over episodes. The contribution
    scalar compares per-agent episode-max values, normalized by the largest
    value (``max_value``) so near-identical agents measure near zero; pass
    ``max_pair_diff`` for the range-normalized variant.
    """
    if not logs:
        raise ValueError("no-logs")
    per_episode: dict[str, list[float]] = {k: [] for k in METRIC_KINDS}
    for log in logs:
        real = diversity_timeseries(log, "action_real", window, None, smoothing)
        per_episode["action_real"].append(_series_reduce(real, reducer))
        if grouping is not None:
            sem = diversity_timeseries(
                log, "action_semantic", window, grouping, smoothing
            )
            per_episode["action_semantic"].append(_series_reduce(sem, reducer))
        else:
            per_episode["action_semantic"].append(0.0)
        traj = diversity_timeseries(log, "trajectory_overlap", window)
        per_episode["trajectory_overlap"].append(_series_reduce(traj, reducer))
        per_episode["contribution"].append(
            contribution_of_episode(log, contribution_normalization)
        )

    def agg(key: str) -> float:
        vals = [v for v in per_episode[key] if not np.isnan(v)]
        return float(np.mean(vals)) if vals else 0.0

    provenance = {
        "episodes": len(logs),
        "config_hash": logs[0].config_hash,
        "scenario": logs[0].scenario,
        "reducer": reducer,
        "contribution_normalization": contribution_normalization,
    }
    return TaskMeasurement(
        action_semantic=agg("action_semantic"),
        action_real=agg("action_real"),
        trajectory_overlap=min(agg("trajectory_overlap"), 1.0),
        contribution=min(agg("contribution"), 1.0),
        provenance=provenance,
    )
