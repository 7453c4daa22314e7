"""Action-distribution kernels: windowed frequency profiles, symmetric KL,
and semantic (action-group) projection.

All functions are pure and operate on small 1-D numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

SUM_TOL = 1e-9


def _as_prob_vector(probs, name: str = "probs") -> np.ndarray:
    p = np.asarray(probs, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D vector")
    if np.any(p < 0):
        raise ValueError(f"{name} has negative entries")
    if abs(p.sum() - 1.0) > SUM_TOL:
        raise ValueError(f"{name} does not sum to 1 (got {p.sum()!r})")
    return p


@dataclass(frozen=True)
class ActionDistribution:
    """A probability distribution over a discrete action set."""

    probs: np.ndarray
    action_count: int

    def __post_init__(self):
        p = _as_prob_vector(self.probs)
        if len(p) != self.action_count:
            raise ValueError(
                f"probs length {len(p)} != action_count {self.action_count}"
            )
        object.__setattr__(self, "probs", p)

    @classmethod
    def from_probs(cls, probs) -> "ActionDistribution":
        p = np.asarray(probs, dtype=float)
        return cls(probs=p, action_count=len(p))

    @classmethod
    def one_hot(cls, action: int, action_count: int) -> "ActionDistribution":
        p = np.zeros(action_count)
        p[action] = 1.0
        return cls(probs=p, action_count=action_count)


@dataclass(frozen=True)
class ActionRoleProfile:
    """Windowed mean of an agent's per-step action distributions.

    ``center_step`` is the step the window is anchored at and
    ``half_window`` the number of steps included on each side (clipped at
    episode boundaries).
    """

    agent_id: int
    center_step: int
    half_window: int
    distribution: ActionDistribution


@dataclass(frozen=True)
class SemanticGrouping:
    """Surjective map from raw action indices to coarse semantic groups."""

    group_of: tuple[int, ...]
    group_count: int

    def __post_init__(self):
        g = tuple(int(x) for x in self.group_of)
        if self.group_count <= 0:
            raise ValueError("group_count must be positive")
        if self.group_count > len(g):
            raise ValueError("group_count exceeds action_count")
        for a, grp in enumerate(g):
            if not 0 <= grp < self.group_count:
                raise ValueError(f"action {a} maps to out-of-range group {grp}")
        object.__setattr__(self, "group_of", g)

    @property
    def action_count(self) -> int:
        return len(self.group_of)

    @classmethod
    def identity(cls, action_count: int) -> "SemanticGrouping":
        return cls(tuple(range(action_count)), action_count)


def action_role_profile(
    history: list[ActionDistribution],
    T: int,
    n: int,
    agent_id: int = 0,
) -> ActionRoleProfile:
    """Mean of the per-step action distributions in ``[T-n, T+n]``.

    The window is clipped at episode boundaries and the mean renormalized,
    so the profile is always a valid distribution.
    """
    if not history:
        raise ValueError("empty-history")
    if not 0 <= T < len(history):
        raise ValueError(f"center step {T} outside history of length {len(history)}")
    if n < 0:
        raise ValueError("half window must be >= 0")
    lo = max(0, T - n)
    hi = min(len(history) - 1, T + n)
    window = np.stack([history[t].probs for t in range(lo, hi + 1)])
    mean = window.mean(axis=0)
    mean = mean / mean.sum()
    return ActionRoleProfile(
        agent_id=agent_id,
        center_step=T,
        half_window=n,
        distribution=ActionDistribution.from_probs(mean),
    )


def symmetric_kl(
    p: ActionDistribution, q: ActionDistribution, smoothing: float = 1e-8
) -> float:
    """KL(p||q) + KL(q||p) after additive smoothing and renormalization.

    Smoothing keeps the divergence finite when windowed frequency profiles
    contain exact zeros. Exactly symmetric in its arguments and exactly 0
    when the smoothed distributions coincide.
    """
    if p.action_count != q.action_count:
        raise ValueError("dimension-mismatch")
    if smoothing <= 0:
        raise ValueError("smoothing must be > 0")
    ps = _smooth(p.probs, smoothing)
    qs = _smooth(q.probs, smoothing)
    forward = float(np.sum(ps * np.log(ps / qs)))
    backward = float(np.sum(qs * np.log(qs / ps)))
    return forward + backward


def _smooth(p: np.ndarray, eps: float) -> np.ndarray:
    s = p + eps
    return s / s.sum()


def semantic_projection(
    d: ActionDistribution, g: SemanticGrouping
) -> ActionDistribution:
    """Aggregate action mass into semantic groups."""
    if d.action_count != g.action_count:
        raise ValueError("dimension-mismatch")
    grouped = np.bincount(
        np.asarray(g.group_of), weights=d.probs, minlength=g.group_count
    )
    return ActionDistribution(probs=grouped, action_count=g.group_count)
