"""Keyed tabular action-value store."""

from __future__ import annotations

import numpy as np


class QFunction:
    """Mapping key -> action-value row, with a default for unseen keys and
    an absolute clip bound (reward_bound / (1 - gamma))."""

    def __init__(self, n_actions: int, default: float = 0.0, clip: float | None = None):
        self.n_actions = int(n_actions)
        self.default = float(default)
        self.clip = clip
        self.table: dict[tuple, np.ndarray] = {}

    def values(self, key: tuple) -> np.ndarray:
        """Read-only row (not inserted when missing)."""
        row = self.table.get(key)
        if row is None:
            return np.full(self.n_actions, self.default)
        return row

    def value(self, key: tuple, action: int) -> float:
        row = self.table.get(key)
        return self.default if row is None else float(row[action])

    def max_over(self, key: tuple, legal: list[int]) -> float:
        if not legal:
            return 0.0
        row = self.values(key)
        return float(max(row[a] for a in legal))

    def argmax_over(self, key: tuple, legal: list[int]) -> int:
        """Greedy action among legal ones; ties break to the lowest index."""
        row = self.values(key)
        best = legal[0]
        best_v = row[best]
        for a in legal[1:]:
            if row[a] > best_v:
                best, best_v = a, row[a]
        return best

    def update(self, key: tuple, action: int, delta: float) -> None:
        row = self.table.get(key)
        if row is None:
            row = np.full(self.n_actions, self.default)
            self.table[key] = row
        row[action] += delta
        if self.clip is not None:
            row[action] = min(max(row[action], -self.clip), self.clip)

    def __len__(self) -> int:
        return len(self.table)

    def snapshot(self) -> dict[tuple, list[float]]:
        return {k: [float(v) for v in row] for k, row in self.table.items()}
