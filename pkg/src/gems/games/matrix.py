"""Two-player zero-sum matrix games, including RPS and seeded random matrices."""

from __future__ import annotations

import numpy as np

from .. import kernels
from .base import Game, GameError, check_mixture

RPS_PAYOFF = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


class MatrixGame(Game):
    """Row player earns M[a, b] raw, column player the negative.

    Symmetric self-play (shared population) applies when M is square and
    antisymmetric; otherwise the two seats keep separate populations.
    """

    num_players = 2
    zero_sum = True
    n_uniforms = 2
    max_decisions = 1

    def __init__(self, payoff, name: str = "matrix", bound: float | None = None):
        self.payoff = np.ascontiguousarray(payoff, dtype=np.float64)
        if self.payoff.ndim != 2:
            raise GameError("payoff matrix must be 2-D")
        if not np.all(np.isfinite(self.payoff)):
            raise GameError("payoff matrix must be finite")
        self.name = name
        if bound is None:
            bound = max(1.0, float(np.abs(self.payoff).max()))
        self.bound = float(bound)
        square = self.payoff.shape[0] == self.payoff.shape[1]
        self.symmetric = bool(square and np.abs(self.payoff + self.payoff.T).max() < 1e-12)

    @classmethod
    def rps(cls):
        return cls(RPS_PAYOFF, name="rps")

    @classmethod
    def random_zero_sum(cls, size: int, seed: int):
        """Antisymmetric matrix with entries derived from a fixed seed."""
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(int(seed), 0x6D61)))
        u = rng.uniform(-1.0, 1.0, size=(size, size))
        return cls((u - u.T) / 2.0, name=f"matrix{size}x{size}", bound=1.0)

    def table_shape(self, player):
        return (1, self.payoff.shape[player])

    def reward_bounds(self, player):
        return (-self.bound, self.bound)

    def episode_batch(self, tables, uniforms):
        return kernels.matrix_episodes(self.payoff, tables[0][0], tables[1][0], uniforms)

    def exact_value(self, tables):
        r = float(tables[0][0] @ self.payoff @ tables[1][0])
        return np.array([r, -r])

    def mixture_value(self, mixtures):
        avg = []
        for p, (weights, tables) in enumerate(mixtures):
            weights = check_mixture(weights, tables)
            avg.append(sum(w * t[0] for w, t in zip(weights, tables)))
        return self.exact_value([a[None, :] for a in avg])

    def best_response(self, player, opponent_mixtures):
        other = 1 - player
        weights, tables = opponent_mixtures[other]
        weights = check_mixture(weights, tables)
        avg = sum(w * t[0] for w, t in zip(weights, tables))
        if player == 0:
            vals = self.payoff @ avg
        else:
            vals = -(self.payoff.T @ avg)
        best = int(np.argmax(vals))
        table = np.zeros(self.table_shape(player))
        table[0, best] = 1.0
        return table, float(vals[best])
