"""n-player public goods game with binary contribute/withhold actions.

Player i's one-round payoff is (r/n) * S - c * a_i where S counts the
contributors. With r/n < c < r every individual gains by defecting while the
group gains from cooperation; violating that band triggers a config warning.
"""

from __future__ import annotations

import warnings

import numpy as np

from .. import kernels
from .base import Game, check_mixture

DEFECT, COOPERATE = 0, 1


class PublicGoods(Game):
    zero_sum = False
    symmetric = False
    n_uniforms = 0  # set per instance
    max_decisions = 1

    def __init__(self, n_players: int = 5, multiplier: float = 1.6, cost: float = 1.0):
        if n_players < 2:
            raise ValueError("public goods game needs at least 2 players")
        self.name = "pgg"
        self.num_players = int(n_players)
        self.multiplier = float(multiplier)
        self.cost = float(cost)
        self.n_uniforms = self.num_players
        if not (self.multiplier / self.num_players < self.cost < self.multiplier):
            warnings.warn(
                f"public goods dilemma band violated: need r/n < c < r, got r/n={self.multiplier / self.num_players:.4f}, c={self.cost}, r={self.multiplier}",
                stacklevel=2,
            )

    def table_shape(self, player):
        return (1, 2)

    def reward_bounds(self, player):
        share = self.multiplier / self.num_players
        return (share - self.cost, share * (self.num_players - 1))

    def episode_batch(self, tables, uniforms):
        coop = np.ascontiguousarray([t[0, COOPERATE] for t in tables])
        return kernels.pgg_episodes(coop, self.multiplier, self.cost, uniforms)

    def coop_probs(self, tables):
        return np.array([t[0, COOPERATE] for t in tables])

    def exact_value(self, tables):
        p = self.coop_probs(tables)
        share = self.multiplier / self.num_players
        return share * p.sum() - self.cost * p

    def mixture_value(self, mixtures):
        avg = []
        for weights, tables in mixtures:
            weights = check_mixture(weights, tables)
            avg.append(sum(w * t for w, t in zip(weights, tables)))
        return self.exact_value(avg)

    def best_response(self, player, opponent_mixtures):
        share = self.multiplier / self.num_players
        other_coop = 0.0
        for q, (weights, tables) in opponent_mixtures.items():
            weights = check_mixture(weights, tables)
            other_coop += sum(w * t[0, COOPERATE] for w, t in zip(weights, tables))
        vals = np.array([share * other_coop, share * (other_coop + 1.0) - self.cost])
        best = int(np.argmax(vals))
        table = np.zeros((1, 2))
        table[0, best] = 1.0
        return table, float(vals[best])

    def welfare(self, mixtures) -> float:
        return float(self.mixture_value(mixtures).sum())

    def coop_rate(self, mixtures) -> float:
        total = 0.0
        for weights, tables in mixtures:
            weights = check_mixture(weights, tables)
            total += sum(w * t[0, COOPERATE] for w, t in zip(weights, tables))
        return total / self.num_players
