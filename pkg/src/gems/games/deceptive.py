"""Deceptive messages game: a sender who knows the best arm vs a skeptical receiver.

Four arms carry Bernoulli payoffs with means 0.8, 0.5, 0.4, 0.2; each episode
a uniform permutation assigns the means to physical arms. The sender observes
which physical arm is best and emits one of four messages; the receiver maps
the message to an arm choice. The receiver's raw reward is the realized arm
payout, the sender's is 1 when the receiver landed on the arm holding the
second-best mean (the target). General-sum; per-player populations.
"""

from __future__ import annotations

import itertools

import numpy as np

from .. import kernels
from .base import Game, check_mixture

MEANS = np.array([0.8, 0.5, 0.4, 0.2])
N_ARMS = 4
# perms[p, arm] = rank of the mean sitting on that physical arm (0 = best).
PERMS = np.array(list(itertools.permutations(range(N_ARMS))), dtype=np.int64)
OTHER_MEAN = float(MEANS[1:].mean())  # mean of a non-best arm, given it is not best

SENDER, RECEIVER = 0, 1


class DeceptiveMessages(Game):
    name = "deceptive"
    num_players = 2
    zero_sum = False
    symmetric = False
    n_uniforms = 4
    max_decisions = 1

    @property
    def horizon(self):
        return 2

    def table_shape(self, player):
        return (N_ARMS, N_ARMS)

    def reward_bounds(self, player):
        return (0.0, 1.0)

    def episode_batch(self, tables, uniforms):
        return kernels.deceptive_episodes(tables[SENDER], tables[RECEIVER], PERMS, MEANS, uniforms)

    def exact_value(self, tables):
        s, r = tables
        choose = s @ r  # choose[b, a] = P(receiver picks arm a | best arm b)
        p_hit = float(np.trace(choose)) / N_ARMS
        recv = 0.8 * p_hit + OTHER_MEAN * (1.0 - p_hit)
        # given best arm b, any other arm holds the target with prob 1/3
        send = (1.0 - p_hit) / (N_ARMS - 1)
        return np.array([send, recv])

    def mixture_value(self, mixtures):
        # each player acts once per episode, so mixtures average exactly
        avg = []
        for weights, tables in mixtures:
            weights = check_mixture(weights, tables)
            avg.append(sum(w * t for w, t in zip(weights, tables)))
        return self.exact_value(avg)

    def best_response(self, player, opponent_mixtures):
        other = 1 - player
        weights, tables = opponent_mixtures[other]
        weights = check_mixture(weights, tables)
        avg = sum(w * t for w, t in zip(weights, tables))
        table = np.zeros((N_ARMS, N_ARMS))
        value = 0.0
        if player == RECEIVER:
            # posterior-weighted arm values per message (counterfactual sums)
            for m in range(N_ARMS):
                vals = np.empty(N_ARMS)
                for a in range(N_ARMS):
                    vals[a] = sum(
                        avg[b, m] / N_ARMS * (0.8 if a == b else OTHER_MEAN) for b in range(N_ARMS)
                    )
                best = int(np.argmax(vals))
                table[m, best] = 1.0
                value += vals[best]
        else:
            for b in range(N_ARMS):
                vals = np.empty(N_ARMS)
                for m in range(N_ARMS):
                    vals[m] = (1.0 - avg[m, b]) / (N_ARMS - 1)
                best = int(np.argmax(vals))
                table[b, best] = 1.0
                value += vals[best] / N_ARMS
        return table, float(value)
