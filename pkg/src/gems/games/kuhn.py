"""Three-card Kuhn poker.

Each policy table covers both seats: rows 0..5 are seat-1 infosets
(card*2 + stage with stage 0 = opening decision, 1 = facing a bet after
checking), rows 6..11 seat-2 infosets (6 + card*2 + h with h 0 = opponent
checked, 1 = opponent bet). Action 0 is check/fold, action 1 bet/call.
Raw returns for seat 1 lie in {-2, -1, +1, +2}; the game is zero-sum.
"""

from __future__ import annotations

import itertools

import numpy as np

from .. import kernels
from .base import Game, check_mixture

DEALS = [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]


class KuhnPoker(Game):
    name = "kuhn"
    num_players = 2
    zero_sum = True
    symmetric = True  # shared population; seat chosen by the matchmaker
    n_uniforms = 4
    max_decisions = 2

    @property
    def horizon(self):
        return 2

    def table_shape(self, player):
        return (12, 2)

    def reward_bounds(self, player):
        return (-2.0, 2.0)

    def episode_batch(self, tables, uniforms):
        return kernels.kuhn_episodes(tables[0], tables[1], uniforms)

    def exact_value(self, tables):
        t1, t2 = tables
        total = 0.0
        for c1, c2 in DEALS:
            s = 1.0 if c1 > c2 else -1.0
            r1, r1b = 2 * c1, 2 * c1 + 1
            rc, rb = 6 + 2 * c2, 6 + 2 * c2 + 1
            v_check = t2[rc, 0] * s + t2[rc, 1] * (t1[r1b, 0] * -1.0 + t1[r1b, 1] * 2.0 * s)
            v_bet = t2[rb, 0] * 1.0 + t2[rb, 1] * 2.0 * s
            total += t1[r1, 0] * v_check + t1[r1, 1] * v_bet
        r = total / 6.0
        return np.array([r, -r])

    def mixture_value(self, mixtures):
        # Seat 2 makes a single decision per episode, so its mixture collapses
        # to the average table; seat 1 acts up to twice and must stay explicit.
        w1, tabs1 = mixtures[0]
        w1 = check_mixture(w1, tabs1)
        w2, tabs2 = mixtures[1]
        w2 = check_mixture(w2, tabs2)
        t2bar = sum(w * t for w, t in zip(w2, tabs2))
        r = sum(w * self.exact_value([t, t2bar])[0] for w, t in zip(w1, tabs1))
        return np.array([r, -r])

    def best_response(self, player, opponent_mixtures):
        table = np.full((12, 2), 0.5)
        if player == 0:
            weights, tabs = opponent_mixtures[1]
            weights = check_mixture(weights, tabs)
            t2bar = sum(w * t for w, t in zip(weights, tabs))
            value = 0.0
            for c1 in range(3):
                others = [c for c in range(3) if c != c1]
                # facing a bet after checking: pick once per infoset
                cb_vals = np.zeros(2)
                for c2 in others:
                    s = 1.0 if c1 > c2 else -1.0
                    pb = t2bar[6 + 2 * c2, 1]
                    cb_vals[0] += 0.5 * pb * -1.0
                    cb_vals[1] += 0.5 * pb * 2.0 * s
                a_cb = int(np.argmax(cb_vals))
                v_check = 0.0
                v_bet = 0.0
                for c2 in others:
                    s = 1.0 if c1 > c2 else -1.0
                    cont = -1.0 if a_cb == 0 else 2.0 * s
                    v_check += 0.5 * (t2bar[6 + 2 * c2, 0] * s + t2bar[6 + 2 * c2, 1] * cont)
                    v_bet += 0.5 * (t2bar[7 + 2 * c2, 0] * 1.0 + t2bar[7 + 2 * c2, 1] * 2.0 * s)
                a1 = 0 if v_check >= v_bet else 1
                table[2 * c1] = np.eye(2)[a1]
                table[2 * c1 + 1] = np.eye(2)[a_cb]
                value += max(v_check, v_bet) / 3.0
            return table, float(value)

        # Seat 2: the opponent may act twice per episode, so mixture members
        # stay separate to preserve the correlation between their decisions.
        weights, tabs = opponent_mixtures[0]
        weights = check_mixture(weights, tabs)
        value = 0.0
        for c2 in range(3):
            others = [c for c in range(3) if c != c2]
            for h, base in ((0, 6 + 2 * c2), (1, 7 + 2 * c2)):
                vals = np.zeros(2)
                for w, t1 in zip(weights, tabs):
                    for c1 in others:
                        s = 1.0 if c1 > c2 else -1.0
                        if h == 0:  # opponent checked
                            reach = w * 0.5 * t1[2 * c1, 0]
                            vals[0] += reach * -s
                            vals[1] += reach * (t1[2 * c1 + 1, 0] * 1.0 + t1[2 * c1 + 1, 1] * -2.0 * s)
                        else:  # opponent bet
                            reach = w * 0.5 * t1[2 * c1, 1]
                            vals[0] += reach * -1.0
                            vals[1] += reach * -2.0 * s
                a2 = int(np.argmax(vals))
                table[base] = np.eye(2)[a2]
                value += vals[a2] / 3.0
        return table, float(value)

    @staticmethod
    def pure_tables(player_rows):
        """All 64 deterministic assignments over the given 6 rows of a table."""
        tables = []
        for bits in itertools.product((0, 1), repeat=6):
            t = np.full((12, 2), 0.5)
            for row, b in zip(player_rows, bits):
                t[row] = np.eye(2)[b]
            tables.append(t)
        return tables
