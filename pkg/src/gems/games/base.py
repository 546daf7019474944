"""Game abstraction: sampled rollouts, exact expectations, exact best responses.

Policies are plain float64 arrays of shape (num_infosets, num_actions) with
rows on the probability simplex. A profile is one table per player. Returns
come in raw game units; the affine per-player normalization to [0, 1] (fixed
by each game's declared reward bounds) is what all estimator math runs on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GameError(ValueError):
    """Structured shape/usage error naming the offending player and infoset."""

    def __init__(self, message, player=None, infoset=None):
        super().__init__(message)
        self.player = player
        self.infoset = infoset


@dataclass(frozen=True)
class GameSpec:
    num_players: int
    infoset_actions: tuple[tuple[int, ...], ...]  # per player: action count per infoset
    reward_bounds: tuple[tuple[float, float], ...]  # per player raw (lo, hi)
    horizon: int

    def __post_init__(self):
        if self.horizon < 1:
            raise GameError("horizon must be >= 1")
        for p, (lo, hi) in enumerate(self.reward_bounds):
            if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
                raise GameError(f"reward bounds for player {p} must be finite with hi > lo", player=p)
        for p, counts in enumerate(self.infoset_actions):
            for i, c in enumerate(counts):
                if c < 1:
                    raise GameError(f"player {p} infoset {i} has no actions", player=p, infoset=i)


class Game:
    """Base class; subclasses fill in the class attributes and hooks."""

    name: str = "game"
    num_players: int = 2
    zero_sum: bool = False
    # True when a single shared population plays both seats (seat-randomized
    # matchups); False means per-player populations.
    symmetric: bool = False
    n_uniforms: int = 1
    max_decisions: int = 1

    def table_shape(self, player: int) -> tuple[int, int]:
        raise NotImplementedError

    def reward_bounds(self, player: int) -> tuple[float, float]:
        raise NotImplementedError

    @property
    def horizon(self) -> int:
        return 1

    def spec(self) -> GameSpec:
        infosets = []
        bounds = []
        for p in range(self.num_players):
            rows, cols = self.table_shape(p)
            infosets.append(tuple([cols] * rows))
            bounds.append(self.reward_bounds(p))
        return GameSpec(self.num_players, tuple(infosets), tuple(bounds), self.horizon)

    # -- policies ----------------------------------------------------------

    def uniform_table(self, player: int) -> np.ndarray:
        rows, cols = self.table_shape(player)
        return np.full((rows, cols), 1.0 / cols)

    def validate_table(self, player: int, table: np.ndarray):
        rows, cols = self.table_shape(player)
        table = np.asarray(table)
        if table.shape != (rows, cols):
            raise GameError(
                f"policy table for player {player} has shape {table.shape}, expected {(rows, cols)}",
                player=player,
            )
        if np.any(table < 0):
            bad = int(np.argwhere(table < 0)[0][0])
            raise GameError(f"negative probability at player {player} infoset {bad}", player=player, infoset=bad)
        sums = table.sum(axis=1)
        off = np.abs(sums - 1.0)
        if np.any(off > 1e-9):
            bad = int(np.argmax(off))
            raise GameError(
                f"row of player {player} infoset {bad} sums to {sums[bad]:.12f}, expected 1",
                player=player,
                infoset=bad,
            )

    def validate_profile(self, tables):
        if len(tables) != self.num_players:
            raise GameError(f"profile has {len(tables)} tables, game has {self.num_players} players")
        for p, t in enumerate(tables):
            self.validate_table(p, t)

    # -- normalization ------------------------------------------------------

    def normalize(self, raw, player: int):
        lo, hi = self.reward_bounds(player)
        return (np.asarray(raw) - lo) / (hi - lo)

    def denormalize(self, norm, player: int):
        lo, hi = self.reward_bounds(player)
        return np.asarray(norm) * (hi - lo) + lo

    def normalize_all(self, raw):
        """raw (..., num_players) -> normalized, per-player affine."""
        raw = np.asarray(raw, dtype=np.float64)
        out = np.empty_like(raw)
        for p in range(self.num_players):
            out[..., p] = self.normalize(raw[..., p], p)
        return out

    # -- play ---------------------------------------------------------------

    def episode_batch(self, tables, uniforms):
        """Raw returns + decision records for a batch of episodes."""
        raise NotImplementedError

    def play_batch(self, tables, n_episodes: int, rng: np.random.Generator):
        """Normalized returns (n, players) plus decision records."""
        uniforms = rng.random((n_episodes, self.n_uniforms))
        raw, infosets, actions = self.episode_batch(tables, uniforms)
        return self.normalize_all(raw), infosets, actions

    def rollout(self, tables, rng: np.random.Generator) -> np.ndarray:
        """One episode's normalized per-player returns."""
        self.validate_profile(tables)
        norm, _, _ = self.play_batch(tables, 1, rng)
        return norm[0]

    # -- exact analysis -------------------------------------------------

    def exact_value(self, tables) -> np.ndarray:
        """Exact raw expected return per player, no sampling."""
        raise NotImplementedError

    def best_response(self, player: int, opponent_mixtures) -> tuple[np.ndarray, float]:
        """Exact best response for `player` against fixed opponent mixtures.

        opponent_mixtures maps other-player index -> (weights, [tables]).
        Returns (policy table, raw expected value). Ties break toward the
        lowest action index.
        """
        raise NotImplementedError

    def mixture_value(self, mixtures) -> np.ndarray:
        """Exact raw per-player value when every player samples from its mixture."""
        raise NotImplementedError


def check_mixture(weights, tables):
    weights = np.asarray(weights, dtype=np.float64)
    if len(tables) == 0 or weights.size == 0:
        raise GameError("empty opponent mixture")
    if weights.size != len(tables):
        raise GameError("mixture weights and tables disagree in length")
    if np.any(weights < -1e-12) or abs(weights.sum() - 1.0) > 1e-9:
        raise GameError("mixture weights must lie on the simplex")
    return weights


def mixtures_except(mixtures, player):
    return {q: mix for q, mix in enumerate(mixtures) if q != player}


def exploitability(game: Game, mixtures, restricted: bool = False) -> float:
    """Total deviation gain (raw units) against per-player mixtures.

    Default: sum over players of (unrestricted exact best-response value minus
    current value). With restricted=True the deviations are limited to each
    player's own population members.
    """
    cur = game.mixture_value(mixtures)
    total = 0.0
    for p in range(game.num_players):
        opp = mixtures_except(mixtures, p)
        if restricted:
            weights, tables = mixtures[p]
            best = -np.inf
            for t in tables:
                val = member_value(game, p, t, opp)
                if val > best:
                    best = val
            total += best - cur[p]
        else:
            _, br_val = game.best_response(p, opp)
            total += br_val - cur[p]
    return float(total)


def member_value(game: Game, player: int, table, opponent_mixtures) -> float:
    """Exact raw value of one policy for `player` against opponent mixtures."""
    subst = []
    for q in range(game.num_players):
        if q == player:
            subst.append((np.array([1.0]), [table]))
        else:
            subst.append(opponent_mixtures[q])
    return float(game.mixture_value(subst)[player])
