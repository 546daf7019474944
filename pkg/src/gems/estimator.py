"""Monte-Carlo meta-game estimation with empirical-Bernstein confidence.

Value vectors and game values are estimated from normalized rollouts without
ever materializing a payoff matrix. Shared-population (symmetric self-play)
matchups randomize seat order per episode; per-player and importance-weighted
variants cover general-sum and n-player games from one shared rollout batch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .games.base import Game


@dataclass(frozen=True)
class SampleStats:
    count: int
    mean: float
    var: float  # unbiased (divisor N-1); NaN when count < 2

    @classmethod
    def from_samples(cls, samples) -> "SampleStats":
        samples = np.asarray(samples, dtype=np.float64)
        n = samples.size
        mean = float(samples.mean()) if n else 0.0
        var = float(samples.var(ddof=1)) if n >= 2 else float("nan")
        return cls(n, mean, var)


@dataclass(frozen=True)
class MetaEstimate:
    value_stats: list[SampleStats]
    game_stats: SampleStats | None
    n: int
    m: int
    B: int

    @property
    def v_hat(self) -> np.ndarray:
        return np.array([s.mean for s in self.value_stats])


def eb_radius(stats: SampleStats, delta: float) -> float:
    """Empirical-Bernstein confidence radius for range-1 samples."""
    if stats.count < 2:
        raise ValueError("EB radius needs at least 2 samples")
    if not (0.0 < delta < 1.0):
        raise ValueError("delta must lie in (0, 1)")
    log_term = math.log(2.0 / delta)
    return math.sqrt(2.0 * stats.var * log_term / stats.count) + 3.0 * log_term / (stats.count - 1)


def hoeffding_radius(count: int, delta: float) -> float:
    """Two-sided Hoeffding radius for the game-value estimate."""
    if count < 1 or not (0.0 < delta < 1.0):
        raise ValueError("need count >= 1 and delta in (0, 1)")
    return math.sqrt(math.log(2.0 / delta) / (2.0 * count))


def draw_index(sigma: np.ndarray, u: float) -> int:
    cdf = np.cumsum(sigma)
    return int(min(np.searchsorted(cdf, u, side="right"), sigma.size - 1))


def pair_episodes(
    game: Game,
    mine: np.ndarray,
    opp: np.ndarray,
    m: int,
    rng: np.random.Generator,
    seat_flip: bool,
    player: int = 0,
):
    """m episodes of mine-vs-opp from the controlled policy's perspective.

    With seat_flip the controlled policy sits in a coin-flipped seat per
    episode (shared-population symmetrization); otherwise it plays `player`.
    Returns (returns, infosets, actions, seats) for the controlled policy.
    """
    if seat_flip:
        seats = (rng.random(m) < 0.5).astype(np.int64)
    else:
        seats = np.full(m, player, dtype=np.int64)
    norm0, inf0, act0 = None, None, None
    norm1, inf1, act1 = None, None, None
    uniforms = rng.random((m, game.n_uniforms))
    idx0 = np.flatnonzero(seats == 0)
    idx1 = np.flatnonzero(seats == 1)
    y = np.empty(m)
    infosets = np.full((m, game.max_decisions), -1, dtype=np.int64)
    actions = np.full((m, game.max_decisions), -1, dtype=np.int64)
    if idx0.size:
        raw, inf, act = game.episode_batch([mine, opp], uniforms[idx0])
        y[idx0] = game.normalize(raw[:, 0], 0)
        infosets[idx0] = inf[:, 0, :]
        actions[idx0] = act[:, 0, :]
    if idx1.size:
        raw, inf, act = game.episode_batch([opp, mine], uniforms[idx1])
        y[idx1] = game.normalize(raw[:, 1], 1)
        infosets[idx1] = inf[:, 1, :]
        actions[idx1] = act[:, 1, :]
    return y, infosets, actions, seats


def _per_anchor_budgets(n, count: int, m: int) -> list[int]:
    budgets = [int(n)] * count if np.isscalar(n) else [int(v) for v in n]
    if len(budgets) != count:
        raise ValueError("per-anchor budget list does not match the anchor count")
    for b in budgets:
        if b < 1 or m < 1 or b * m < 2:
            raise ValueError("need n >= 1, m >= 1 and n*m >= 2 for EB radii")
    return budgets


def estimate_value_vector(
    game: Game,
    tables: list[np.ndarray],
    sigma: np.ndarray,
    n,
    m: int,
    rng: np.random.Generator,
    symmetrize: bool = True,
) -> list[SampleStats]:
    """Per-anchor value estimates against opponents drawn from sigma.

    n may be a single opponent-draw budget or one budget per anchor. Each
    anchor gets its own split-off stream, so results do not depend on
    evaluation order or worker count.
    """
    budgets = _per_anchor_budgets(n, len(tables), m)
    streams = rng.spawn(len(tables))
    stats = []
    for i, mine in enumerate(tables):
        child = streams[i]
        ys = np.empty((budgets[i], m))
        for s in range(budgets[i]):
            j = draw_index(sigma, child.random())
            y, _, _, _ = pair_episodes(game, mine, tables[j], m, child, seat_flip=symmetrize)
            ys[s] = y
        stats.append(SampleStats.from_samples(ys.ravel()))
    return stats


def estimate_value_vector_vs(
    game: Game,
    player: int,
    own_tables: list[np.ndarray],
    opp_sigma: np.ndarray,
    opp_tables: list[np.ndarray],
    n,
    m: int,
    rng: np.random.Generator,
) -> list[SampleStats]:
    """Per-player (general-sum) variant: player's anchors vs the other mixture."""
    budgets = _per_anchor_budgets(n, len(own_tables), m)
    streams = rng.spawn(len(own_tables))
    stats = []
    for i, mine in enumerate(own_tables):
        child = streams[i]
        ys = np.empty((budgets[i], m))
        for s in range(budgets[i]):
            j = draw_index(opp_sigma, child.random())
            y, _, _, _ = pair_episodes(game, mine, opp_tables[j], m, child, seat_flip=False, player=player)
            ys[s] = y
        stats.append(SampleStats.from_samples(ys.ravel()))
    return stats


def estimate_game_value(
    game: Game,
    tables: list[np.ndarray],
    sigma: np.ndarray,
    B: int,
    m: int,
    rng: np.random.Generator,
    symmetrize: bool = True,
) -> SampleStats:
    """Shared-population game value: pairs (i, j) ~ sigma x sigma."""
    if B * m < 2:
        raise ValueError("need B*m >= 2")
    ys = np.empty((B, m))
    for b in range(B):
        i = draw_index(sigma, rng.random())
        j = draw_index(sigma, rng.random())
        y, _, _, _ = pair_episodes(game, tables[i], tables[j], m, rng, seat_flip=symmetrize)
        ys[b] = y
    return SampleStats.from_samples(ys.ravel())


def estimate_game_values_joint(
    game: Game,
    tables_by_player: list[list[np.ndarray]],
    sigmas: list[np.ndarray],
    B: int,
    m: int,
    rng: np.random.Generator,
) -> list[SampleStats]:
    """Per-player game values from one jointly sampled batch (2-player)."""
    if B * m < 2:
        raise ValueError("need B*m >= 2")
    ys = np.empty((B, m, game.num_players))
    for b in range(B):
        profile = [tables_by_player[p][draw_index(sigmas[p], rng.random())] for p in range(game.num_players)]
        norm, _, _ = game.play_batch(profile, m, rng)
        ys[b] = norm
    return [SampleStats.from_samples(ys[:, :, p].ravel()) for p in range(game.num_players)]


def iw_value_vectors(
    game: Game,
    tables_by_player: list[list[np.ndarray]],
    sigmas: list[np.ndarray],
    B: int,
    m: int,
    rng: np.random.Generator,
    sigma_floor: float = 1e-3,
):
    """Importance-weighted per-player value vectors from shared joint rollouts.

    One batch of B*m episodes serves every (player, anchor) entry via the
    weight 1{drawn == i} / sigma_p(i). Returns (per-player value stats,
    per-player game-value stats).
    """
    if B * m < 2:
        raise ValueError("need B*m >= 2")
    for p, sigma in enumerate(sigmas):
        if np.min(sigma) < sigma_floor:
            raise ValueError(
                f"sigma for player {p} has mass below the floor {sigma_floor}; apply exploration mixing before importance weighting"
            )
    players = game.num_players
    draws = np.empty((B, players), dtype=np.int64)
    ys = np.empty((B, m, players))
    for b in range(B):
        profile = []
        for p in range(players):
            idx = draw_index(sigmas[p], rng.random())
            draws[b, p] = idx
            profile.append(tables_by_player[p][idx])
        norm, _, _ = game.play_batch(profile, m, rng)
        ys[b] = norm
    value_stats = []
    game_stats = []
    for p in range(players):
        per_anchor = []
        flat_y = ys[:, :, p]
        for i in range(len(tables_by_player[p])):
            w = (draws[:, p] == i).astype(np.float64) / sigmas[p][i]
            per_anchor.append(SampleStats.from_samples((w[:, None] * flat_y).ravel()))
        value_stats.append(per_anchor)
        game_stats.append(SampleStats.from_samples(flat_y.ravel()))
    return value_stats, game_stats
