"""Bandit best-response oracle: candidate pools and EB-UCB selection.

Candidate latent codes are scored by mean payoff against the fixed current
meta-strategy plus an empirical-Bernstein bonus with decaying confidence
delta_t = max(t, 2)^-2, minus a latent-smoothness (Jacobian) penalty. The
same score drives a sequential pull-one-arm loop used for synthetic bandit
checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import net
from .estimator import SampleStats
from .generator import GeneratorState, clip_latent, materialize


@dataclass(frozen=True)
class OracleConfig:
    pool_mut: int = 8
    pool_rand: int = 8
    rho: float = 0.3
    n_z: int = 4
    m: int = 4
    lambda_jac: float = 0.0
    period: int = 1

    def __post_init__(self):
        if self.pool_mut < 0 or self.pool_rand < 0:
            raise ValueError("pool sizes must be >= 0")
        if self.lambda_jac < 0 or self.period < 1:
            raise ValueError("need lambda_jac >= 0 and period >= 1")
        if self.n_z < 1 or self.m < 1 or self.n_z * self.m < 2:
            raise ValueError("need n_z*m >= 2 pulls per candidate")


@dataclass
class Candidate:
    z: np.ndarray
    provenance: str  # incumbent | mutation | random
    stats: SampleStats | None = None
    jac_penalty: float = 0.0
    score: float = field(default=float("nan"))


def build_pool(anchor_zs: list[np.ndarray], cfg: OracleConfig, rng: np.random.Generator) -> list[Candidate]:
    """Incumbents, then Gaussian mutations of incumbents, then fresh normals."""
    d = anchor_zs[0].size
    pool = [Candidate(z.copy(), "incumbent") for z in anchor_zs]
    for _ in range(cfg.pool_mut):
        parent = anchor_zs[int(rng.integers(len(anchor_zs)))]
        pool.append(Candidate(clip_latent(parent + cfg.rho * rng.standard_normal(d)), "mutation"))
    for _ in range(cfg.pool_rand):
        pool.append(Candidate(clip_latent(rng.standard_normal(d)), "random"))
    return pool


def delta_t(t: int) -> float:
    return float(max(t, 2)) ** -2


def eb_ucb_score(stats: SampleStats, t: int, lambda_jac: float = 0.0, jac_penalty: float = 0.0) -> float:
    if stats.count < 2:
        raise ValueError("EB-UCB score needs at least 2 pulls")
    log_term = math.log(3.0 / delta_t(t))
    bonus = math.sqrt(2.0 * stats.var * log_term / stats.count) + 3.0 * log_term / (stats.count - 1)
    return stats.mean + bonus - lambda_jac * jac_penalty


def gate(t: int, period: int) -> bool:
    if period < 1:
        raise ValueError("oracle period must be >= 1")
    return t % period == 0


def select_anchor(
    gen: GeneratorState,
    pool: list[Candidate],
    cfg: OracleConfig,
    t: int,
    rng: np.random.Generator,
    play_fn,
) -> tuple[np.ndarray, list[Candidate]]:
    """Pull every candidate n_z times (m rollouts each); argmax of the EB-UCB score.

    play_fn(table, m, rng) runs one pull against opponents drawn from the
    meta-strategy, which stays fixed throughout selection. Each candidate
    owns a split-off stream, and the argmax scans in pool order so ties
    resolve to the lowest index.
    """
    if not pool:
        raise ValueError("empty candidate pool")
    streams = rng.spawn(len(pool))
    for idx, cand in enumerate(pool):
        child = streams[idx]
        mine = materialize(gen, cand.z)
        ys = np.empty((cfg.n_z, cfg.m))
        for s in range(cfg.n_z):
            y = play_fn(mine, cfg.m, child)[0]
            ys[s] = y
        cand.stats = SampleStats.from_samples(ys.ravel())
        if cfg.lambda_jac > 0.0:
            cand.jac_penalty = net.jacobian_frobenius_sq(gen.shape, gen.theta, cand.z)
        cand.score = eb_ucb_score(cand.stats, t, cfg.lambda_jac, cand.jac_penalty)
    best = 0
    for idx in range(1, len(pool)):
        if pool[idx].score > pool[best].score:
            best = idx
    return pool[best].z.copy(), pool


def run_bandit(sample_fn, n_arms: int, total_pulls: int, rng: np.random.Generator, m: int = 4):
    """Sequential EB-UCB loop on a synthetic bandit.

    sample_fn(arm, rng) -> reward in [0, 1]. A pull draws m reward samples
    (mirroring the oracle's m rollouts per pull); the radius runs over all
    samples of an arm. Each arm is primed with one pull, then the
    highest-scoring arm is pulled once per step. Returns the pulled arm
    indices (length total_pulls).
    """
    if m < 2:
        raise ValueError("need m >= 2 samples per pull for EB variances")
    counts = np.zeros(n_arms, dtype=np.int64)
    sums = np.zeros(n_arms)
    sq_sums = np.zeros(n_arms)
    choices = np.empty(total_pulls, dtype=np.int64)

    def pull(arm, step):
        for _ in range(m):
            r = float(sample_fn(arm, rng))
            counts[arm] += 1
            sums[arm] += r
            sq_sums[arm] += r * r
        choices[step] = arm

    step = 0
    for arm in range(n_arms):
        if step >= total_pulls:
            return choices[:step]
        pull(arm, step)
        step += 1
    while step < total_pulls:
        t = step + 1
        best, best_score = 0, -np.inf
        for arm in range(n_arms):
            n = counts[arm]
            mean = sums[arm] / n
            var = max(0.0, (sq_sums[arm] - n * mean * mean) / (n - 1))
            score = eb_ucb_score(SampleStats(int(n), mean, var), t)
            if score > best_score:
                best, best_score = arm, score
        pull(best, step)
        step += 1
    return choices
