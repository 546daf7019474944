"""Amortized best-response training with a trust region.

A few ascent steps pull the generator toward the newly selected anchor's best
response: the objective is advantage minus a KL penalty to the frozen
generator snapshot minus a latent-smoothness penalty. Gradients flow through
the materialized policy's log-probabilities of the actions taken in rollouts
(likelihood-ratio estimator), then through the network via analytic vjp.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from . import net
from .games.base import Game, member_value
from .generator import AnchorSet, GeneratorState, materialize, softmax_rows


@dataclass(frozen=True)
class AbrConfig:
    lr: float = 0.05
    steps: int = 5
    beta_kl: float = 0.1
    lambda_jac: float = 0.0
    batch: int = 16
    m: int = 2

    def __post_init__(self):
        if self.lr <= 0 or self.steps < 1 or self.beta_kl < 0 or self.lambda_jac < 0:
            raise ValueError("bad ABR config")
        if self.batch < 1 or self.m < 1:
            raise ValueError("batch and m must be >= 1")


@dataclass
class AdvantageSample:
    z: np.ndarray
    opponent: int
    returns: np.ndarray  # (m,) normalized, controlled perspective
    baseline: float
    infosets: np.ndarray  # (m, max_decisions), -1 padded
    actions: np.ndarray

    @property
    def advantage(self) -> float:
        return float(self.returns.mean() - self.baseline)


@dataclass(frozen=True)
class LossReport:
    adv_term: float
    kl_term: float
    jac_term: float
    total: float
    steps_done: int
    aborted: bool


def kl_policy(pi_a: np.ndarray, pi_b: np.ndarray) -> float:
    """Mean over infosets of row-wise KL(pi_a || pi_b); pi_b rows must be positive."""
    pi_a = np.asarray(pi_a, dtype=np.float64)
    pi_b = np.asarray(pi_b, dtype=np.float64)
    if pi_a.shape != pi_b.shape:
        raise ValueError("policy shapes differ")
    if np.any((pi_b <= 0) & (pi_a > 0)):
        raise ValueError("KL undefined: reference assigns zero mass where the policy is positive")
    ratio = np.zeros_like(pi_a)
    mask = pi_a > 0
    ratio[mask] = np.log(pi_a[mask] / pi_b[mask])
    return float((pi_a * ratio).sum(axis=1).mean())


def sample_latents(anchors: AnchorSet, z_star: np.ndarray, batch: int, rng: np.random.Generator):
    """Curated latent mixture: half point-mass on the fresh anchor, half uniform.

    Yields (latent, anchor index); the fresh anchor is the last index.
    """
    out = []
    for _ in range(batch):
        if rng.random() < 0.5:
            out.append((z_star, anchors.k - 1))
        else:
            idx = int(rng.integers(anchors.k))
            out.append((anchors.zs[idx], idx))
    return out


def advantage_batch(
    gen: GeneratorState,
    anchors: AnchorSet,
    z_star: np.ndarray,
    cfg: AbrConfig,
    baseline,
    rng: np.random.Generator,
    play_fn,
) -> list[AdvantageSample]:
    """Draw (z, opponent) pairs and collect m-episode advantage records.

    play_fn(table, m, rng) draws the opponent from the post-update
    meta-strategy and returns (returns, infosets, actions, opponent index).
    baseline is either one scalar or one value per anchor (the anchor's own
    estimated value, so rehearsed anchors sit at zero advantage on average).
    """
    baseline = np.atleast_1d(np.asarray(baseline, dtype=np.float64))
    samples = []
    for z, idx in sample_latents(anchors, z_star, cfg.batch, rng):
        mine = materialize(gen, z)
        y, infosets, actions, j = play_fn(mine, cfg.m, rng)
        b = float(baseline[idx]) if baseline.size > 1 else float(baseline[0])
        samples.append(AdvantageSample(z, j, y, b, infosets, actions))
    return samples


def logprob_grad_logits(policy: np.ndarray, infosets: np.ndarray, actions: np.ndarray, tau: float, scale: float) -> np.ndarray:
    """d [scale * sum log pi(a | infoset)] / d logits for recorded decisions."""
    dlogits = np.zeros_like(policy)
    rows = infosets.ravel()
    acts = actions.ravel()
    for row, a in zip(rows, acts):
        if row < 0:
            continue
        dlogits[row] -= policy[row]
        dlogits[row, a] += 1.0
    return dlogits * (scale / tau)


def kl_grad_logits(policy: np.ndarray, reference: np.ndarray, tau: float) -> np.ndarray:
    """d KL(policy || reference) / d logits, with the uniform infoset average."""
    log_ratio = _safe_log(policy) - _safe_log(reference)
    row_kl = (policy * log_ratio).sum(axis=1, keepdims=True)
    return policy * (log_ratio - row_kl) / (tau * policy.shape[0])


def _safe_log(p: np.ndarray) -> np.ndarray:
    # softmax output can underflow to exactly 0 under extreme logits
    return np.log(np.maximum(p, 1e-300))


def _kl_value(policy: np.ndarray, reference: np.ndarray) -> float:
    log_ratio = _safe_log(policy) - _safe_log(reference)
    return float((policy * log_ratio).sum(axis=1).mean())


def _surrogate_objective(gen: GeneratorState, theta: np.ndarray, samples, beta: float, lambda_jac: float, m: int) -> float:
    """Sampled objective the ascent climbs: advantage-weighted log-probs minus penalties."""
    total = 0.0
    for s in samples:
        logits = net.forward(gen.shape, theta, s.z).reshape(gen.table_rows, gen.table_cols)
        policy = softmax_rows(logits, gen.tau)
        logp = 0.0
        for row, a in zip(s.infosets.ravel(), s.actions.ravel()):
            if row >= 0:
                logp += _safe_log(policy[row])[a]
        total += s.advantage * logp / m
        if beta > 0:
            reference = materialize(gen, s.z, params=gen.theta_frozen)
            total -= beta * _kl_value(policy, reference)
        if lambda_jac > 0:
            total -= lambda_jac * net.jacobian_frobenius_sq(gen.shape, theta, s.z)
    return total / len(samples)


def abr_tr_step(
    gen: GeneratorState,
    samples: list[AdvantageSample],
    cfg: AbrConfig,
    rng: np.random.Generator,
    slowdown: float = 1.0,
) -> tuple[GeneratorState, LossReport]:
    """Run cfg.steps ascent steps on the batch; snapshot theta- stays fixed.

    The slowdown factor shrinks the learning rate and enlarges the KL
    coefficient together. Each step backtracks (halving) until the sampled
    surrogate does not decrease, so a huge KL coefficient pins the policy to
    the snapshot instead of destabilizing the ascent.
    """
    if not samples:
        raise ValueError("empty sample batch")
    lr = cfg.lr / slowdown
    beta = cfg.beta_kl * slowdown
    theta = gen.theta.copy()
    aborted = False
    steps_done = 0
    for _ in range(cfg.steps):
        grad = np.zeros_like(theta)
        for s in samples:
            logits = net.forward(gen.shape, theta, s.z).reshape(gen.table_rows, gen.table_cols)
            policy = softmax_rows(logits, gen.tau)
            dlogits = logprob_grad_logits(policy, s.infosets, s.actions, gen.tau, s.advantage / cfg.m)
            if beta > 0:
                reference = materialize(gen, s.z, params=gen.theta_frozen)
                dlogits -= beta * kl_grad_logits(policy, reference, gen.tau)
            g, _ = net.vjp(gen.shape, theta, s.z, dlogits.ravel())
            if cfg.lambda_jac > 0:
                g -= cfg.lambda_jac * net.jacobian_penalty_grad_sketch(gen.shape, theta, s.z, rng)
            grad += g / len(samples)
        if not np.all(np.isfinite(grad)):
            aborted = True
            break
        before = _surrogate_objective(gen, theta, samples, beta, cfg.lambda_jac, cfg.m)
        step = lr
        moved = False
        for _ in range(60):
            candidate = theta + step * grad
            after = _surrogate_objective(gen, candidate, samples, beta, cfg.lambda_jac, cfg.m)
            if np.isfinite(after) and after >= before - 1e-12:
                theta = candidate
                moved = True
                break
            step *= 0.5
        if not moved:
            break
        steps_done += 1

    new_gen = replace(gen, theta=theta)
    adv_term = float(np.mean([s.advantage for s in samples]))
    kl_vals = []
    jac_vals = []
    for s in samples:
        pi_now = materialize(new_gen, s.z)
        pi_ref = materialize(new_gen, s.z, params=new_gen.theta_frozen)
        kl_vals.append(kl_policy(pi_now, pi_ref))
        jac_vals.append(
            net.jacobian_frobenius_sq(new_gen.shape, new_gen.theta, s.z) if cfg.lambda_jac > 0 else 0.0
        )
    kl_term = float(np.mean(kl_vals))
    jac_term = float(np.mean(jac_vals))
    total = adv_term - beta * kl_term - cfg.lambda_jac * jac_term
    return new_gen, LossReport(adv_term, kl_term, jac_term, total, steps_done, aborted)


def measure_eps_br(game: Game, player: int, gen: GeneratorState, z_star: np.ndarray, opponent_mixtures) -> float:
    """Normalized gap between the exact best response and the generated policy."""
    _, br_raw = game.best_response(player, opponent_mixtures)
    mine_raw = member_value(game, player, materialize(gen, z_star), opponent_mixtures)
    lo, hi = game.reward_bounds(player)
    return (br_raw - mine_raw) / (hi - lo)
