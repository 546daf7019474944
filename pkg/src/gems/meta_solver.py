"""Meta-strategy dynamics: MWU and optimistic MWU with step-size schedules.

The optimistic update reads sigma_{t+1}(i) proportional to
sigma_t(i) * exp(eta_t * [2*v_t(i) - v_{t-1}(i) - rbar_t]) on EMA-smoothed
payoff estimates, with the previous vector starting at zero. Gradients are
capped symmetrically before exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SCHEDULE_KINDS = ("const", "sqrt", "harmonic")


@dataclass(frozen=True)
class EtaSchedule:
    kind: str = "const"
    eta0: float = 0.08
    alpha: float = 0.5
    slowdown: float = 1.0

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"unknown schedule kind '{self.kind}'")
        if self.eta0 <= 0 or self.alpha <= 0 or self.slowdown < 1.0:
            raise ValueError("need eta0 > 0, alpha > 0, slowdown >= 1")


def eta_at(schedule: EtaSchedule, t: int) -> float:
    if t < 1:
        raise ValueError("t starts at 1")
    base = schedule.eta0 / schedule.slowdown
    if schedule.kind == "const":
        return base
    if schedule.kind == "sqrt":
        return base / math.sqrt(t)
    return base / (1.0 + schedule.alpha * t)


class MetaSolver:
    """Single-population multiplicative-weights state machine."""

    def __init__(self, k: int, schedule: EtaSchedule, ema: float = 0.0, grad_cap: float = 1.0):
        if not (0.0 <= ema < 1.0):
            raise ValueError("ema must lie in [0, 1)")
        if grad_cap <= 0:
            raise ValueError("grad_cap must be positive")
        self.schedule = schedule
        self.ema = float(ema)
        self.grad_cap = float(grad_cap)
        self.sigma = np.full(k, 1.0 / k)
        self.prev_smoothed = np.zeros(k)
        self.t = 1
        self.cum_realized = 0.0
        self.cum_anchor_payoff = np.zeros(k)

    def extend(self, new_sigma: np.ndarray):
        """Adopt a grown simplex after an anchor was added; new entries start at 0 history."""
        grow = new_sigma.size - self.sigma.size
        if grow < 0:
            raise ValueError("anchor sets never shrink")
        self.sigma = np.asarray(new_sigma, dtype=np.float64).copy()
        if grow:
            self.prev_smoothed = np.concatenate([self.prev_smoothed, np.zeros(grow)])
            self.cum_anchor_payoff = np.concatenate([self.cum_anchor_payoff, np.zeros(grow)])

    def _step(self, v_hat, r_hat: float, optimistic: bool) -> np.ndarray:
        v_hat = np.asarray(v_hat, dtype=np.float64)
        if v_hat.shape != self.sigma.shape:
            raise ValueError(f"payoff vector has shape {v_hat.shape}, sigma has {self.sigma.shape}")
        if not (np.all(np.isfinite(v_hat)) and np.isfinite(r_hat)):
            raise ValueError("non-finite payoff estimates")
        smoothed = self.ema * self.prev_smoothed + (1.0 - self.ema) * v_hat
        if optimistic:
            g = 2.0 * smoothed - self.prev_smoothed - r_hat
        else:
            g = smoothed - r_hat
        g = np.clip(g, -self.grad_cap, self.grad_cap)
        eta = eta_at(self.schedule, self.t)
        w = self.sigma * np.exp(eta * g)
        self.sigma = w / w.sum()
        self.cum_realized += float(self.sigma @ v_hat)
        self.cum_anchor_payoff += v_hat
        self.prev_smoothed = smoothed
        self.t += 1
        return self.sigma.copy()

    def omwu_step(self, v_hat, r_hat: float) -> np.ndarray:
        return self._step(v_hat, r_hat, optimistic=True)

    def mwu_step(self, v_hat, r_hat: float) -> np.ndarray:
        return self._step(v_hat, r_hat, optimistic=False)

    @property
    def eta_now(self) -> float:
        return eta_at(self.schedule, self.t)


class RegretReport:
    """Diagnostic regret accounting from exact payoff vectors.

    Tracks both the per-iteration gap max_i v_t(i) - sigma_t . v_t (the
    restricted-game exploitability of each iterate) and proper external
    regret against the best fixed anchor, from cumulative payoffs. The
    variation tally sums ||v_t - v_{t-1}||_inf^2.
    """

    def __init__(self):
        self.instantaneous: list[float] = []
        self.variation: list[float] = []
        self._prev_v: np.ndarray | None = None
        self.cum_anchor = np.zeros(0)
        self.cum_realized = 0.0

    def update(self, v_exact, sigma):
        v_exact = np.asarray(v_exact, dtype=np.float64)
        sigma = np.asarray(sigma, dtype=np.float64)
        self.instantaneous.append(float(v_exact.max() - sigma @ v_exact))
        if self._prev_v is None:
            self.variation.append(0.0)
        else:
            prev = self._prev_v
            if prev.size < v_exact.size:
                # anchors added since last step contribute no variation
                prev = np.concatenate([prev, v_exact[prev.size :]])
            self.variation.append(float(np.max(np.abs(v_exact - prev)) ** 2))
        self._prev_v = v_exact.copy()
        if self.cum_anchor.size < v_exact.size:
            self.cum_anchor = np.concatenate([self.cum_anchor, np.zeros(v_exact.size - self.cum_anchor.size)])
        self.cum_anchor += v_exact
        self.cum_realized += float(sigma @ v_exact)

    @property
    def average_regret(self) -> float:
        return float(np.mean(self.instantaneous)) if self.instantaneous else 0.0

    @property
    def external_regret(self) -> float:
        if not self.instantaneous:
            return 0.0
        return float(self.cum_anchor.max() - self.cum_realized)

    @property
    def average_external_regret(self) -> float:
        return self.external_regret / max(len(self.instantaneous), 1)

    @property
    def total_variation(self) -> float:
        return float(np.sum(self.variation))
