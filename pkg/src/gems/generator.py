"""Amortized policy generator: latent anchors, materialization, frozen snapshot."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import net

LATENT_CLIP = 10.0


def clip_latent(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    if not np.all(np.isfinite(z)):
        raise ValueError("latent code must be finite")
    return np.clip(z, -LATENT_CLIP, LATENT_CLIP)


@dataclass
class GeneratorState:
    shape: net.NetShape
    theta: np.ndarray
    theta_frozen: np.ndarray
    tau: float
    table_rows: int
    table_cols: int

    def __post_init__(self):
        if self.tau < 1.0:
            raise ValueError("temperature must be >= 1")
        if self.theta.shape != self.theta_frozen.shape:
            raise ValueError("theta and frozen snapshot differ in shape")


def new_generator(zdim: int, hidden: int, table_rows: int, table_cols: int, tau: float, rng: np.random.Generator) -> GeneratorState:
    shape = net.NetShape(zdim, (hidden,), table_rows * table_cols)
    theta = net.init_params(shape, rng)
    return GeneratorState(shape, theta, theta.copy(), float(tau), table_rows, table_cols)


def logits_for(gen: GeneratorState, z: np.ndarray) -> np.ndarray:
    return net.forward(gen.shape, gen.theta, z).reshape(gen.table_rows, gen.table_cols)


def softmax_rows(logits: np.ndarray, tau: float) -> np.ndarray:
    scaled = logits / tau
    scaled = scaled - scaled.max(axis=1, keepdims=True)
    e = np.exp(scaled)
    return e / e.sum(axis=1, keepdims=True)


def materialize(gen: GeneratorState, z: np.ndarray, params: np.ndarray | None = None) -> np.ndarray:
    """Policy table for latent z: row-wise softmax of generated logits / tau."""
    theta = gen.theta if params is None else params
    logits = net.forward(gen.shape, theta, z).reshape(gen.table_rows, gen.table_cols)
    return softmax_rows(logits, gen.tau)


def snapshot(gen: GeneratorState) -> GeneratorState:
    return replace(gen, theta_frozen=gen.theta.copy())


@dataclass
class AnchorSet:
    zs: list[np.ndarray] = field(default_factory=list)
    sigma: np.ndarray = field(default_factory=lambda: np.zeros(0))
    birth_iters: list[int] = field(default_factory=list)
    duplicate_warnings: int = 0

    @property
    def k(self) -> int:
        return len(self.zs)

    def tables(self, gen: GeneratorState) -> list[np.ndarray]:
        return [materialize(gen, z) for z in self.zs]


def new_anchor_set(z0: np.ndarray, iteration: int = 0) -> AnchorSet:
    return AnchorSet(zs=[clip_latent(z0)], sigma=np.array([1.0]), birth_iters=[iteration])


def add_anchor(anchors: AnchorSet, z: np.ndarray, iteration: int) -> AnchorSet:
    """Append z; new anchor gets weight 1/(k+1), old weights rescale by k/(k+1)."""
    z = clip_latent(z)
    dup = anchors.duplicate_warnings
    for existing in anchors.zs:
        if existing.shape == z.shape and np.array_equal(existing, z):
            dup += 1
            break
    k = anchors.k
    sigma = np.concatenate([anchors.sigma * (k / (k + 1.0)), [1.0 / (k + 1.0)]])
    return AnchorSet(
        zs=[*anchors.zs, z],
        sigma=sigma,
        birth_iters=[*anchors.birth_iters, iteration],
        duplicate_warnings=dup,
    )
