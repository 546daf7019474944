"""Surrogate-free population-based game solving.

A single generator network maps latent anchor codes to policies; the
meta-game over anchors is estimated by Monte-Carlo rollouts with
empirical-Bernstein confidence, solved by optimistic multiplicative weights,
and expanded by a bandit oracle plus amortized best-response training.
PSRO and Double Oracle baselines ship alongside for comparison.
"""

from .kernels import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
