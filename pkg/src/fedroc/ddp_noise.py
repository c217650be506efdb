"""Distributed geometric noise for hierarchical histograms.

Each of ``m`` clients adds ``X - Y`` to every bin, with ``X`` and ``Y``
independent Polya(1/m, alpha) draws. Polya laws are infinitely divisible,
so the server-side sum of the ``m`` shares is exactly two-sided geometric:
``P(k) = (1 - alpha) / (1 + alpha) * alpha**|k|`` with
``alpha = exp(-epsilon / h)``.

Neighbouring datasets differ by adding or removing one record. That record
lands in exactly one bin per level of exactly one class histogram, so each
level has sensitivity 1 and spends ``epsilon / h``; the positive and negative
histograms compose in parallel and share the same ``epsilon``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hier_histogram import HierHistogram


@dataclass(frozen=True)
class PrivacyParams:
    epsilon: float
    clients: int = 1
    height: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.clients < 1:
            raise ValueError("clients must be >= 1")
        if self.height < 1:
            raise ValueError("height must be >= 1")

    @property
    def per_layer_epsilon(self) -> float:
        return self.epsilon / self.height

    @property
    def alpha(self) -> float:
        return math.exp(-self.per_layer_epsilon)

    @property
    def noise_variance(self) -> float:
        """Variance of the aggregated noise in one bin."""
        a = self.alpha
        return 2.0 * a / (1.0 - a) ** 2


def sample_polya(r: float, p: float, rng: np.random.Generator, size=None):
    """Polya(r, p) draws as a Poisson mixed over Gamma(r, p / (1 - p)).

    Mean is ``r * p / (1 - p)``; ``r`` may be any positive real.
    """
    if not r > 0:
        raise ValueError("shape r must be positive")
    if not 0 <= p < 1:
        raise ValueError("p must lie in [0, 1)")
    lam = rng.gamma(r, p / (1.0 - p), size=size)
    return rng.poisson(lam)


def client_bin_noise(params: PrivacyParams, rng: np.random.Generator, size=None):
    """One client's noise share for ``size`` bins (a scalar when size is None)."""
    r = 1.0 / params.clients
    a = params.alpha
    x = sample_polya(r, a, rng, size)
    y = sample_polya(r, a, rng, size)
    return np.subtract(x, y, dtype=np.int64)


def two_sided_geometric_pmf(k, alpha: float):
    k = np.abs(np.asarray(k))
    return (1.0 - alpha) / (1.0 + alpha) * alpha**k


def add_noise(tree: HierHistogram, params: PrivacyParams, rng: np.random.Generator) -> HierHistogram:
    """Perturb every stored bin of every level with an independent client share.

    Draws are taken in level-major bin order from ``rng``, so a fixed
    generator state reproduces the same noisy tree.
    """
    if not tree.is_integer:
        raise ValueError("noise is added to integer count trees only")
    if params.height != tree.config.height:
        raise ValueError("privacy params were set up for a different tree height")
    noise = client_bin_noise(params, rng, size=tree.config.n_bins)
    flat = tree.flat().astype(np.int64) + noise
    bounds = np.cumsum([a.size for a in tree.levels])[:-1]
    return HierHistogram(tree.config, tuple(np.split(flat, bounds)))
