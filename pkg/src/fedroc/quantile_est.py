"""Evenly spaced quantiles from (noisy) hierarchical histograms or raw scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hier_histogram import HierHistogram, prefix_counts


@dataclass(frozen=True)
class QuantileProfile:
    """Score values ``values[k]`` at cumulative levels ``k / (Q - 1)``."""

    levels: np.ndarray
    values: np.ndarray
    total: float

    @property
    def Q(self) -> int:
        return int(self.values.size)


def quantile_levels(Q: int) -> np.ndarray:
    if Q < 2:
        raise ValueError("Q must be >= 2")
    return np.arange(Q) / (Q - 1)


def estimate_total(tree: HierHistogram) -> float:
    """Leaf-level count, floored at 1."""
    return max(float(np.sum(tree.leaves)), 1.0)


def estimate_quantiles(tree: HierHistogram, Q: int) -> QuantileProfile:
    """Quantiles by inverting the histogram's piecewise-linear pseudo-ECDF.

    The cumulative count at each leaf edge is the tree's prefix query,
    clipped at 0 and made non-decreasing with a running max. The target rank
    ``p_k * n`` is located in the first leaf whose right-edge cumulative
    reaches it and then placed linearly inside that leaf. Level 0 maps to the
    left edge of the first leaf holding any mass.
    """
    p = quantile_levels(Q)
    cfg = tree.config
    lo, hi = cfg.range
    n_leaves = cfg.n_leaves
    width = (hi - lo) / n_leaves

    cum = np.maximum.accumulate(np.maximum(prefix_counts(tree).astype(np.float64), 0.0))
    total = estimate_total(tree)
    ranks = p * total

    right = cum[1:]
    leaf = np.where(
        ranks > 0,
        np.searchsorted(right, ranks, side="left"),
        np.searchsorted(right, 0.0, side="right"),
    )
    beyond = leaf >= n_leaves  # rank above all mass (only with a floored total)
    leaf = np.minimum(leaf, n_leaves - 1)
    c0, c1 = cum[leaf], cum[leaf + 1]
    mass = c1 - c0
    with np.errstate(invalid="ignore", divide="ignore"):
        frac = np.where(mass > 0, (ranks - c0) / mass, 0.0)
    frac = np.clip(frac, 0.0, 1.0)
    frac[beyond] = 1.0
    values = lo + (leaf + frac) * width
    values = np.clip(np.maximum.accumulate(values), lo, hi)
    return QuantileProfile(p, values, total)


def exact_quantiles(scores, Q: int) -> QuantileProfile:
    """Quantiles straight from sorted raw scores (inverse of the ECDF)."""
    scores = np.asarray(scores, dtype=np.float64)
    if scores.size == 0:
        raise ValueError("no scores")
    p = quantile_levels(Q)
    values = np.quantile(scores, p, method="inverted_cdf")
    return QuantileProfile(p, np.maximum.accumulate(values), float(scores.size))
