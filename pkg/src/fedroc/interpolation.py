"""Monotone interpolation: linear chords and Fritsch-Carlson PCHIP.

Both interpolants clamp to the boundary knot values outside the knot span,
so a fitted ECDF never leaves [min y, max y].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

METHODS = ("linear", "pchip")


def collapse_duplicates(x, y) -> tuple[np.ndarray, np.ndarray]:
    """Merge runs of equal ``x`` into one knot carrying the run's largest ``y``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size == 0:
        return x, y
    if np.any(np.diff(x) < 0):
        raise ValueError("x must be non-decreasing")
    starts = np.flatnonzero(np.r_[True, x[1:] != x[:-1]])
    return x[starts], np.maximum.reduceat(y, starts)


def _pchip_slopes(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    h = np.diff(x)
    delta = np.diff(y) / h
    n = x.size
    d = np.zeros(n)
    if n == 2:
        d[:] = delta[0]
        return d

    # interior: weighted harmonic mean where the secants agree in sign
    h0, h1 = h[:-1], h[1:]
    s0, s1 = delta[:-1], delta[1:]
    w1 = 2 * h1 + h0
    w2 = h1 + 2 * h0
    same = (np.sign(s0) * np.sign(s1)) > 0
    # product form of (w1 + w2) / (w1 / s0 + w2 / s1); no overflow on tiny secants
    with np.errstate(divide="ignore", invalid="ignore", under="ignore"):
        hm = (w1 + w2) * s0 * s1 / (w1 * s1 + w2 * s0)
    d[1:-1] = np.where(same, hm, 0.0)

    d[0] = _edge_slope(h[0], h[1], delta[0], delta[1])
    d[-1] = _edge_slope(h[-1], h[-2], delta[-1], delta[-2])
    return d


def _edge_slope(h0, h1, s0, s1) -> float:
    # one-sided three-point estimate, kept between 0 and 3x the end secant
    d = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1)
    if np.sign(d) != np.sign(s0):
        return 0.0
    if np.sign(s0) != np.sign(s1) and abs(d) > abs(3 * s0):
        return 3 * s0
    return d


@dataclass(frozen=True)
class MonotoneInterpolant:
    x: np.ndarray
    y: np.ndarray
    method: str
    slopes: np.ndarray | None = None

    def __call__(self, xq):
        return evaluate(self, xq)


def fit(x, y, method: str = "pchip") -> MonotoneInterpolant:
    if method not in METHODS:
        raise ValueError(f"unknown interpolation method {method!r}")
    x, y = collapse_duplicates(x, y)
    if x.size < 2:
        raise ValueError("need at least 2 distinct x values")
    if np.any(np.diff(y) < 0):
        raise ValueError("y must be non-decreasing in x")
    slopes = _pchip_slopes(x, y) if method == "pchip" else None
    return MonotoneInterpolant(x, y, method, slopes)


def evaluate(f: MonotoneInterpolant, xq):
    xq_arr = np.asarray(xq, dtype=np.float64)
    x, y = f.x, f.y
    if f.method == "linear":
        out = np.interp(xq_arr, x, y)
    else:
        xc = np.clip(xq_arr, x[0], x[-1])
        k = np.clip(np.searchsorted(x, xc, side="right") - 1, 0, x.size - 2)
        h = x[k + 1] - x[k]
        t = (xc - x[k]) / h
        t2, t3 = t * t, t * t * t
        h01 = 3 * t2 - 2 * t3
        h10 = t3 - 2 * t2 + t
        h11 = t3 - t2
        rise = h01 * (y[k + 1] - y[k]) + h * (h10 * f.slopes[k] + h11 * f.slopes[k + 1])
        # knots are hit exactly; cubic round-off can stray by an ulp elsewhere
        out = np.clip(y[k] + rise, y[k], y[k + 1])
    if np.ndim(xq) == 0:
        return float(out)
    return out
