"""Area Error, AUC, average precision and point-error diagnostics.

Curves are read as functions of x on [0, 1]. Linear curves interpolate
between consecutive points; step curves hold the precision of the first
point reached at or after x (right-end constant). Outside the point span
the end values are extended. At an x shared by several points (vertical
segments) the pointwise value is the largest y there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .curves import CurveEstimate

DEFAULT_GRID = 10_000


@dataclass(frozen=True)
class CurveFunction:
    x: np.ndarray
    y: np.ndarray
    step: bool = False

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        y = np.asarray(self.y, dtype=np.float64)
        if x.shape != y.shape or x.size == 0:
            raise ValueError("curve needs matching, non-empty x and y")
        if np.any(np.diff(x) < 0):
            raise ValueError("curve x must be non-decreasing")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @classmethod
    def of(cls, curve) -> "CurveFunction":
        if isinstance(curve, CurveFunction):
            return curve
        if isinstance(curve, CurveEstimate):
            return cls(curve.x, curve.y, curve.step)
        x, y = curve
        return cls(x, y)

    def left_limit(self, xq) -> np.ndarray:
        """Value approached from below: taken from the first point at x >= xq."""
        xq = np.asarray(xq, dtype=np.float64)
        x, y = self.x, self.y
        j = np.searchsorted(x, xq, side="left")
        if self.step:
            return y[np.minimum(j, x.size - 1)]
        return self._lerp(j - 1, j, xq)

    def right_limit(self, xq) -> np.ndarray:
        """Value approached from above: taken from the last point at x <= xq."""
        xq = np.asarray(xq, dtype=np.float64)
        x, y = self.x, self.y
        j = np.searchsorted(x, xq, side="right")
        if self.step:
            return y[np.minimum(j, x.size - 1)]
        return self._lerp(j - 1, j, xq)

    def _lerp(self, i, j, xq):
        x, y = self.x, self.y
        n = x.size
        i_c = np.clip(i, 0, n - 1)
        j_c = np.clip(j, 0, n - 1)
        x0, x1, y0, y1 = x[i_c], x[j_c], y[i_c], y[j_c]
        span = x1 - x0
        with np.errstate(divide="ignore", invalid="ignore"):
            w = np.where(span > 0, (xq - x0) / span, 0.0)
        out = y0 + w * (y1 - y0)
        out = np.where(i < 0, y[0], out)
        return np.where(j >= n, y[-1], out)

    def __call__(self, xq):
        """Pointwise value; the supremum over points sharing ``xq``."""
        xq_arr = np.asarray(xq, dtype=np.float64)
        out = np.maximum(self.left_limit(xq_arr), self.right_limit(xq_arr))
        lo = np.searchsorted(self.x, xq_arr, side="left")
        hi = np.searchsorted(self.x, xq_arr, side="right")
        hit = hi > lo
        if np.any(hit):
            runmax = np.maximum.reduceat(self.y, np.flatnonzero(np.r_[True, self.x[1:] != self.x[:-1]]))
            ux = np.unique(self.x)
            k = np.searchsorted(ux, xq_arr[hit])
            out = np.array(out, dtype=np.float64, copy=True)
            out[hit] = np.maximum(out[hit], runmax[k])
        return float(out) if np.ndim(xq) == 0 else out


def _abs_linear_integral(d0, d1, width):
    """Exact integral of |d| for d linear from d0 to d1 over ``width``."""
    same = d0 * d1 >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        crossing = (d0 * d0 + d1 * d1) / (2 * (np.abs(d0) + np.abs(d1)))
    crossing = np.where(np.abs(d0) + np.abs(d1) > 0, crossing, 0.0)
    return width * np.where(same, 0.5 * np.abs(d0 + d1), crossing)


def _union_grid(G: int, *curves: CurveFunction) -> np.ndarray:
    parts = [np.linspace(0.0, 1.0, max(G, 2))]
    parts += [np.clip(c.x, 0.0, 1.0) for c in curves]
    return np.unique(np.concatenate(parts))


def area_error(exact, est, G: int = DEFAULT_GRID) -> float:
    """Integral over [0, 1] of |exact(x) - est(x)|.

    Trapezoids on the union of both curves' breakpoints and a uniform
    ``G``-point grid. Between grid nodes both curves are linear or constant,
    so each cell is integrated exactly, splitting at a sign change.
    """
    a, b = CurveFunction.of(exact), CurveFunction.of(est)
    xs = _union_grid(G, a, b)
    x0, x1 = xs[:-1], xs[1:]
    d0 = a.right_limit(x0) - b.right_limit(x0)
    d1 = a.left_limit(x1) - b.left_limit(x1)
    return float(np.sum(_abs_linear_integral(d0, d1, x1 - x0)))


def _area(curve: CurveFunction, G: int) -> float:
    xs = _union_grid(G, curve)
    x0, x1 = xs[:-1], xs[1:]
    return float(np.sum(0.5 * (curve.right_limit(x0) + curve.left_limit(x1)) * (x1 - x0)))


def auc_roc(curve, G: int = 2) -> float:
    """Trapezoidal area under a ROC curve on [0, 1]."""
    return _area(CurveFunction.of(curve), G)


def average_precision(curve) -> float:
    """Sum of recall increments times the precision at each increment's right end."""
    c = CurveFunction.of(curve)
    dx = np.diff(c.x)
    return float(np.sum(dx * c.y[1:]))


def abs_point_error(exact, est, thresholds) -> tuple[float, float]:
    """(max, mean) of |exact(s) - est(s)| over shared thresholds.

    ``exact`` and ``est`` are callables of the threshold, e.g. exact and
    estimated TPR.
    """
    s = np.asarray(thresholds, dtype=np.float64)
    diff = np.abs(np.asarray(exact(s), dtype=np.float64) - np.asarray(est(s), dtype=np.float64))
    return float(diff.max()), float(diff.mean())
