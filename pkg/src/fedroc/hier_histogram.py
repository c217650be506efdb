"""b-ary hierarchical histograms over a score range.

Level ``i`` (1 <= i <= h) splits the range into ``b**i`` equal-width bins.
The level-0 root is implicit: it is never stored or transmitted, so a tree
holds ``b + b**2 + ... + b**h`` counts.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class TreeConfig:
    branching: int = 2
    height: int = 1
    range: tuple[float, float] = (0.0, 1.0)

    def __post_init__(self):
        if self.branching < 2:
            raise ValueError("branching must be >= 2")
        if self.height < 1:
            raise ValueError("height must be >= 1")
        lo, hi = float(self.range[0]), float(self.range[1])
        if not lo < hi:
            raise ValueError(f"invalid range [{lo}, {hi}]")
        object.__setattr__(self, "range", (lo, hi))

    @property
    def n_leaves(self) -> int:
        return self.branching**self.height

    @property
    def n_bins(self) -> int:
        b, h = self.branching, self.height
        return b * (b**h - 1) // (b - 1)

    def level_size(self, level: int) -> int:
        return self.branching**level

    def leaf_edges(self) -> np.ndarray:
        lo, hi = self.range
        return np.linspace(lo, hi, self.n_leaves + 1)


def height_for(Q: int, b: int = 2, c: int = 2) -> int:
    """Tree height ``ceil(log_b Q) + c``; guarantees ``b**h > Q`` for c >= 1."""
    if Q < 2 or b < 2 or c < 0:
        raise ValueError("need Q >= 2, b >= 2, c >= 0")
    # integer ceil(log_b Q), immune to float log rounding
    k, p = 0, 1
    while p < Q:
        p *= b
        k += 1
    h = k + c
    if b**h <= Q:
        # c == 0 with Q an exact power of b
        h += 1
    return h


@dataclass(frozen=True)
class HierHistogram:
    config: TreeConfig
    levels: tuple[np.ndarray, ...]

    def __post_init__(self):
        levels = tuple(np.asarray(a) for a in self.levels)
        if len(levels) != self.config.height:
            raise ValueError(f"expected {self.config.height} levels, got {len(levels)}")
        for i, a in enumerate(levels, start=1):
            if a.shape != (self.config.level_size(i),):
                raise ValueError(f"level {i} must have {self.config.level_size(i)} bins")
        object.__setattr__(self, "levels", levels)

    @property
    def leaves(self) -> np.ndarray:
        return self.levels[-1]

    @property
    def is_integer(self) -> bool:
        return all(np.issubdtype(a.dtype, np.integer) for a in self.levels)

    def flat(self) -> np.ndarray:
        """Level-major concatenation of all stored counts."""
        return np.concatenate(self.levels)

    def level_sums(self) -> np.ndarray:
        return np.array([a.sum() for a in self.levels])

    def is_consistent(self, atol: float = 0.0) -> bool:
        b = self.config.branching
        for parent, child in zip(self.levels[:-1], self.levels[1:]):
            if not np.allclose(parent, child.reshape(-1, b).sum(axis=1), rtol=0, atol=atol):
                return False
        return True

    def __eq__(self, other):
        if not isinstance(other, HierHistogram):
            return NotImplemented
        return self.config == other.config and all(
            np.array_equal(a, b) for a, b in zip(self.levels, other.levels)
        )

    __hash__ = None


def _levels_from_leaves(leaves: np.ndarray, b: int, h: int) -> list[np.ndarray]:
    levels = [leaves]
    for _ in range(h - 1):
        levels.append(levels[-1].reshape(-1, b).sum(axis=1))
    return levels[::-1]


def leaf_index(scores, config: TreeConfig) -> np.ndarray:
    """Leaf bin of each score; bins are right-open except the last."""
    scores = np.asarray(scores, dtype=np.float64)
    lo, hi = config.range
    if scores.size and not ((scores >= lo) & (scores <= hi)).all():
        bad = scores[~((scores >= lo) & (scores <= hi))][0]
        raise ValueError(f"score {bad!r} outside [{lo}, {hi}]")
    n = config.n_leaves
    idx = np.floor((scores - lo) / (hi - lo) * n).astype(np.int64)
    return np.minimum(idx, n - 1)


def build_tree(scores, config: TreeConfig) -> HierHistogram:
    leaves = np.bincount(leaf_index(scores, config), minlength=config.n_leaves).astype(np.int64)
    return from_leaves(leaves, config)


def from_leaves(leaves, config: TreeConfig) -> HierHistogram:
    """Complete a tree from its leaf counts by summing up the levels."""
    leaves = np.asarray(leaves)
    return HierHistogram(config, tuple(_levels_from_leaves(leaves, config.branching, config.height)))


def zeros(config: TreeConfig) -> HierHistogram:
    return from_leaves(np.zeros(config.n_leaves, dtype=np.int64), config)


def aggregate(trees: Sequence[HierHistogram]) -> HierHistogram:
    """Bin-wise sum, reduced left to right in list order."""
    if not trees:
        raise ValueError("nothing to aggregate")
    config = trees[0].config
    for t in trees[1:]:
        if t.config != config:
            raise ValueError(f"config mismatch: {t.config} vs {config}")
    levels = list(trees[0].levels)
    for t in trees[1:]:
        levels = [acc + a for acc, a in zip(levels, t.levels)]
    return HierHistogram(config, tuple(levels))


def enforce_consistency(noisy: HierHistogram, params=None) -> HierHistogram:
    """Least-squares consistent tree under equal per-bin noise variance.

    Each level-1 bin roots an independent subtree (the root above them is not
    measured). Within a subtree the classic two-pass estimator applies: a
    bottom-up pass blends each node's own count with the sum of its
    children's estimates, then a top-down pass spreads every parent's
    residual equally over its children.

    ``params`` is accepted for interface symmetry with the noise layer; the
    budget is split evenly over levels, so the weights do not depend on it.
    """
    cfg = noisy.config
    b, h = cfg.branching, cfg.height
    if params is not None and getattr(params, "height", h) != h:
        raise ValueError("privacy params were set up for a different tree height")
    y = [np.asarray(a, dtype=np.float64) for a in noisy.levels]

    z = [None] * h
    z[h - 1] = y[h - 1]
    for i in range(h - 2, -1, -1):
        ell = h - i  # subtree height of a node on this level, leaves have 1
        bl, bl1 = float(b) ** ell, float(b) ** (ell - 1)
        child_sum = z[i + 1].reshape(-1, b).sum(axis=1)
        z[i] = ((bl - bl1) * y[i] + (bl1 - 1.0) * child_sum) / (bl - 1.0)

    x = [None] * h
    x[0] = z[0]
    for i in range(1, h):
        child_sum = z[i].reshape(-1, b).sum(axis=1)
        x[i] = z[i] + np.repeat((x[i - 1] - child_sum) / b, b)
    # re-derive parents from leaves so parent == child-sum holds bit-exactly
    return HierHistogram(cfg, tuple(_levels_from_leaves(x[h - 1], b, h)))


def _digits(index: np.ndarray, b: int, h: int) -> np.ndarray:
    out = np.empty((h,) + index.shape, dtype=np.int64)
    rem = index.copy()
    for i in range(h - 1, -1, -1):
        out[i] = rem % b
        rem //= b
    return out


def prefix_count(tree: HierHistogram, leaf_index: int) -> float:
    """Sum of leaves ``[0, leaf_index)`` via the root-to-leaf decomposition.

    At each level the query takes the left siblings of the path node, so at
    most ``(b - 1) * h`` stored bins are read.
    """
    cfg = tree.config
    b, h = cfg.branching, cfg.height
    if not 0 <= leaf_index <= cfg.n_leaves:
        raise IndexError(f"leaf_index {leaf_index} outside [0, {cfg.n_leaves}]")
    if leaf_index == cfg.n_leaves:
        return tree.levels[0].sum().item()
    digits = _digits(np.array(leaf_index), b, h)
    total = tree.levels[0].dtype.type(0)
    start = 0
    for i in range(h):
        d = int(digits[i])
        total = total + tree.levels[i][start:start + d].sum()
        start = (start + d) * b
    return total.item()


def prefix_counts(tree: HierHistogram) -> np.ndarray:
    """``prefix_count`` for every index ``0..b**h``, vectorized."""
    cfg = tree.config
    b, h = cfg.branching, cfg.height
    n = cfg.n_leaves
    idx = np.arange(n)
    digits = _digits(idx, b, h)
    out = np.zeros(n + 1, dtype=np.result_type(*tree.levels, np.int64))
    start = np.zeros(n, dtype=np.int64)
    for i in range(h):
        csum = np.concatenate([[0], np.cumsum(tree.levels[i])])
        d = digits[i]
        out[:n] += csum[start + d] - csum[start]
        start = (start + d) * b
    out[n] = tree.levels[0].sum()
    return out


# -- serialization ----------------------------------------------------------

_MAGIC = b"HHG1"
_HEADER = struct.Struct("<4sIIddBBQ")
_DTYPES = {0: np.dtype("<i4"), 1: np.dtype("<i8"), 2: np.dtype("<f8")}


def to_json(tree: HierHistogram, leaves_only: bool = False) -> str:
    cfg = tree.config
    counts = tree.leaves if leaves_only else tree.flat()
    return json.dumps(
        {
            "branching": cfg.branching,
            "height": cfg.height,
            "range": list(cfg.range),
            "leaves_only": leaves_only,
            "counts": counts.tolist(),
        }
    )


def from_json(text: str) -> HierHistogram:
    obj = json.loads(text)
    cfg = TreeConfig(obj["branching"], obj["height"], tuple(obj["range"]))
    counts = np.asarray(obj["counts"])
    if obj.get("leaves_only"):
        return from_leaves(counts, cfg)
    return _split_flat(counts, cfg)


def _split_flat(counts: np.ndarray, cfg: TreeConfig) -> HierHistogram:
    if counts.size != cfg.n_bins:
        raise ValueError(f"expected {cfg.n_bins} counts, got {counts.size}")
    bounds = np.cumsum([cfg.level_size(i) for i in range(1, cfg.height + 1)])[:-1]
    return HierHistogram(cfg, tuple(np.split(counts, bounds)))


def _dtype_code(values: np.ndarray) -> int:
    if np.issubdtype(values.dtype, np.integer):
        info = np.iinfo(np.int32)
        if values.size == 0 or (values.min() >= info.min and values.max() <= info.max):
            return 0
        return 1
    return 2


def to_bytes(tree: HierHistogram, leaves_only: bool = False) -> bytes:
    """Length-prefixed binary message: fixed header then the count payload.

    Integer trees go out as 32-bit counts when they fit, real-valued trees as
    float64.
    """
    cfg = tree.config
    counts = tree.leaves if leaves_only else tree.flat()
    code = _dtype_code(counts)
    payload = counts.astype(_DTYPES[code]).tobytes()
    header = _HEADER.pack(_MAGIC, cfg.branching, cfg.height, *cfg.range, code, int(leaves_only), counts.size)
    return header + payload


def from_bytes(buf: bytes) -> HierHistogram:
    magic, b, h, lo, hi, code, leaves_only, count = _HEADER.unpack_from(buf)
    if magic != _MAGIC:
        raise ValueError("not a serialized hierarchical histogram")
    dtype = _DTYPES[code]
    payload = buf[_HEADER.size:]
    if len(payload) != count * dtype.itemsize:
        raise ValueError("truncated histogram payload")
    counts = np.frombuffer(payload, dtype=dtype).astype(np.int64 if code < 2 else np.float64)
    cfg = TreeConfig(b, h, (lo, hi))
    if leaves_only:
        return from_leaves(counts, cfg)
    return _split_flat(counts, cfg)


def payload_nbytes(config: TreeConfig, leaves_only: bool, bytes_per_count: int = 4) -> int:
    """Bytes of counts one tree puts on the wire (header excluded)."""
    bins = config.n_leaves if leaves_only else config.n_bins
    return bins * bytes_per_count
