"""End-to-end federated ROC/PR reconstruction.

Clients bin their positive and negative scores into hierarchical histograms
(optionally perturbed with distributed noise) and send them up; the server
sums the messages, enforces consistency when noise is present, extracts
``Q`` quantiles per class, interpolates ECDFs and assembles the curves.
Secure aggregation is simulated as in-process summation of materialized
client messages, so message sizes stay measurable.

Modes:
  ``"EQ"``  exact quantiles from the pooled raw scores (idealized baseline)
  ``"SA"``  noiseless histograms, clients send leaf counts only
  ``"DDP"`` noisy histograms, clients send every level
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import hier_histogram as hh
from .curves import (
    DEFAULT_GRID_DENSITY,
    CurveEstimate,
    Ecdf,
    build_ecdf,
    exact_pr,
    exact_roc,
    pr_estimate_combine,
    pr_estimate_separate,
    roc_estimate,
    threshold_grid,
)
from .ddp_noise import PrivacyParams, add_noise
from .metrics import DEFAULT_GRID, area_error, auc_roc, average_precision
from .quantile_est import QuantileProfile, estimate_quantiles, exact_quantiles
from .score_data import LabeledScores, PartitionSpec, partition

MODES = ("EQ", "SA", "DDP")
STRATEGIES = ("separate", "combine")
TAGS = ("pos", "neg", "all")


@dataclass(frozen=True)
class ProtocolConfig:
    Q: int = 1024
    branching: int = 2
    slack: int = 2
    mode: str = "SA"
    epsilon: float | None = None
    pr_strategy: str = "separate"
    interp: str = "pchip"
    grid_density: int = DEFAULT_GRID_DENSITY
    seed: int = 0
    strict_combine_budget: bool = False
    bytes_per_count: int = 4
    ae_grid: int = DEFAULT_GRID

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.pr_strategy not in STRATEGIES:
            raise ValueError(f"pr_strategy must be one of {STRATEGIES}")
        if self.mode == "DDP" and not (self.epsilon is not None and self.epsilon > 0):
            raise ValueError("DDP mode needs epsilon > 0")
        if self.Q < 2:
            raise ValueError("Q must be >= 2")

    @property
    def height(self) -> int:
        return hh.height_for(self.Q, self.branching, self.slack)

    def tree_config(self, score_range) -> hh.TreeConfig:
        return hh.TreeConfig(self.branching, self.height, tuple(score_range))

    @property
    def tags(self) -> tuple[str, ...]:
        return TAGS if self.pr_strategy == "combine" else TAGS[:2]

    def histogram_epsilon(self) -> float:
        if self.pr_strategy == "combine" and self.strict_combine_budget:
            return self.epsilon / 2
        return self.epsilon

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ClientMessage:
    """What one client uploads: encoded trees (or raw scores in EQ mode)."""

    client: int
    payload: dict[str, bytes]
    count_bytes: int

    def trees(self) -> dict[str, hh.HierHistogram]:
        return {tag: hh.from_bytes(buf) for tag, buf in self.payload.items()}


def _client_rng(config: ProtocolConfig, client: int, tag: str) -> np.random.Generator:
    ss = np.random.SeedSequence(config.seed, spawn_key=(client, TAGS.index(tag)))
    return np.random.default_rng(ss)


def client_step(shard: LabeledScores, config: ProtocolConfig, client: int = 0, clients: int = 1) -> ClientMessage:
    class_scores = {"pos": shard.positives, "neg": shard.negatives, "all": shard.scores}
    if config.mode == "EQ":
        payload = {
            tag: np.ascontiguousarray(class_scores[tag], dtype="<f8").tobytes() for tag in config.tags
        }
        return ClientMessage(client, payload, sum(len(b) for b in payload.values()))

    tcfg = config.tree_config(shard.range)
    leaves_only = config.mode == "SA"
    payload = {}
    for tag in config.tags:
        tree = hh.build_tree(class_scores[tag], tcfg)
        if config.mode == "DDP":
            params = PrivacyParams(config.histogram_epsilon(), clients, tcfg.height)
            tree = add_noise(tree, params, _client_rng(config, client, tag))
        payload[tag] = hh.to_bytes(tree, leaves_only=leaves_only)
    count_bytes = len(payload) * hh.payload_nbytes(tcfg, leaves_only, config.bytes_per_count)
    return ClientMessage(client, payload, count_bytes)


@dataclass
class ServerOutput:
    profiles: dict[str, QuantileProfile]
    ecdfs: dict[str, Ecdf]
    totals: dict[str, float]
    roc: CurveEstimate
    pr: CurveEstimate
    trees: dict[str, hh.HierHistogram] = field(default_factory=dict)


def server_step(messages: list[ClientMessage], config: ProtocolConfig, score_range=(0.0, 1.0)) -> ServerOutput:
    messages = sorted(messages, key=lambda m: m.client)
    profiles: dict[str, QuantileProfile] = {}
    trees: dict[str, hh.HierHistogram] = {}

    if config.mode == "EQ":
        for tag in config.tags:
            scores = np.concatenate([np.frombuffer(m.payload[tag], dtype="<f8") for m in messages])
            profiles[tag] = exact_quantiles(scores, config.Q)
    else:
        decoded = [m.trees() for m in messages]
        for tag in config.tags:
            tree = hh.aggregate([d[tag] for d in decoded])
            if config.mode == "DDP":
                params = PrivacyParams(config.histogram_epsilon(), len(messages), tree.config.height)
                tree = hh.enforce_consistency(tree, params)
            trees[tag] = tree
            profiles[tag] = estimate_quantiles(tree, config.Q)

    totals = {tag: prof.total for tag, prof in profiles.items()}
    ecdfs = {tag: build_ecdf(prof, config.interp, tag) for tag, prof in profiles.items()}
    grid = threshold_grid(score_range, profiles["pos"], profiles["neg"], density=config.grid_density)
    meta = {
        "Q": config.Q,
        "mode": config.mode,
        "epsilon": config.epsilon if config.mode == "DDP" else None,
        "interp": config.interp,
        "n_pos_hat": totals["pos"],
        "n_neg_hat": totals["neg"],
    }
    roc = roc_estimate(ecdfs["neg"], ecdfs["pos"], grid, meta)
    pr_meta = dict(meta, strategy=config.pr_strategy)
    if config.pr_strategy == "separate":
        pr = pr_estimate_separate(ecdfs["neg"], ecdfs["pos"], totals["pos"], totals["neg"], grid, pr_meta)
    else:
        pr = pr_estimate_combine(ecdfs["all"], ecdfs["pos"], totals["all"], totals["pos"], grid, pr_meta)
    return ServerOutput(profiles, ecdfs, totals, roc, pr, trees)


@dataclass
class RunResult:
    roc: CurveEstimate
    pr: CurveEstimate
    ae_roc: float
    ae_pr: float
    auc: float
    ap: float
    comm_bytes_per_client: int
    counts: tuple[float, float]
    exact_auc: float = float("nan")
    exact_ap: float = float("nan")
    server: ServerOutput | None = field(default=None, repr=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "ae_roc": self.ae_roc,
                "ae_pr": self.ae_pr,
                "auc": self.auc,
                "ap": self.ap,
                "exact_auc": self.exact_auc,
                "exact_ap": self.exact_ap,
                "comm_bytes_per_client": self.comm_bytes_per_client,
                "counts": list(self.counts),
                "roc": json.loads(self.roc.to_json()),
                "pr": json.loads(self.pr.to_json()),
            },
            sort_keys=True,
        )


def run(data: LabeledScores, partition_spec: PartitionSpec | None = None, config: ProtocolConfig | None = None) -> RunResult:
    """Simulate the protocol over ``data`` and score it against the exact curves."""
    config = config or ProtocolConfig()
    partition_spec = partition_spec or PartitionSpec()
    data.require_both_classes()
    shards = partition(data, partition_spec)
    messages = [client_step(s, config, i, len(shards)) for i, s in enumerate(shards)]
    out = server_step(messages, config, data.range)

    ex_roc, ex_pr = exact_roc(data), exact_pr(data)
    return RunResult(
        roc=out.roc,
        pr=out.pr,
        ae_roc=area_error(ex_roc, out.roc, config.ae_grid),
        ae_pr=area_error(ex_pr, out.pr, config.ae_grid),
        auc=auc_roc(out.roc),
        ap=average_precision(out.pr),
        comm_bytes_per_client=max(m.count_bytes for m in messages),
        counts=(out.totals["pos"], out.totals["neg"]),
        exact_auc=auc_roc(ex_roc),
        exact_ap=average_precision(ex_pr),
        server=out,
    )


def with_overrides(config: ProtocolConfig, **kw) -> ProtocolConfig:
    return replace(config, **kw)
