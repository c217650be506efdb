"""Command-line front end: ``fedroc gen | run | sweep | exact``.

Settings resolve as built-in defaults < ``--config`` JSON file < explicit
flags. Exit status is 0 on success, 1 on usage errors and 2 on data errors.
Outputs land in ``--out`` (default: ``$FEDROC_OUTPUT_ROOT/<verb>``, falling
back to ``./fedroc-out/<verb>``):

    metrics.csv             one row per (run, curve kind)
    medians.csv             sweep only: per-cell medians across seeds
    curves/<cell>/<kind>.csv
    config.lock             the resolved configuration
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
from pathlib import Path

from .curves import exact_pr, exact_roc
from .metrics import auc_roc, average_precision
from .protocol import MODES, STRATEGIES, ProtocolConfig, run
from .score_data import (
    LabeledScores,
    PartitionSpec,
    SyntheticSpec,
    generate,
    load_csv,
    save_csv,
    subsample_ratio,
)

OUTPUT_ROOT_ENV = "FEDROC_OUTPUT_ROOT"
METRIC_FIELDS = ["dataset", "mode", "kind", "Q", "epsilon", "strategy", "interp", "seed", "AE", "AUC_or_AP", "comm_bytes"]
KEY_FIELDS = METRIC_FIELDS[:8]
SWEEP_AXES = ("Q", "epsilon", "ratio", "interp", "strategy")

DEFAULTS = {
    "data": None,
    "range": [0.0, 1.0],
    "n_pos": 10_000,
    "n_neg": 10_000,
    "pos_beta": [5.0, 2.0],
    "neg_beta": [2.0, 5.0],
    "data_seed": 0,
    "ratio": None,
    "clients": 10,
    "partition": "iid",
    "skew": 1.0,
    "mode": "SA",
    "Q": 256,
    "epsilon": None,
    "branching": 2,
    "slack": 2,
    "strategy": "separate",
    "interp": "pchip",
    "grid_density": 2048,
    "strict_combine_budget": False,
    "seed": 0,
    "kinds": ["ROC", "PR"],
    "axis": None,
    "values": None,
    "reps": 20,
    "resume": False,
    "out": None,
}


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _floats(text):
    return [float(v) for v in text.split(",")]


def _words(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_data_flags(p):
    g = p.add_argument_group("dataset")
    g.add_argument("--data", help="score CSV with header score,label")
    g.add_argument("--range", type=_floats, help="score range lo,hi")
    g.add_argument("--n-pos", type=int)
    g.add_argument("--n-neg", type=int)
    g.add_argument("--pos-beta", type=_floats, help="Beta shapes a,b for positives")
    g.add_argument("--neg-beta", type=_floats, help="Beta shapes a,b for negatives")
    g.add_argument("--data-seed", type=int)
    g.add_argument("--ratio", type=float, help="subsample positives to this pos/neg ratio")


def _add_protocol_flags(p):
    g = p.add_argument_group("protocol")
    g.add_argument("--clients", type=int)
    g.add_argument("--partition", choices=["iid", "label-skew"])
    g.add_argument("--skew", type=float)
    g.add_argument("--mode", choices=MODES)
    g.add_argument("--Q", "-Q", type=int, dest="Q")
    g.add_argument("--epsilon", type=float)
    g.add_argument("--branching", type=int)
    g.add_argument("--slack", type=int)
    g.add_argument("--strategy", choices=STRATEGIES)
    g.add_argument("--interp", choices=["linear", "pchip"])
    g.add_argument("--grid-density", type=int)
    g.add_argument("--strict-combine-budget", action="store_true", default=None)
    g.add_argument("--seed", type=int)
    g.add_argument("--kinds", type=_words, help="curve kinds to report, e.g. ROC,PR")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fedroc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", help="write a synthetic score CSV")
    p.add_argument("--config")
    _add_data_flags(p)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("exact", help="exact ROC/PR breakpoints, AUC and AP")
    p.add_argument("--config")
    _add_data_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("run", help="one simulated federated run")
    p.add_argument("--config")
    _add_data_flags(p)
    _add_protocol_flags(p)
    p.add_argument("--out")

    p = sub.add_parser("sweep", help="repeat runs over one parameter axis")
    p.add_argument("--config")
    _add_data_flags(p)
    _add_protocol_flags(p)
    p.add_argument("--axis", choices=SWEEP_AXES)
    p.add_argument("--values", type=_words, help="comma-separated axis values")
    p.add_argument("--reps", type=int)
    p.add_argument("--resume", action="store_true", default=None)
    p.add_argument("--out")
    return parser


def resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            with open(args.config, encoding="utf-8") as fh:
                from_file = json.load(fh)
        except OSError as exc:
            raise DataError(f"cannot read config: {exc}") from None
        except json.JSONDecodeError as exc:
            raise UsageError(f"config is not valid JSON: {exc}") from None
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        cfg.update(from_file)
    for key, value in vars(args).items():
        if key in DEFAULTS and value is not None:
            cfg[key] = value
    return cfg


def _out_dir(cfg: dict, verb: str) -> Path:
    if cfg.get("out"):
        return Path(cfg["out"])
    root = os.environ.get(OUTPUT_ROOT_ENV)
    return Path(root or "fedroc-out") / verb


def dataset_name(cfg: dict) -> str:
    if cfg["data"]:
        name = Path(cfg["data"]).stem
    else:
        a, b = cfg["pos_beta"], cfg["neg_beta"]
        name = f"beta({a[0]:g},{a[1]:g})-vs-beta({b[0]:g},{b[1]:g})"
    if cfg["ratio"] is not None:
        name += f"[r={float(cfg['ratio']):g}]"
    return name


def load_dataset(cfg: dict, seed_offset: int = 0) -> tuple[LabeledScores, str]:
    """Dataset described by ``cfg`` plus a label for metrics rows.

    Synthetic data is redrawn with ``data_seed + seed_offset`` so sweep
    repetitions see fresh samples; a CSV dataset stays fixed.
    """
    score_range = tuple(cfg["range"])
    if cfg["data"]:
        path = Path(cfg["data"])
        if not path.is_file():
            raise DataError(f"no such data file: {path}")
        data = load_csv(path, score_range)
    else:
        spec = SyntheticSpec(
            tuple(cfg["pos_beta"]),
            tuple(cfg["neg_beta"]),
            int(cfg["n_pos"]),
            int(cfg["n_neg"]),
            int(cfg["data_seed"]) + seed_offset,
            score_range,
        )
        data = generate(spec)
    if cfg["ratio"] is not None:
        data = subsample_ratio(data, float(cfg["ratio"]), seed=int(cfg["data_seed"]) + seed_offset)
    return data, dataset_name(cfg)


def protocol_config(cfg: dict) -> ProtocolConfig:
    return ProtocolConfig(
        Q=int(cfg["Q"]),
        branching=int(cfg["branching"]),
        slack=int(cfg["slack"]),
        mode=cfg["mode"],
        epsilon=None if cfg["epsilon"] is None else float(cfg["epsilon"]),
        pr_strategy=cfg["strategy"],
        interp=cfg["interp"],
        grid_density=int(cfg["grid_density"]),
        seed=int(cfg["seed"]),
        strict_combine_budget=bool(cfg["strict_combine_budget"]),
    )


def partition_spec(cfg: dict) -> PartitionSpec:
    return PartitionSpec(cfg["partition"], int(cfg["clients"]), int(cfg["seed"]), float(cfg["skew"]))


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def metric_rows(result, name: str, cfg: dict, pcfg: ProtocolConfig) -> list[dict]:
    rows = []
    for kind in cfg["kinds"]:
        kind = kind.upper()
        if kind not in ("ROC", "PR"):
            raise UsageError(f"unknown curve kind {kind!r}")
        rows.append(
            {
                "dataset": name,
                "mode": pcfg.mode,
                "kind": kind,
                "Q": str(pcfg.Q),
                "epsilon": _fmt(pcfg.epsilon if pcfg.mode == "DDP" else None),
                "strategy": pcfg.pr_strategy,
                "interp": pcfg.interp,
                "seed": str(pcfg.seed),
                "AE": _fmt(result.ae_roc if kind == "ROC" else result.ae_pr),
                "AUC_or_AP": _fmt(result.auc if kind == "ROC" else result.ap),
                "comm_bytes": str(result.comm_bytes_per_client),
            }
        )
    return rows


def _append_rows(path: Path, rows: list[dict]) -> None:
    new = not path.exists()
    with open(path, "a", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, METRIC_FIELDS, lineterminator="\n")
        if new:
            writer.writeheader()
        writer.writerows(rows)


def _read_rows(path: Path) -> list[dict]:
    if not path.exists():
        return []
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _write_curves(out: Path, cell: str, result, kinds) -> None:
    d = out / "curves" / cell
    d.mkdir(parents=True, exist_ok=True)
    for kind in kinds:
        curve = result.roc if kind.upper() == "ROC" else result.pr
        (d / f"{kind.lower()}.csv").write_text(curve.to_csv(), encoding="utf-8")


def _write_lock(out: Path, cfg: dict) -> None:
    (out / "config.lock").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_gen(cfg: dict) -> int:
    data, _ = load_dataset(cfg)
    out = Path(cfg["out"])
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(data, out)
    print(f"wrote {len(data)} records ({data.n_pos} pos, {data.n_neg} neg) to {out}")
    return 0


def cmd_exact(cfg: dict) -> int:
    data, name = load_dataset(cfg)
    try:
        roc, pr = exact_roc(data), exact_pr(data)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    out = _out_dir(cfg, "exact")
    d = out / "curves" / "exact"
    d.mkdir(parents=True, exist_ok=True)
    (d / "roc.csv").write_text(roc.to_csv(), encoding="utf-8")
    (d / "pr.csv").write_text(pr.to_csv(), encoding="utf-8")
    summary = {"dataset": name, "n_pos": data.n_pos, "n_neg": data.n_neg, "AUC": auc_roc(roc), "AP": average_precision(pr)}
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    print(json.dumps(summary, sort_keys=True))
    return 0


def _single_run(cfg: dict, seed_offset: int = 0):
    data, name = load_dataset(cfg, seed_offset)
    try:
        data.require_both_classes()
    except ValueError as exc:
        raise DataError(str(exc)) from None
    pcfg = protocol_config(cfg)
    result = run(data, partition_spec(cfg), pcfg)
    return result, name, pcfg


def cmd_run(cfg: dict) -> int:
    try:
        protocol_config(cfg)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result, name, pcfg = _single_run(cfg)
    out = _out_dir(cfg, "run")
    out.mkdir(parents=True, exist_ok=True)
    rows = metric_rows(result, name, cfg, pcfg)
    _append_rows(out / "metrics.csv", rows)
    _write_curves(out, f"{pcfg.mode}-Q{pcfg.Q}-seed{pcfg.seed}", result, cfg["kinds"])
    (out / "run.json").write_text(result.to_json() + "\n", encoding="utf-8")
    _write_lock(out, cfg)
    for row in rows:
        print(",".join(row[f] for f in METRIC_FIELDS))
    return 0


def _axis_values(cfg: dict) -> list:
    axis, values = cfg["axis"], cfg["values"]
    if axis is None or not values:
        raise UsageError("sweep needs --axis and a non-empty --values list")
    if axis == "Q":
        return [int(v) for v in values]
    if axis in ("epsilon", "ratio"):
        return [float(v) for v in values]
    return [str(v) for v in values]


_AXIS_KEY = {"Q": "Q", "epsilon": "epsilon", "ratio": "ratio", "interp": "interp", "strategy": "strategy"}


def cmd_sweep(cfg: dict) -> int:
    values = _axis_values(cfg)
    reps = int(cfg["reps"])
    if reps < 1:
        raise UsageError("reps must be >= 1")
    axis = cfg["axis"]
    for v in values:
        try:
            protocol_config({**cfg, _AXIS_KEY[axis]: v})
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    # fail on unreadable data before anything is written
    load_dataset(cfg)

    out = _out_dir(cfg, "sweep")
    out.mkdir(parents=True, exist_ok=True)
    metrics_path = out / "metrics.csv"
    if not cfg["resume"] and metrics_path.exists():
        metrics_path.unlink()
    done = {tuple(r[k] for k in KEY_FIELDS) for r in _read_rows(metrics_path)}
    _write_lock(out, cfg)

    base_seed = int(cfg["seed"])
    for v in values:
        for rep in range(reps):
            cell_cfg = {**cfg, _AXIS_KEY[axis]: v, "seed": base_seed + rep}
            pcfg = protocol_config(cell_cfg)
            name = dataset_name(cell_cfg)
            keys = [
                (name, pcfg.mode, k.upper(), str(pcfg.Q), _fmt(pcfg.epsilon if pcfg.mode == "DDP" else None),
                 pcfg.pr_strategy, pcfg.interp, str(pcfg.seed))
                for k in cell_cfg["kinds"]
            ]
            if all(k in done for k in keys):
                continue
            result, name, pcfg = _single_run(cell_cfg, seed_offset=rep)
            rows = [r for r in metric_rows(result, name, cell_cfg, pcfg) if tuple(r[k] for k in KEY_FIELDS) not in done]
            _append_rows(metrics_path, rows)
            _write_curves(out, f"{axis}-{v}_seed-{pcfg.seed}", result, cell_cfg["kinds"])

    medians = median_rows(_read_rows(metrics_path))
    with open(out / "medians.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, METRIC_FIELDS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(medians)
    for row in medians:
        print(",".join(row[f] for f in METRIC_FIELDS))
    return 0


def median_rows(rows: list[dict]) -> list[dict]:
    """Median AE, AUC/AP and bytes per cell (every key field except seed)."""
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        cells.setdefault(tuple(r[k] for k in KEY_FIELDS if k != "seed"), []).append(r)
    out = []
    for key, group in cells.items():
        row = dict(zip([k for k in KEY_FIELDS if k != "seed"], key))
        row["seed"] = "median"
        row["AE"] = repr(statistics.median(float(g["AE"]) for g in group))
        row["AUC_or_AP"] = repr(statistics.median(float(g["AUC_or_AP"]) for g in group))
        row["comm_bytes"] = str(int(statistics.median(int(g["comm_bytes"]) for g in group)))
        out.append(row)
    return out


COMMANDS = {"gen": cmd_gen, "exact": cmd_exact, "run": cmd_run, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve(args)
        return COMMANDS[args.verb](cfg)
    except UsageError as exc:
        print(f"fedroc: usage error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError, ValueError) as exc:
        print(f"fedroc: data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
