"""Experiment configuration, presets, batch execution and CSV output.

Configuration comes from three layers, later ones winning: a named preset,
a flat ``key = value`` file, and command-line flags.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np

from . import engine
from .analysis import MetricsRow
from .engine import Mode, RunResult, ScenarioSpec
from .protocols import Protocol, ProtocolConfig
from .topology import Clustered, ScaleFreeACL, ScaleFreePA, TopologyError, TopologySpec, Uniform

SEED_ENV = "OVERLAY_HEAL_SEED"
COLUMNS = MetricsRow.columns()


class ConfigError(ValueError):
    def __init__(self, key: str, msg: str):
        super().__init__(f"{key}: {msg}")
        self.key = key


# key -> parser; None in a value means "unset"
def _bool(v: str) -> bool:
    s = str(v).strip().lower()
    if s in ("1", "true", "yes", "on"):
        return True
    if s in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {v!r}")


def _steps(v: str) -> int | None:
    return None if str(v).strip().lower() in ("all", "none", "") else int(v)


def _protocols(v) -> list[str]:
    if isinstance(v, (list, tuple)):
        return list(v)
    return [p.strip() for p in str(v).split(",") if p.strip()]


KEYS: dict[str, Any] = {
    "preset": str,
    "topology": str,
    "n": int,
    "d": int,
    "uniform_start": str,
    "k": int,
    "s": int,
    "gamma": float,
    "omega": float,
    "acl_a": float,
    "acl_b": float,
    "acl_m": int,
    "pa_m": int,
    "protocol": _protocols,
    "mode": str,
    "steps": _steps,
    "runs": int,
    "seed": int,
    "threshold_degree": int,
    "fails_per_step": int,
    "link_reduction": _bool,
    "t_ecc": float,
    "r": int,
    "check_period": int,
    "target_window": int,
    "excess_factor": float,
    "out": str,
    "workers": int,
}

DEFAULTS: dict[str, Any] = {
    "topology": "uniform",
    "n": 500,
    "d": 4,
    "uniform_start": "regular",
    "k": 4,
    "s": 125,
    "gamma": 0.05,
    "omega": 0.005,
    "acl_a": 6.0,
    "acl_b": 2.0,
    "acl_m": 1,
    "pa_m": 3,
    "protocol": ["p2n"],
    "mode": "evolution",
    "steps": 100,
    "runs": 20,
    "threshold_degree": 100,
    "fails_per_step": 1,
    "link_reduction": False,
    "t_ecc": 0.5,
    "r": 1,
    "check_period": 10,
    "target_window": 5,
    "excess_factor": 1.5,
    "out": "out",
    "workers": 1,
}

ALL = ["none", "p2n", "pecc"]

PRESETS: dict[str, dict[str, Any]] = {
    "fig-uniform-evolution": {"topology": "uniform", "n": 500, "d": 4, "mode": "evolution", "protocol": ALL},
    "fig-uniform-targeted": {"topology": "uniform", "n": 500, "d": 4, "mode": "targeted-degree", "protocol": ALL},
    "fig-uniform-failures": {"topology": "uniform", "n": 500, "d": 4, "mode": "failures-only",
                             "steps": None, "protocol": ALL},
    "fig-clustered-evolution": {"topology": "clustered", "mode": "evolution", "protocol": ALL},
    "fig-clustered-targeted": {"topology": "clustered", "mode": "targeted-degree", "protocol": ALL},
    "fig-clustered-betweenness": {"topology": "clustered", "mode": "targeted-betweenness", "protocol": ALL},
    "fig-clustered-failures": {"topology": "clustered", "mode": "failures-only", "steps": None, "protocol": ALL},
    "fig-scalefree-evolution": {"topology": "pa", "n": 500, "pa_m": 3, "mode": "evolution", "protocol": ALL},
    "fig-scalefree-targeted": {"topology": "pa", "n": 500, "pa_m": 3, "mode": "targeted-degree", "protocol": ALL},
    "fig-scalefree-failures": {"topology": "acl", "acl_a": 6.0, "acl_b": 2.0, "mode": "failures-only",
                               "steps": None, "protocol": ALL},
    "fig-threshold-20": {"topology": "pa", "n": 500, "pa_m": 3, "mode": "targeted-degree",
                         "threshold_degree": 20, "protocol": ["p2n", "pecc"]},
    "fig-threshold-100": {"topology": "pa", "n": 500, "pa_m": 3, "mode": "targeted-degree",
                          "threshold_degree": 100, "protocol": ["p2n", "pecc"]},
}


@dataclass
class ExperimentConfig:
    topology: TopologySpec
    protocol: ProtocolConfig
    scenario: ScenarioSpec
    out: Path
    protocols: list[Protocol] = field(default_factory=list)
    preset: str | None = None
    workers: int = 1

    def for_protocol(self, kind: Protocol) -> "ExperimentConfig":
        return replace(self, protocol=replace(self.protocol, kind=kind), protocols=[kind])


def read_config_file(path: str | os.PathLike) -> dict[str, str]:
    raw = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", "expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        raw[key.replace("-", "_")] = value
    return raw


def _typed(raw: dict[str, Any]) -> dict[str, Any]:
    out = {}
    for key, value in raw.items():
        if key not in KEYS:
            raise ConfigError(key, "unknown key")
        if value is None:
            out[key] = None
            continue
        try:
            out[key] = KEYS[key](value)
        except (TypeError, ValueError) as exc:
            raise ConfigError(key, str(exc)) from None
    return out


def build_config(file_values: dict[str, Any] | None = None, overrides: dict[str, Any] | None = None,
                 env: dict[str, str] | None = None) -> ExperimentConfig:
    """Merge defaults, preset, file and overrides, then validate."""
    env = os.environ if env is None else env
    file_values = _typed(file_values or {})
    overrides = _typed(overrides or {})
    preset = overrides.get("preset") or file_values.get("preset")
    values = dict(DEFAULTS)
    if preset:
        if preset not in PRESETS:
            raise ConfigError("preset", f"unknown preset {preset!r}")
        values.update(PRESETS[preset])
    values.update(file_values)
    values.update(overrides)
    if values.get("seed") is None:
        try:
            values["seed"] = int(env.get(SEED_ENV, 0))
        except ValueError:
            raise ConfigError("seed", f"{SEED_ENV} is not an integer") from None
    return _validate(values, preset)


def _check(key: str, ok: bool, msg: str) -> None:
    if not ok:
        raise ConfigError(key, msg)


def _validate(v: dict[str, Any], preset: str | None) -> ExperimentConfig:
    kind = v["topology"]
    if kind == "uniform":
        topo: TopologySpec = Uniform(v["n"], v["d"], v["uniform_start"])
        _check("d", v["d"] >= 1, "must be >= 1")
        _check("uniform_start", v["uniform_start"] in ("regular", "pick"), "must be regular or pick")
    elif kind == "clustered":
        topo = Clustered(v["k"], v["s"], v["gamma"], v["omega"])
        _check("gamma", 0.0 <= v["gamma"] <= 1.0, "probability must lie in [0, 1]")
        _check("omega", 0.0 <= v["omega"] <= 1.0, "probability must lie in [0, 1]")
    elif kind in ("acl", "scale-free-acl"):
        topo = ScaleFreeACL(v["acl_a"], v["acl_b"], v["acl_m"])
        _check("acl_a", v["acl_a"] > 0, "must be > 0")
        _check("acl_b", v["acl_b"] > 0, "must be > 0")
    elif kind in ("pa", "scale-free-pa", "scale-free"):
        topo = ScaleFreePA(v["n"], v["pa_m"])
        _check("pa_m", v["pa_m"] >= 1, "must be >= 1")
    else:
        raise ConfigError("topology", f"unknown topology {kind!r}")
    try:
        topo.validate()
    except TopologyError as exc:
        raise ConfigError("topology", str(exc)) from None

    kinds = []
    for p in v["protocol"]:
        try:
            kinds.append(Protocol(p))
        except ValueError:
            raise ConfigError("protocol", f"unknown protocol {p!r}") from None
    _check("protocol", bool(kinds), "at least one protocol is required")
    try:
        mode = Mode(v["mode"])
    except ValueError:
        raise ConfigError("mode", f"unknown mode {v['mode']!r}") from None

    _check("threshold_degree", v["threshold_degree"] >= 1, "must be >= 1")
    _check("t_ecc", 0.0 <= v["t_ecc"] <= 1.0, "must lie in [0, 1]")
    _check("r", v["r"] >= 1, "must be >= 1")
    _check("excess_factor", v["excess_factor"] > 1.0, "must be > 1")
    _check("check_period", v["check_period"] >= 1, "must be >= 1")
    _check("target_window", v["target_window"] >= 1, "must be >= 1")
    _check("fails_per_step", v["fails_per_step"] >= 1, "must be >= 1")
    _check("runs", v["runs"] >= 1, "must be >= 1")
    _check("workers", v["workers"] >= 1, "must be >= 1")
    steps = v["steps"]
    _check("steps", steps is None or steps >= 0, "must be >= 0")
    _check("steps", steps is not None or mode == Mode.FAILURES_ONLY, "'all' only applies to failures-only")

    protocol = ProtocolConfig(
        kind=kinds[0],
        threshold_degree=v["threshold_degree"],
        link_reduction_enabled=v["link_reduction"],
        r=v["r"],
        t_ecc=v["t_ecc"],
        check_period=v["check_period"],
        target_window=v["target_window"],
        excess_factor=v["excess_factor"],
    )
    scenario = ScenarioSpec(mode=mode, steps=steps, fails_per_step=v["fails_per_step"],
                            runs=v["runs"], base_seed=v["seed"])
    return ExperimentConfig(topo, protocol, scenario, Path(v["out"]), kinds, preset, v["workers"])


# -- output ------------------------------------------------------------------


def _fmt(values) -> list[str]:
    step, *rest = values
    return [str(int(step))] + [f"{float(x):.6f}" for x in rest]


def write_rows(path: Path, rows: list[list[float]], prefix: list[str] | None = None) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(([] if prefix is None else ["protocol"]) + COLUMNS)
        for row in rows:
            w.writerow(([] if prefix is None else prefix) + _fmt(row))


def mean_rows(results: list[RunResult]) -> list[list[float]]:
    """Per-step column means over the runs that reached that step."""
    longest = max(len(r.rows) for r in results)
    out = []
    for i in range(longest):
        present = np.array([r.rows[i].values() for r in results if i < len(r.rows)], dtype=float)
        out.append(present.mean(axis=0).tolist())
    return out


def summary_text(results: list[RunResult], label: str) -> str:
    finals = np.array([r.rows[-1].values() for r in results], dtype=float)
    ddof = 1 if len(results) > 1 else 0
    lines = [f"# {label} runs={len(results)} final-step mean and sample std (ddof={ddof})",
             "column,mean,std"]
    for j, col in enumerate(COLUMNS):
        col_vals = finals[:, j]
        lines.append(f"{col},{col_vals.mean():.6f},{col_vals.std(ddof=ddof):.6f}")
    return "\n".join(lines) + "\n"


def _one_run(args) -> RunResult:
    topo, protocol, scenario, i = args
    return engine.run(topo, protocol, scenario, i)


def run_batch(cfg: ExperimentConfig) -> list[RunResult]:
    jobs = [(cfg.topology, cfg.protocol, cfg.scenario, i) for i in range(cfg.scenario.runs)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            return list(pool.map(_one_run, jobs))
    return [_one_run(j) for j in jobs]


def run_experiment(cfg: ExperimentConfig, out: Path | None = None) -> list[RunResult]:
    """Write run_<i>.csv, mean.csv and summary.txt for one protocol."""
    out = Path(out or cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    results = run_batch(cfg)
    for i, res in enumerate(results):
        write_rows(out / f"run_{i}.csv", [r.values() for r in res.rows])
    write_rows(out / "mean.csv", mean_rows(results))
    (out / "summary.txt").write_text(summary_text(results, f"protocol={cfg.protocol.kind.value}"))
    return results


def compare(cfg: ExperimentConfig, protocols: list[Protocol] | None = None) -> dict[Protocol, list[RunResult]]:
    """Run each protocol on the same seeds; merged means go to compare.csv."""
    protocols = list(protocols or cfg.protocols)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    all_results = {}
    with open(out / "compare.csv", "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["protocol"] + COLUMNS)
        for kind in protocols:
            results = run_experiment(cfg.for_protocol(kind), out / kind.value)
            all_results[kind] = results
            for row in mean_rows(results):
                w.writerow([kind.value] + _fmt(row))
    return all_results


# -- command line --------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="overlay-heal",
                                description="Churn simulations of self-healing P2P overlays.")
    p.add_argument("--config", help="flat key = value configuration file")
    for key in KEYS:
        flag = "--" + key.replace("_", "-")
        if key == "link_reduction":
            p.add_argument(flag, dest=key, nargs="?", const="true", default=None, metavar="BOOL")
        else:
            p.add_argument(flag, dest=key, default=None, metavar=key.upper())
    return p


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "config" and v is not None}
    try:
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, flags)
    except ConfigError as exc:
        print(f"overlay-heal: invalid configuration: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"overlay-heal: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        if len(cfg.protocols) > 1:
            compare(cfg)
        else:
            run_experiment(cfg)
    except OSError as exc:
        print(f"overlay-heal: cannot write output: {exc}", file=sys.stderr)
        return 1
    return 0
