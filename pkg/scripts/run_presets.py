"""Run every named experiment preset (or a chosen subset) into out/<preset>/.

    python3 scripts/run_presets.py --runs 5 fig-uniform-evolution fig-threshold-20
"""

import argparse
import time
from dataclasses import dataclass, field
from pathlib import Path

from overlay_heal.harness import PRESETS, build_config, compare, run_experiment


@dataclass
class Batch:
    presets: list[str] = field(default_factory=lambda: sorted(PRESETS))
    out: Path = Path("out")
    runs: int | None = None
    seed: int = 0
    workers: int = 1


def run(batch: Batch) -> None:
    for name in batch.presets:
        overrides = {"preset": name, "out": str(batch.out / name), "seed": batch.seed, "workers": batch.workers}
        if batch.runs is not None:
            overrides["runs"] = batch.runs
        cfg = build_config({}, overrides)
        t0 = time.perf_counter()
        if len(cfg.protocols) > 1:
            compare(cfg)
        else:
            run_experiment(cfg)
        print(f"{name:28s} {time.perf_counter() - t0:7.1f}s -> {cfg.out}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("presets", nargs="*", metavar="PRESET", help="default: all presets")
    p.add_argument("--out", type=Path, default=Path("out"))
    p.add_argument("--runs", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    a = p.parse_args()
    unknown = set(a.presets) - set(PRESETS)
    if unknown:
        p.error(f"unknown presets {sorted(unknown)}; choose from {sorted(PRESETS)}")
    run(Batch(a.presets or sorted(PRESETS), a.out, a.runs, a.seed, a.workers))
