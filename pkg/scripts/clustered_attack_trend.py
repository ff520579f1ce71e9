"""Tail trend of the unhealed main component under the clustered targeted attack.

Prints the mean trace, a least-squares fit over the last steps, and the number
of single-step spikes where a rejoining node briefly bridged two clusters.
"""

import argparse

import numpy as np
from scipy import stats

from overlay_heal import engine
from overlay_heal.engine import Mode, ScenarioSpec
from overlay_heal.harness import mean_rows
from overlay_heal.protocols import Protocol, ProtocolConfig
from overlay_heal.topology import Clustered


def main(runs: int, steps: int, tail: int) -> None:
    scenario = ScenarioSpec(Mode.TARGETED_DEGREE, steps, runs=runs)
    results = [engine.run(Clustered(), ProtocolConfig(Protocol.NONE), scenario, i) for i in range(runs)]
    frac = np.array(mean_rows(results))[:, 2]
    print("mean fraction every 5 steps:", np.round(frac[::5], 3))
    fit = stats.linregress(np.arange(tail), frac[-tail:])
    print(f"slope over last {tail} steps: {fit.slope:+.2e} (stderr {fit.stderr:.1e}, p={fit.pvalue:.2f})")
    spikes = sum(
        1
        for r in results
        for a, b in zip(r.rows[-tail - 1:], r.rows[-tail:])
        if b.main_component_fraction > a.main_component_fraction + 0.1
    )
    print(f"single-run jumps > 0.1 in the tail: {spikes}")


if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--runs", type=int, default=20)
    p.add_argument("--steps", type=int, default=100)
    p.add_argument("--tail", type=int, default=50)
    a = p.parse_args()
    main(a.runs, a.steps, a.tail)
