"""Discrete-step churn driver."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import analysis, topology
from .analysis import MetricsRow
from .graph import OverlayGraph
from .protocols import (
    HealReport,
    NodeTargets,
    ProtocolConfig,
    capture_views,
    heal_failure,
    periodic_link_reduction,
    update_targets,
)
from .topology import TopologyMeta, TopologySpec


class Mode(str, Enum):
    EVOLUTION = "evolution"
    TARGETED_DEGREE = "targeted-degree"
    TARGETED_BETWEENNESS = "targeted-betweenness"
    FAILURES_ONLY = "failures-only"


class RunComplete(Exception):
    """No active node is left to fail."""


@dataclass(frozen=True)
class ScenarioSpec:
    mode: Mode = Mode.EVOLUTION
    # failures-only runs until the overlay is empty when steps is None
    steps: int | None = 100
    fails_per_step: int = 1
    joins_per_step: int | None = None
    runs: int = 20
    base_seed: int = 0

    @property
    def joins(self) -> int:
        if self.mode == Mode.FAILURES_ONLY:
            return 0
        return self.fails_per_step if self.joins_per_step is None else self.joins_per_step

    def validate(self) -> None:
        if self.steps is not None and self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.fails_per_step < 1:
            raise ValueError("fails_per_step must be >= 1")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.mode == Mode.FAILURES_ONLY:
            if self.joins_per_step not in (None, 0):
                raise ValueError("failures-only mode has no joins")
        elif self.joins != self.fails_per_step:
            raise ValueError("joins_per_step must equal fails_per_step outside failures-only")


_STREAMS = ("topology", "victim", "heal", "arrival", "wiring")


def substreams(base_seed: int, run_index: int) -> dict[str, random.Random]:
    """Independent generators per purpose, keyed by (seed, run, purpose)."""
    out = {}
    for i, name in enumerate(_STREAMS):
        ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(run_index, i))
        out[name] = random.Random(int(ss.generate_state(1, dtype=np.uint64)[0]))
    return out


@dataclass
class HealStats:
    created: int = 0
    refused: int = 0
    skipped: int = 0
    removed: int = 0


@dataclass
class RunResult:
    rows: list[MetricsRow]
    final_edges: list[tuple[int, int]]
    heal: HealStats


def select_victim(g: OverlayGraph, meta: TopologyMeta, mode: Mode, rng: random.Random) -> int:
    nodes = g.active_nodes()
    if not nodes:
        raise RunComplete
    if mode in (Mode.EVOLUTION, Mode.FAILURES_ONLY):
        return nodes[rng.randrange(len(nodes))]
    if mode == Mode.TARGETED_DEGREE:
        if meta.cluster_of is not None:
            score = {n: analysis.inter_cluster_degree(g, meta.cluster_of, n) for n in nodes}
        else:
            score = {n: g.degree(n) for n in nodes}
    elif mode == Mode.TARGETED_BETWEENNESS:
        score = analysis.betweenness(g)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    # max score, lowest id on ties
    return min(nodes, key=lambda n: (-score[n], n))


@dataclass
class Simulation:
    graph: OverlayGraph
    meta: TopologyMeta
    topo: TopologySpec
    protocol: ProtocolConfig
    scenario: ScenarioSpec
    rngs: dict[str, random.Random]
    step_index: int = 0
    stats: HealStats = field(default_factory=HealStats)
    targets: dict[int, NodeTargets] = field(default_factory=dict)

    def metrics(self) -> MetricsRow:
        return analysis.snapshot(self.graph, self.step_index, self.meta.initial_degrees)

    def fail_one(self) -> HealReport:
        g = self.graph
        f = select_victim(g, self.meta, self.scenario.mode, self.rngs["victim"])
        views = capture_views(g, f)
        g.fail_node(f)
        self.targets.pop(f, None)
        rep = heal_failure(g, f, views, self.protocol, self.rngs["heal"])
        self.stats.created += rep.created
        self.stats.refused += rep.refused
        self.stats.skipped += rep.skipped
        return rep

    def join_one(self) -> int | None:
        pool = self.graph.inactive_nodes()
        if not pool:
            return None
        n = pool[self.rngs["arrival"].randrange(len(pool))]
        self.graph.activate_node(n)
        topology.join(self.graph, self.meta, self.topo, n, self.rngs["wiring"])
        return n

    def reduce_links(self) -> None:
        cfg = self.protocol
        g = self.graph
        for n in g.active_nodes():
            t = self.targets.setdefault(n, NodeTargets(cfg.target_window))
            update_targets(t, g, n)
            self.stats.removed += len(periodic_link_reduction(g, n, t, cfg))

    def step(self) -> MetricsRow:
        """Advance one step; raises RunComplete once nothing is left to fail."""
        if self.graph.num_active() == 0:
            raise RunComplete
        self.step_index += 1
        for _ in range(self.scenario.fails_per_step):
            if self.graph.num_active() == 0:
                break
            self.fail_one()
        for _ in range(self.scenario.joins):
            self.join_one()
        cfg = self.protocol
        if cfg.link_reduction_enabled and self.step_index % cfg.check_period == 0:
            self.reduce_links()
        return self.metrics()


def build(topo: TopologySpec, protocol: ProtocolConfig, scenario: ScenarioSpec,
          run_index: int = 0) -> Simulation:
    protocol.validate()
    scenario.validate()
    rngs = substreams(scenario.base_seed, run_index)
    g, meta = topology.generate(topo, rngs["topology"])
    return Simulation(g, meta, topo, protocol, scenario, rngs)


def run(topo: TopologySpec, protocol: ProtocolConfig, scenario: ScenarioSpec,
        run_index: int = 0) -> RunResult:
    sim = build(topo, protocol, scenario, run_index)
    rows = [sim.metrics()]
    limit = scenario.steps
    if limit is None and scenario.mode != Mode.FAILURES_ONLY:
        raise ValueError("steps is required outside failures-only mode")
    while limit is None or sim.step_index < limit:
        try:
            rows.append(sim.step())
        except RunComplete:
            break
    return RunResult(rows, list(sim.graph.edges()), sim.stats)
