"""Failure reactions: the ``none`` baseline, the 2-neighborhood protocol and
its ECC-gated variant with optional periodic link reduction.

Messaging is instantaneous and reliable, so the distributed contention among
the failed node's neighbors is emulated by processing every pending link
request in the order of an independent random timestamp. Any such order is a
legal distributed execution.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .graph import GraphError, OverlayGraph


class Protocol(str, Enum):
    NONE = "none"
    P2N = "p2n"
    PECC = "pecc"


@dataclass(frozen=True)
class ProtocolConfig:
    kind: Protocol = Protocol.P2N
    threshold_degree: int = 100
    link_reduction_enabled: bool = False
    r: int = 1
    t_ecc: float = 0.5
    check_period: int = 10
    target_window: int = 5
    excess_factor: float = 1.5

    def validate(self) -> None:
        if self.threshold_degree < 1:
            raise ValueError("threshold_degree must be >= 1")
        if not 0.0 <= self.t_ecc <= 1.0:
            raise ValueError("t_ecc must lie in [0, 1]")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.excess_factor <= 1.0:
            raise ValueError("excess_factor must be > 1")
        if self.check_period < 1 or self.target_window < 1:
            raise ValueError("check_period and target_window must be >= 1")


@dataclass
class NeighborView:
    """What a neighbor ``n`` of the failing node knew just before the failure."""
    lost: set[int]
    ecc: float


@dataclass
class HealReport:
    created: int = 0
    refused: int = 0
    skipped: int = 0
    activated: set[int] = field(default_factory=set)
    links: list[tuple[int, int]] = field(default_factory=list)

    def merge(self, other: "HealReport") -> None:
        self.created += other.created
        self.refused += other.refused
        self.skipped += other.skipped


def compute_lost_set(g: OverlayGraph, n: int, f: int) -> set[int]:
    """Second neighbors of ``n`` reachable in two hops only through ``f``.

    ``g`` must still contain the edge ``(n, f)``.
    """
    if not g.has_edge(n, f):
        raise GraphError(f"{f} is not a neighbor of {n}")
    own = g.adj(n)
    lost = g.adj(f) - own - {n}
    for q in own:
        if q != f:
            lost -= g.adj(q)
            if not lost:
                break
    return lost


def capture_views(g: OverlayGraph, f: int) -> dict[int, NeighborView]:
    """Snapshot every neighbor's lost set and ECC toward ``f`` before it fails."""
    return {n: NeighborView(compute_lost_set(g, n, f), g.ecc(n, f)) for n in sorted(g.adj(f))}


def plan_intents(
    views: dict[int, NeighborView], cfg: ProtocolConfig, rng: random.Random
) -> tuple[dict[int, set[int]], list[tuple[int, int]], set[int]]:
    """Decide which neighbors react and order their link requests.

    Returns the mutable pending sets, the time-ordered ``(n, p)`` intents and
    the set of neighbors that passed the ECC gate.
    """
    if cfg.kind == Protocol.NONE:
        return {}, [], set()
    pending: dict[int, set[int]] = {}
    active = set()
    for n in sorted(views):
        view = views[n]
        if cfg.kind == Protocol.PECC and not rng.random() > view.ecc:
            continue
        active.add(n)
        if view.lost:
            pending[n] = set(view.lost)
    stamped = []
    for n in sorted(pending):
        for p in sorted(pending[n]):
            stamped.append((rng.random(), n, p))
    stamped.sort()
    return pending, [(n, p) for _, n, p in stamped], active


def run_contention(
    g: OverlayGraph,
    pending: dict[int, set[int]],
    intents: list[tuple[int, int]],
    cfg: ProtocolConfig,
) -> HealReport:
    """Play the link requests in the given order against the live graph."""
    report = HealReport()
    limit = cfg.threshold_degree
    for n, p in intents:
        own = pending.get(n)
        if own is None or p not in own:
            report.skipped += 1
            continue
        if g.degree(n) > limit:
            report.skipped += 1
            continue
        own.discard(p)
        if g.has_edge(n, p) or g.degree(p) > limit or _within_two(g, n, p):
            report.refused += 1
            continue
        g.add_edge(n, p)
        report.created += 1
        report.links.append((n, p))
        # "novel link" notifications to both endpoints' neighbors
        for q in g.adj(n):
            lost = pending.get(q)
            if lost:
                lost.discard(p)
        for q in g.adj(p):
            lost = pending.get(q)
            if lost:
                lost.discard(n)
    return report


def _within_two(g: OverlayGraph, n: int, p: int) -> bool:
    an, ap = g.adj(n), g.adj(p)
    if len(an) > len(ap):
        an, ap = ap, an
    return not an.isdisjoint(ap)


def heal_failure(
    g: OverlayGraph,
    f: int,
    views: dict[int, NeighborView],
    cfg: ProtocolConfig,
    rng: random.Random,
) -> HealReport:
    """React to the failure of ``f`` (already removed from ``g``)."""
    if g.is_active(f):
        raise GraphError(f"node {f} has not failed")
    pending, intents, active = plan_intents(views, cfg, rng)
    report = run_contention(g, pending, intents, cfg)
    report.activated = active
    return report


# -- link reduction ---------------------------------------------------------


@dataclass
class NodeTargets:
    window: int
    samples: deque = field(init=False)

    def __post_init__(self):
        self.samples = deque(maxlen=self.window)

    @property
    def defined(self) -> bool:
        return bool(self.samples)

    @property
    def target_degree(self) -> float:
        return sum(s[0] for s in self.samples) / len(self.samples)

    @property
    def target_neighborhood_links(self) -> float:
        return sum(s[1] for s in self.samples) / len(self.samples)


def update_targets(targets: NodeTargets, g: OverlayGraph, n: int) -> None:
    targets.samples.append((g.degree(n), g.neighborhood_links(n)))


def periodic_link_reduction(
    g: OverlayGraph, n: int, targets: NodeTargets, cfg: ProtocolConfig
) -> set[tuple[int, int]]:
    """Drop up to ``r`` high-ECC links of ``n`` when its neighborhood has swollen."""
    if not targets.defined:
        return set()
    k = cfg.excess_factor
    if not (g.degree(n) > k * targets.target_degree
            and g.neighborhood_links(n) > k * targets.target_neighborhood_links):
        return set()
    scored = sorted((-g.ecc(n, m), m) for m in g.adj(n))
    removed = set()
    for neg, m in scored[: cfg.r]:
        if -neg <= cfg.t_ecc:
            break
        g.remove_edge(n, m)
        removed.add((min(n, m), max(n, m)))
    return removed
