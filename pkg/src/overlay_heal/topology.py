"""Initial overlay generators and the matching join procedures."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Union

from .graph import OverlayGraph


class TopologyError(ValueError):
    """Invalid generator parameters or an unrealizable degree sequence."""


@dataclass(frozen=True)
class Uniform:
    n: int = 500
    d: int = 4
    # "regular": every node starts with degree exactly d.
    # "pick": every node links to d random others (mean degree about 2d).
    start: str = "regular"

    def validate(self) -> None:
        if self.n < 1:
            raise TopologyError("n must be >= 1")
        if self.d < 1:
            raise TopologyError("d must be >= 1")
        if self.d >= self.n:
            raise TopologyError("d must be < n")
        if self.start not in ("regular", "pick"):
            raise TopologyError(f"unknown uniform start {self.start!r}")
        if self.start == "regular" and self.n * self.d % 2:
            raise TopologyError("n*d must be even for a d-regular graph")


@dataclass(frozen=True)
class Clustered:
    k: int = 4
    s: int = 125
    gamma: float = 0.05
    omega: float = 0.005

    def validate(self) -> None:
        if self.k < 1 or self.s < 1:
            raise TopologyError("k and s must be >= 1")
        for name in ("gamma", "omega"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise TopologyError(f"{name} must lie in [0, 1]")


@dataclass(frozen=True)
class ScaleFreeACL:
    a: float = 6.0
    b: float = 2.0
    # links made by an arriving node (preferential attachment)
    m: int = 1

    def validate(self) -> None:
        if self.a <= 0 or self.b <= 0:
            raise TopologyError("a and b must be > 0")
        if self.m < 1:
            raise TopologyError("m must be >= 1")

    def degree_counts(self) -> dict[int, int]:
        """Number of nodes of each degree ``x``: ``floor(e^a / x^b)``."""
        top = math.floor(math.exp(self.a / self.b))
        return {x: math.floor(math.exp(self.a) / x ** self.b) for x in range(1, top + 1)}


@dataclass(frozen=True)
class ScaleFreePA:
    n: int = 500
    m: int = 3

    def validate(self) -> None:
        if self.m < 1:
            raise TopologyError("m must be >= 1")
        if self.n <= self.m:
            raise TopologyError("n must exceed m")


TopologySpec = Union[Uniform, Clustered, ScaleFreeACL, ScaleFreePA]


@dataclass
class TopologyMeta:
    kind: str
    initial_degrees: list[int]
    # cluster id per node slot, clustered topologies only
    cluster_of: list[int] | None = None


# -- degree-sequence realization -------------------------------------------


def _pair_stubs(degrees: list[int], rng: random.Random, tries: int = 200) -> set[tuple[int, int]]:
    """Random simple graph with the exact degree sequence.

    Stubs are shuffled and paired; pairs forming a self-loop or duplicate
    go back into the pool and are reshuffled. A pool with no suitable pair
    left restarts from scratch.
    """
    if sum(degrees) % 2:
        raise TopologyError("degree sum must be even")
    base = [v for v, d in enumerate(degrees) for _ in range(d)]
    for _ in range(tries):
        stubs = list(base)
        edges: set[tuple[int, int]] = set()
        while stubs:
            rng.shuffle(stubs)
            left = []
            for i in range(0, len(stubs), 2):
                u, v = stubs[i], stubs[i + 1]
                if u > v:
                    u, v = v, u
                if u != v and (u, v) not in edges:
                    edges.add((u, v))
                else:
                    left += (u, v)
            if len(left) == len(stubs) and not _has_suitable_pair(left, edges):
                break
            stubs = left
        else:
            return edges
    raise TopologyError(f"could not realize degree sequence in {tries} tries")


def _has_suitable_pair(stubs: list[int], edges: set[tuple[int, int]]) -> bool:
    ids = sorted(set(stubs))
    for i, u in enumerate(ids):
        for v in ids[i + 1:]:
            if (u, v) not in edges:
                return True
    return False


def acl_degree_sequence(spec: ScaleFreeACL, rng: random.Random) -> list[int]:
    degrees = [x for x, c in sorted(spec.degree_counts().items()) for _ in range(c)]
    if sum(degrees) % 2:
        ones = [i for i, d in enumerate(degrees) if d == 1]
        if not ones:
            raise TopologyError("odd degree sum with no degree-1 node to trim")
        degrees[rng.choice(ones)] -= 1
    return degrees


# -- generators --------------------------------------------------------------


def generate(spec: TopologySpec, rng: random.Random) -> tuple[OverlayGraph, TopologyMeta]:
    spec.validate()
    cluster_of = None
    if isinstance(spec, Uniform):
        g = OverlayGraph(spec.n)
        if spec.start == "regular":
            for u, v in sorted(_pair_stubs([spec.d] * spec.n, rng)):
                g.add_edge(u, v)
        else:
            for u in range(spec.n):
                for v in sorted(rng.sample(range(spec.n - 1), spec.d)):
                    g.add_edge(u, v + (v >= u))
        kind = "uniform"
    elif isinstance(spec, Clustered):
        g, cluster_of = _clustered(spec, rng)
        kind = "clustered"
    elif isinstance(spec, ScaleFreeACL):
        degrees = acl_degree_sequence(spec, rng)
        g = OverlayGraph(len(degrees))
        for u, v in sorted(_pair_stubs(degrees, rng)):
            g.add_edge(u, v)
        kind = "acl"
    elif isinstance(spec, ScaleFreePA):
        g = _preferential_attachment(spec, rng)
        kind = "pa"
    else:
        raise TopologyError(f"unknown topology {spec!r}")
    meta = TopologyMeta(kind, [g.degree(v) for v in range(g.capacity)], cluster_of)
    return g, meta


def _clustered(spec: Clustered, rng: random.Random) -> tuple[OverlayGraph, list[int]]:
    k, s = spec.k, spec.s
    g = OverlayGraph(k * s)
    cluster_of = [v // s for v in range(k * s)]
    for c in range(k):
        lo = c * s
        for i in range(s):
            for j in range(i + 1, s):
                if rng.random() < spec.gamma:
                    g.add_edge(lo + i, lo + j)
    for v in range(k * s):
        for c in range(k):
            if c == cluster_of[v]:
                continue
            if rng.random() < spec.omega:
                g.add_edge(v, c * s + rng.randrange(s))
    return g, cluster_of


def _preferential_attachment(spec: ScaleFreePA, rng: random.Random) -> OverlayGraph:
    g = OverlayGraph(spec.n)
    # seed clique on m+1 nodes, then each arrival attaches to m distinct targets
    seed = spec.m + 1
    targets: list[int] = []
    for u in range(seed):
        for v in range(u + 1, seed):
            g.add_edge(u, v)
            targets += (u, v)
    for v in range(seed, spec.n):
        chosen: set[int] = set()
        while len(chosen) < spec.m:
            chosen.add(rng.choice(targets))
        for u in sorted(chosen):
            g.add_edge(v, u)
            targets += (u, v)
    return g


# -- joins -------------------------------------------------------------------


def weighted_sample(cands: list[int], weights: list[float], k: int, rng: random.Random) -> list[int]:
    """``k`` distinct items drawn sequentially with probability proportional to weight."""
    cands = list(cands)
    weights = list(weights)
    out = []
    for _ in range(min(k, len(cands))):
        total = sum(weights)
        x = rng.random() * total
        acc = 0.0
        pick = len(cands) - 1
        for i, w in enumerate(weights):
            acc += w
            if x < acc:
                pick = i
                break
        out.append(cands.pop(pick))
        weights.pop(pick)
    return out


def join(g: OverlayGraph, meta: TopologyMeta, spec: TopologySpec, n: int, rng: random.Random) -> None:
    """Wire a freshly activated node ``n`` following the topology's attachment rule."""
    others = [v for v in g.active_nodes() if v != n]
    if isinstance(spec, Uniform):
        for v in sorted(rng.sample(others, min(spec.d, len(others)))):
            g.add_edge(n, v)
    elif isinstance(spec, Clustered):
        c = rng.randrange(spec.k)
        meta.cluster_of[n] = c
        by_cluster: dict[int, list[int]] = {}
        for v in others:
            by_cluster.setdefault(meta.cluster_of[v], []).append(v)
        for v in by_cluster.get(c, []):
            if rng.random() < spec.gamma:
                g.add_edge(n, v)
        for oc in range(spec.k):
            if oc == c:
                continue
            if rng.random() < spec.omega and by_cluster.get(oc):
                g.add_edge(n, rng.choice(by_cluster[oc]))
    elif isinstance(spec, (ScaleFreeACL, ScaleFreePA)):
        weights = [max(g.degree(v), 1) for v in others]
        for v in sorted(weighted_sample(others, weights, spec.m, rng)):
            g.add_edge(n, v)
    else:
        raise TopologyError(f"unknown topology {spec!r}")
    meta.initial_degrees[n] = g.degree(n)
