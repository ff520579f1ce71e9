"""Global metrics over the active part of an overlay graph.

All functions are read-only on the graph. The dense helpers build a CSR
adjacency over active nodes once and use scipy for the heavy lifting; the
per-node quantities match ``OverlayGraph.second_neighbors`` etc. exactly.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, fields
from typing import Mapping, Sequence

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .graph import GraphError, OverlayGraph


@dataclass
class MetricsRow:
    step: int
    main_component_size: float
    main_component_fraction: float
    isolated_count: float
    avg_deg1: float
    avg_deg2: float
    clustering: float
    diameter: float
    mean_degree_gap: float

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def values(self) -> list[float]:
        return [getattr(self, c) for c in self.columns()]


def _csr(g: OverlayGraph) -> tuple[np.ndarray, sparse.csr_matrix]:
    """Active node ids and the symmetric 0/1 adjacency restricted to them."""
    nodes = np.array(g.active_nodes(), dtype=np.int64)
    index = np.full(g.capacity, -1, dtype=np.int64)
    index[nodes] = np.arange(len(nodes))
    rows, cols = [], []
    for u in nodes.tolist():
        for v in g.adj(u):
            rows.append(u)
            cols.append(v)
    r = index[np.array(rows, dtype=np.int64)] if rows else np.empty(0, dtype=np.int64)
    c = index[np.array(cols, dtype=np.int64)] if cols else np.empty(0, dtype=np.int64)
    a = sparse.csr_matrix((np.ones(len(r), dtype=np.int64), (r, c)), shape=(len(nodes), len(nodes)))
    return nodes, a


def _components(nodes: np.ndarray, a: sparse.csr_matrix) -> tuple[int, np.ndarray]:
    if len(nodes) == 0:
        return 0, np.empty(0, dtype=np.int64)
    return csgraph.connected_components(a, directed=False)


def _main_label(nodes: np.ndarray, labels: np.ndarray) -> int:
    sizes = np.bincount(labels)
    first = np.full(len(sizes), len(labels), dtype=np.int64)
    np.minimum.at(first, labels, np.arange(len(labels)))
    # nodes are sorted, so the smallest position is the smallest id
    cand = np.flatnonzero(sizes == sizes.max())
    return int(cand[np.argmin(first[cand])])


def main_component(g: OverlayGraph) -> set[int]:
    nodes, a = _csr(g)
    if len(nodes) == 0:
        return set()
    _, labels = _components(nodes, a)
    lab = _main_label(nodes, labels)
    return set(nodes[labels == lab].tolist())


def isolated_count(g: OverlayGraph) -> int:
    return sum(1 for n in g.active_nodes() if g.degree(n) == 0)


def avg_first_neighbors(g: OverlayGraph) -> float:
    nodes = g.active_nodes()
    if not nodes:
        return 0.0
    return sum(g.degree(n) for n in nodes) / len(nodes)


def _second_counts(a: sparse.csr_matrix) -> np.ndarray:
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    two = (a @ a).tocsr()
    two.setdiag(0)
    two.eliminate_zeros()
    two.data[:] = 1
    # drop first neighbors
    only = two - two.multiply(a)
    only.eliminate_zeros()
    return np.diff(only.indptr)


def avg_second_neighbors(g: OverlayGraph) -> float:
    nodes, a = _csr(g)
    if len(nodes) == 0:
        return 0.0
    return float(_second_counts(a).mean())


def _local_clustering(a: sparse.csr_matrix) -> np.ndarray:
    deg = np.diff(a.indptr).astype(float)
    tri = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    out = np.zeros_like(deg)
    ok = deg >= 2
    out[ok] = 2.0 * tri[ok] / (deg[ok] * (deg[ok] - 1))
    return out


def clustering_coefficient(g: OverlayGraph) -> float:
    """Mean local clustering over active nodes (0 for nodes of degree < 2)."""
    nodes, a = _csr(g)
    if len(nodes) == 0:
        return 0.0
    return float(_local_clustering(a).mean())


def _diameter_of(a: sparse.csr_matrix, members: np.ndarray) -> int:
    # Bit-parallel BFS from every member at once: row v holds the set reached
    # from v, one uint64 word per 64 members. The number of expansions until
    # no row grows is the largest eccentricity.
    n = len(members)
    if n <= 1:
        return 0
    sub = a[members][:, members].tocsr()
    idx = np.arange(n)
    reach = np.zeros((n, (n + 63) // 64), dtype=np.uint64)
    reach[idx, idx // 64] = np.left_shift(np.uint64(1), (idx % 64).astype(np.uint64))
    starts = sub.indptr[:-1]
    hops = 0
    while True:
        grown = reach | np.bitwise_or.reduceat(reach[sub.indices], starts, axis=0)
        if np.array_equal(grown, reach):
            return hops
        reach = grown
        hops += 1


def diameter(g: OverlayGraph) -> int:
    """Largest eccentricity inside the main component."""
    nodes, a = _csr(g)
    if len(nodes) == 0:
        return 0
    _, labels = _components(nodes, a)
    lab = _main_label(nodes, labels)
    return _diameter_of(a, np.flatnonzero(labels == lab))


def betweenness(g: OverlayGraph) -> dict[int, float]:
    """Unnormalized betweenness over unordered pairs of active nodes (Brandes)."""
    nodes = g.active_nodes()
    bet = dict.fromkeys(nodes, 0.0)
    for s in nodes:
        stack = []
        preds: dict[int, list[int]] = {s: []}
        sigma = {s: 1}
        dist = {s: 0}
        q = deque([s])
        while q:
            v = q.popleft()
            stack.append(v)
            dv = dist[v] + 1
            for w in g.adj(v):
                if w not in dist:
                    dist[w] = dv
                    sigma[w] = 0
                    preds[w] = []
                    q.append(w)
                if dist[w] == dv:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = dict.fromkeys(stack, 0.0)
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                bet[w] += delta[w]
    # every unordered pair was counted from both endpoints
    return {n: b / 2.0 for n, b in bet.items()}


def degree_gap(g: OverlayGraph, initial_degrees: Mapping[int, int] | Sequence[int]) -> float:
    """Mean absolute degree change over active nodes whose degree changed."""
    gaps = []
    for n in g.active_nodes():
        d = abs(g.degree(n) - initial_degrees[n])
        if d:
            gaps.append(d)
    return sum(gaps) / len(gaps) if gaps else 0.0


def inter_cluster_degree(g: OverlayGraph, cluster_of: Mapping[int, int] | Sequence[int] | None, n: int) -> int:
    if cluster_of is None:
        raise GraphError("inter-cluster degree needs a cluster map")
    c = cluster_of[n]
    return sum(1 for m in g.adj(n) if cluster_of[m] != c)


def snapshot(g: OverlayGraph, step: int, initial_degrees) -> MetricsRow:
    """All per-step metrics from one shared CSR build."""
    nodes, a = _csr(g)
    total = len(nodes)
    if total == 0:
        return MetricsRow(step, 0, 0.0, 0, 0.0, 0.0, 0.0, 0, 0.0)
    _, labels = _components(nodes, a)
    lab = _main_label(nodes, labels)
    members = np.flatnonzero(labels == lab)
    deg = np.diff(a.indptr)
    return MetricsRow(
        step=step,
        main_component_size=len(members),
        main_component_fraction=len(members) / total,
        isolated_count=int((deg == 0).sum()),
        avg_deg1=float(deg.mean()),
        avg_deg2=float(_second_counts(a).mean()),
        clustering=float(_local_clustering(a).mean()),
        diameter=_diameter_of(a, members),
        mean_degree_gap=degree_gap(g, initial_degrees),
    )
