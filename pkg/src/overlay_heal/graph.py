"""Undirected overlay graph with a fixed pool of node slots.

Nodes are dense integer ids ``0..capacity-1``. A failed node keeps its id and
can later be reactivated to model a fresh arrival.
"""

from __future__ import annotations

from typing import Iterable, Iterator


class GraphError(ValueError):
    """Raised when an operation violates a graph precondition."""


class OverlayGraph:
    def __init__(self, capacity: int, active: bool = True):
        if capacity < 0:
            raise GraphError("capacity must be non-negative")
        self.capacity = capacity
        self._active = [active] * capacity
        self._adj: list[set[int]] = [set() for _ in range(capacity)]

    @classmethod
    def from_edges(cls, capacity: int, edges: Iterable[tuple[int, int]]) -> "OverlayGraph":
        g = cls(capacity)
        for u, v in edges:
            g.add_edge(u, v)
        return g

    def copy(self) -> "OverlayGraph":
        g = OverlayGraph.__new__(OverlayGraph)
        g.capacity = self.capacity
        g._active = list(self._active)
        g._adj = [set(a) for a in self._adj]
        return g

    # -- lifecycle ---------------------------------------------------------

    def _check(self, n: int) -> None:
        if not 0 <= n < self.capacity:
            raise GraphError(f"node {n} out of range")
        if not self._active[n]:
            raise GraphError(f"node {n} is inactive")

    def is_active(self, n: int) -> bool:
        return self._active[n]

    def activate_node(self, n: int) -> None:
        if not 0 <= n < self.capacity:
            raise GraphError(f"node {n} out of range")
        if self._active[n]:
            raise GraphError(f"node {n} is already active")
        self._active[n] = True

    def fail_node(self, f: int) -> set[int]:
        """Deactivate ``f``, drop all its links and return its former neighbors."""
        self._check(f)
        former = self._adj[f]
        for m in former:
            self._adj[m].discard(f)
        self._adj[f] = set()
        self._active[f] = False
        return former

    def active_nodes(self) -> list[int]:
        return [n for n, a in enumerate(self._active) if a]

    def inactive_nodes(self) -> list[int]:
        return [n for n, a in enumerate(self._active) if not a]

    def num_active(self) -> int:
        return sum(self._active)

    # -- edges -------------------------------------------------------------

    def add_edge(self, n: int, m: int) -> bool:
        if n == m:
            raise GraphError(f"self-loop on {n}")
        self._check(n)
        self._check(m)
        if m in self._adj[n]:
            return False
        self._adj[n].add(m)
        self._adj[m].add(n)
        return True

    def remove_edge(self, n: int, m: int) -> bool:
        if n == m:
            raise GraphError(f"self-loop on {n}")
        self._check(n)
        self._check(m)
        if m not in self._adj[n]:
            return False
        self._adj[n].discard(m)
        self._adj[m].discard(n)
        return True

    def has_edge(self, n: int, m: int) -> bool:
        return m in self._adj[n]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Each undirected edge once as ``(u, v)`` with ``u < v``, sorted."""
        for u in range(self.capacity):
            for v in sorted(self._adj[u]):
                if u < v:
                    yield u, v

    def num_edges(self) -> int:
        return sum(len(a) for a in self._adj) // 2

    def degree(self, n: int) -> int:
        return len(self._adj[n])

    # -- neighborhoods -----------------------------------------------------

    def neighbors(self, n: int) -> set[int]:
        self._check(n)
        return set(self._adj[n])

    def adj(self, n: int) -> set[int]:
        """Live adjacency set of ``n`` (no copy, no checks). Do not mutate."""
        return self._adj[n]

    def second_neighbors_via(self, n: int, m: int) -> set[int]:
        """Nodes two hops from ``n`` through ``m``: ``Pi_m - Pi_n - {n}``."""
        self._check(n)
        if m not in self._adj[n]:
            raise GraphError(f"{m} is not a neighbor of {n}")
        return self._adj[m] - self._adj[n] - {n}

    def second_neighbors(self, n: int) -> set[int]:
        self._check(n)
        own = self._adj[n]
        out: set[int] = set()
        for k in own:
            out |= self._adj[k]
        out -= own
        out.discard(n)
        return out

    def triangle_count(self, n: int, m: int) -> int:
        if m not in self._adj[n]:
            raise GraphError(f"({n}, {m}) is not an edge")
        return len(self._adj[n] & self._adj[m])

    def ecc(self, n: int, m: int) -> float:
        """Edge clustering coefficient; 0 when no triangle is possible."""
        t = self.triangle_count(n, m)
        denom = min(len(self._adj[n]) - 1, len(self._adj[m]) - 1)
        if denom <= 0:
            return 0.0
        return t / denom

    def neighborhood_links(self, n: int) -> int:
        """Distinct edges with at least one endpoint in ``Pi_n | {n}``."""
        ball = self._adj[n] | {n}
        total = 0
        inner = 0
        for u in ball:
            for v in self._adj[u]:
                total += 1
                if v in ball:
                    inner += 1
        # inner edges were seen from both sides
        return total - inner // 2

    # -- export ------------------------------------------------------------

    def to_edgelist(self) -> str:
        return "".join(f"{u} {v}\n" for u, v in self.edges())

    def check_invariants(self) -> None:
        for u in range(self.capacity):
            if not self._active[u] and self._adj[u]:
                raise GraphError(f"inactive node {u} has links")
            if u in self._adj[u]:
                raise GraphError(f"self-loop on {u}")
            for v in self._adj[u]:
                if u not in self._adj[v]:
                    raise GraphError(f"asymmetric edge ({u}, {v})")
                if not self._active[v]:
                    raise GraphError(f"edge to inactive node ({u}, {v})")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OverlayGraph):
            return NotImplemented
        return (self.capacity == other.capacity and self._active == other._active
                and self._adj == other._adj)

    def __repr__(self) -> str:
        return f"OverlayGraph(active={self.num_active()}/{self.capacity}, edges={self.num_edges()})"
