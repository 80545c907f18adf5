"""Core state for the dynamic matching structure.

Holds the graph adjacency, the matching (mate map), the two-level vertex
partition, per-vertex ownership lists, and per-vertex free-neighbor indexes.
All operations here are O(1) except ``get_free``, which is O(threshold +
n/threshold) by design.  Update logic lives in :mod:`dynmatch.engine`.
"""

from __future__ import annotations

import math
import random
from array import array
from dataclasses import dataclass


def default_threshold(n: int) -> int:
    """Ceiling of sqrt(n): the cutoff separating the two vertex levels."""
    r = math.isqrt(n)
    return r if r * r == n else r + 1


@dataclass
class Config:
    """Construction parameters for a :class:`State`.

    ``threshold`` defaults to ceil(sqrt(n)); tests override it to reach the
    high-level machinery on tiny graphs.
    """

    n: int
    threshold: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"vertex count must be >= 1, got {self.n}")
        if self.threshold is None:
            self.threshold = default_threshold(self.n)
        elif self.threshold < 1:
            raise ValueError(f"threshold must be >= 1, got {self.threshold}")


class IndexableSet:
    """Set of ints with O(1) add/remove/contains and O(1) uniform sampling.

    A dense list backs the sampling; removal swaps the victim with the last
    list element so both structures stay consistent without shifting.
    """

    __slots__ = ("_pos", "_items")

    def __init__(self) -> None:
        self._pos: dict[int, int] = {}
        self._items: list[int] = []

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, x: int) -> bool:
        return x in self._pos

    def __iter__(self):
        return iter(self._items)

    def add(self, x: int) -> None:
        if x in self._pos:
            raise ValueError(f"{x} already present")
        self._pos[x] = len(self._items)
        self._items.append(x)

    def remove(self, x: int) -> None:
        pos = self._pos.pop(x, None)
        if pos is None:
            raise ValueError(f"{x} not present")
        last = self._items.pop()
        if last != x:
            self._items[pos] = last
            self._pos[last] = pos

    def sample(self, rng: random.Random) -> int:
        if not self._items:
            raise ValueError("cannot sample from an empty set")
        return self._items[rng.randrange(len(self._items))]

    def sorted_items(self) -> list[int]:
        return sorted(self._items)


class FreeNeighborIndex:
    """Free-neighbor index F(v) for one vertex.

    Membership is a hash set (a sparse stand-in for a length-n boolean
    array), backed by counters over id-range buckets of width ``threshold``
    and a running total.  ``has_free`` is O(1); ``get_free`` scans the
    counters for the first nonzero bucket and then that bucket's id range,
    so it costs O(n/threshold + threshold).
    """

    __slots__ = ("members", "buckets", "total", "_width", "_n")

    def __init__(self, n: int, threshold: int) -> None:
        self.members: set[int] = set()
        nbuckets = (n + threshold - 1) // threshold
        self.buckets = array("i", bytes(4 * nbuckets))
        self.total = 0
        self._width = threshold
        self._n = n

    def __contains__(self, u: int) -> bool:
        return u in self.members

    def insert(self, u: int) -> None:
        """Add u; inserting a present member is a no-op."""
        members = self.members
        if u in members:
            return
        members.add(u)
        self.buckets[u // self._width] += 1
        self.total += 1

    def delete(self, u: int) -> None:
        """Remove u; deleting an absent member is a no-op."""
        members = self.members
        if u not in members:
            return
        members.remove(u)
        self.buckets[u // self._width] -= 1
        self.total -= 1

    def has_free(self) -> bool:
        return self.total > 0

    def get_free(self) -> int | None:
        """Lowest member of the lowest-indexed nonzero bucket, or None."""
        if not self.total:
            return None
        members = self.members
        width = self._width
        for j, count in enumerate(self.buckets):
            if count:
                start = j * width
                for x in range(start, min(start + width, self._n)):
                    if x in members:
                        return x
                raise RuntimeError(f"bucket {j} counter out of sync")
        raise RuntimeError("total out of sync with bucket counters")

    def check_integrity(self) -> bool:
        return self.total == len(self.members) == sum(self.buckets)


class State:
    """Complete algorithm state over a fixed vertex set [0, n).

    Starts as the empty graph: every vertex free, at level 0, owning
    nothing.  The per-update ``flag`` records whether a randomized settle
    has happened in the current update; ``trace`` collects the procedure
    calls of the current update.
    """

    def __init__(self, config: Config) -> None:
        n = config.n
        self.config = config
        self.threshold = config.threshold
        self.adj: list[set[int]] = [set() for _ in range(n)]
        self.mate: list[int | None] = [None] * n
        self.level: list[int] = [0] * n
        self.owners: list[IndexableSet] = [IndexableSet() for _ in range(n)]
        self.free_index: list[FreeNeighborIndex] = [
            FreeNeighborIndex(n, config.threshold) for _ in range(n)
        ]
        self.rng = random.Random(config.seed)
        self.flag = False
        self.edge_count = 0
        self.matching_size = 0
        self.update_index = -1
        self.trace: list[tuple] = []
        self.observer = None

    @property
    def n(self) -> int:
        return self.config.n

    def deg(self, v: int) -> int:
        return len(self.adj[v])

    def check_vertex(self, v: int) -> None:
        if not 0 <= v < self.config.n:
            raise ValueError(f"vertex {v} out of range [0, {self.config.n})")

    # -- adjacency ---------------------------------------------------------

    def add_edge(self, u: int, v: int) -> None:
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.edge_count += 1

    def remove_edge(self, u: int, v: int) -> None:
        self.adj[u].remove(v)
        self.adj[v].remove(u)
        self.edge_count -= 1

    # -- free-neighbor index -----------------------------------------------

    def has_free(self, v: int) -> bool:
        return self.free_index[v].total > 0

    def get_free(self, v: int) -> int | None:
        return self.free_index[v].get_free()

    def f_insert(self, v: int, u: int) -> None:
        """Record u as a free neighbor of v (idempotent)."""
        self.check_vertex(u)
        self.free_index[v].insert(u)

    def f_delete(self, v: int, u: int) -> None:
        """Drop u from v's free-neighbor index (idempotent)."""
        self.check_vertex(u)
        self.free_index[v].delete(u)

    # -- ownership ---------------------------------------------------------

    def own_add(self, owner: int, other: int) -> None:
        """Charge edge (owner, other) to owner's list.

        The edge must exist and must not already sit in either endpoint's
        list: each edge has exactly one owner.
        """
        if other not in self.adj[owner]:
            raise ValueError(f"({owner}, {other}) is not an edge")
        if other in self.owners[owner] or owner in self.owners[other]:
            raise ValueError(f"edge ({owner}, {other}) already owned")
        self.owners[owner].add(other)

    def own_remove(self, owner: int, other: int) -> None:
        if other not in self.owners[owner]:
            raise ValueError(f"edge ({owner}, {other}) not owned by {owner}")
        self.owners[owner].remove(other)

    def own_sample_uniform(self, owner: int) -> int:
        """Other endpoint of an edge drawn uniformly from owner's list."""
        return self.owners[owner].sample(self.rng)

    # -- matching ----------------------------------------------------------

    def set_match(self, u: int, v: int) -> None:
        mate = self.mate
        if u == v:
            raise ValueError(f"cannot match {u} to itself")
        if v not in self.adj[u]:
            raise ValueError(f"({u}, {v}) is not an edge")
        if mate[u] is not None or mate[v] is not None:
            raise ValueError(f"set_match({u}, {v}): an endpoint is matched")
        mate[u] = v
        mate[v] = u
        self.matching_size += 1

    def unset_match(self, u: int, v: int) -> None:
        mate = self.mate
        if mate[u] != v or mate[v] != u:
            raise ValueError(f"({u}, {v}) is not a matched pair")
        mate[u] = None
        mate[v] = None
        self.matching_size -= 1

    def matched_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u, v in enumerate(self.mate) if v is not None and u < v]


def new_state(config: Config) -> State:
    """Fresh state: n isolated free level-0 vertices, seeded rng."""
    return State(config)
