"""Qudit interaction graphs, vertex subsets and edge distributions.

Subsets are plain ``int`` bit masks: bit ``i`` set means vertex ``i`` is a
member. This keeps the algebra engine's term maps cheap to hash and merge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

MAX_VERTICES = 64

Edge = tuple[int, int]


@dataclass(frozen=True)
class QuditGraph:
    """Undirected simple graph whose vertices each carry a ``d``-level system."""

    n: int
    edges: tuple[Edge, ...]
    d: int

    def __post_init__(self):
        if self.n < 1 or self.n > MAX_VERTICES:
            raise ValueError(f"vertex count must be in [1, {MAX_VERTICES}], got {self.n}")
        if self.d < 2:
            raise ValueError(f"local dimension must be >= 2, got {self.d}")
        canon = []
        seen = set()
        for a, b in self.edges:
            a, b = int(a), int(b)
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < self.n and 0 <= b < self.n):
                raise ValueError(f"edge ({a}, {b}) has an endpoint outside [0, {self.n})")
            e = (min(a, b), max(a, b))
            if e in seen:
                raise ValueError(f"duplicate edge {e}")
            seen.add(e)
            canon.append(e)
        object.__setattr__(self, "edges", tuple(canon))

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def edge_mask(self, e: Edge) -> int:
        return (1 << e[0]) | (1 << e[1])

    def has_edge(self, e: Edge) -> bool:
        return (min(e), max(e)) in self.edges

    def is_chain(self) -> bool:
        return self.n >= 2 and self.edges == tuple((i, i + 1) for i in range(self.n - 1))


def build_chain(L: int, d: int) -> QuditGraph:
    """Open path ``0 - 1 - ... - L-1``."""
    if L < 2:
        raise ValueError(f"chain needs L >= 2, got {L}")
    if d < 2:
        raise ValueError(f"local dimension must be >= 2, got {d}")
    return QuditGraph(L, tuple((i, i + 1) for i in range(L - 1)), d)


def build_cycle(L: int, d: int) -> QuditGraph:
    """Closed ring of ``L`` vertices; the last edge is ``(0, L-1)``."""
    if L < 3:
        raise ValueError(f"cycle needs L >= 3, got {L}")
    edges = [(i, i + 1) for i in range(L - 1)] + [(0, L - 1)]
    return QuditGraph(L, tuple(edges), d)


def subset_mask(vertices: Iterable[int], n: int) -> int:
    mask = 0
    for v in vertices:
        v = int(v)
        if not 0 <= v < n:
            raise ValueError(f"vertex {v} outside [0, {n})")
        mask |= 1 << v
    return mask


def interval_mask(start: int, stop: int) -> int:
    """Mask of the vertices ``start, ..., stop-1``."""
    if stop <= start:
        return 0
    return ((1 << (stop - start)) - 1) << start


def mask_vertices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def check_subset(g: QuditGraph, mask: int) -> int:
    if mask < 0 or mask > g.full_mask:
        raise ValueError(f"subset {mask:#x} is not within the {g.n} vertices of the graph")
    return mask


def straddles(e_mask: int, mask: int) -> bool:
    """True iff exactly one endpoint of the edge lies in the subset."""
    hit = mask & e_mask
    return hit != 0 and hit != e_mask


def boundary_edges(g: QuditGraph, A: int) -> list[Edge]:
    check_subset(g, A)
    return [e for e in g.edges if straddles(g.edge_mask(e), A)]


def boundary_fraction(g: QuditGraph, A: int) -> float:
    if not g.edges:
        raise ValueError("graph has no edges")
    return len(boundary_edges(g, A)) / len(g.edges)


@dataclass(frozen=True)
class EdgeDistribution:
    """Probability ``probs[i]`` of drawing ``edges[i]`` at a clock tick."""

    edges: tuple[Edge, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        if len(self.edges) != len(self.probs):
            raise ValueError("edges and probs differ in length")
        if not self.edges:
            raise ValueError("empty edge distribution")
        if any(p < 0 for p in self.probs):
            raise ValueError("negative edge probability")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"edge probabilities sum to {total!r}, not 1")

    def check_support(self, g: QuditGraph) -> None:
        for e in self.edges:
            if not g.has_edge(e):
                raise ValueError(f"distribution edge {e} is not an edge of the graph")


def uniform_edge_distribution(g: QuditGraph) -> EdgeDistribution:
    if not g.edges:
        raise ValueError("graph has no edges")
    m = len(g.edges)
    return EdgeDistribution(g.edges, tuple(1.0 / m for _ in range(m)))


def edge_distribution(g: QuditGraph, weights: Sequence[float]) -> EdgeDistribution:
    """Normalize nonnegative per-edge weights into a distribution on ``g``."""
    if len(weights) != len(g.edges):
        raise ValueError("one weight per edge required")
    total = math.fsum(weights)
    if total <= 0:
        raise ValueError("weights must have positive sum")
    return EdgeDistribution(g.edges, tuple(w / total for w in weights))
